//! Seeded ensembles, end-to-end verification and tightness sweeps.
//!
//! Every generator targets the hypothesis of one bound and is checked by that
//! bound's validator before an instance is emitted, so a generator bug shows
//! up as a config error rather than as silently biased data.

use std::f64::consts::FRAC_PI_2;
use std::io::Write;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{self, BoundParams, BoundReport, TheoremId};
use crate::error::{Error, Result};
use crate::io::format_g17;
use crate::poly::SparseQPolynomial;
use crate::quat::{sample_unit, sample_unit_imaginary, Quaternion};
use crate::roots::find_zeros;

/// Relative slack on containment, `|zero| ≤ R·(1 + CONTAINMENT_SLACK)`.
pub const CONTAINMENT_SLACK: f64 = 1e-7;
/// Largest admissible relative residual of a reported zero.
pub const RESIDUAL_LIMIT: f64 = 1e-7;
/// Adjacent coefficients closer than this are redrawn.
const ADJACENT_MIN: f64 = 1e-6;
/// Coefficients smaller than this (before scaling) are redrawn.
const COEFF_MIN: f64 = 1e-3;
const MAX_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnsembleKind {
    /// Dense, positive, nondecreasing real coefficients.
    MonotoneReal,
    /// Lacunary, nondecreasing moduli, every coefficient within `α/2` of a
    /// common direction.
    MonotoneModulusAngle { alpha: f64 },
    /// Lacunary, α ↑, β ↓, γ unimodal, δ free.
    ComponentMonotone,
    /// Lacunary `α + βi` with α ↑ and β ↓.
    ComplexCo1,
    /// Lacunary `α + βi` with α ↑.
    ComplexCo2,
    /// Lacunary real nondecreasing.
    RealLacunary,
}

impl EnsembleKind {
    /// The bound whose hypothesis this kind satisfies.
    pub fn theorem(self) -> TheoremId {
        match self {
            EnsembleKind::MonotoneReal => TheoremId::Ek,
            EnsembleKind::MonotoneModulusAngle { .. } => TheoremId::T1,
            EnsembleKind::ComponentMonotone => TheoremId::T2,
            EnsembleKind::ComplexCo1 => TheoremId::Co1,
            EnsembleKind::ComplexCo2 => TheoremId::Co2,
            EnsembleKind::RealLacunary => TheoremId::Cor3,
        }
    }

    /// Parses a kind name; `alpha` is required by `monotone-modulus-angle`.
    pub fn parse(name: &str, alpha: Option<f64>) -> Result<Self> {
        Ok(match name {
            "monotone-real" => EnsembleKind::MonotoneReal,
            "monotone-modulus-angle" => EnsembleKind::MonotoneModulusAngle {
                alpha: alpha.ok_or_else(|| Error::Config("monotone-modulus-angle needs an alpha".into()))?,
            },
            "component-monotone" => EnsembleKind::ComponentMonotone,
            "complex-co1" => EnsembleKind::ComplexCo1,
            "complex-co2" => EnsembleKind::ComplexCo2,
            "real-lacunary" => EnsembleKind::RealLacunary,
            other => return Err(Error::Config(format!("unknown ensemble kind `{other}`"))),
        })
    }
}

fn default_max_gap() -> u32 {
    4
}

fn default_scale() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct EnsembleConfig {
    #[serde(flatten)]
    pub kind: EnsembleKind,
    pub max_degree: u32,
    /// Upper bound on the number of stored terms `k + 1`.
    pub support_size: u32,
    pub count: usize,
    pub seed: u64,
    /// Upper bound on the number of missing exponents between adjacent terms.
    #[serde(default = "default_max_gap")]
    pub max_gap: u32,
    /// Positive real factor applied to every coefficient.
    #[serde(default = "default_scale")]
    pub scale: f64,
}

impl EnsembleConfig {
    pub fn new(kind: EnsembleKind, max_degree: u32, support_size: u32, count: usize, seed: u64) -> Self {
        Self {
            kind,
            max_degree,
            support_size,
            count,
            seed,
            max_gap: default_max_gap(),
            scale: default_scale(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self =
            serde_json::from_str(text).map_err(|e| Error::Config(format!("invalid ensemble config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.count < 1 {
            return Err(Error::Config("count must be at least 1".into()));
        }
        if self.support_size < 2 {
            return Err(Error::Config("supportSize must be at least 2 (k >= 1)".into()));
        }
        if self.max_degree < self.support_size {
            return Err(Error::Config(format!(
                "maxDegree = {} must be at least supportSize = {}",
                self.max_degree, self.support_size
            )));
        }
        if !(self.scale.is_finite() && self.scale > 0.0) {
            return Err(Error::Config(format!("scale = {} must be positive and finite", self.scale)));
        }
        if let EnsembleKind::MonotoneModulusAngle { alpha } = self.kind {
            if !(0.0..=FRAC_PI_2).contains(&alpha) {
                return Err(Error::Config(format!("alpha = {alpha} outside [0, pi/2]")));
            }
        }
        Ok(())
    }
}

fn sorted_uniform(rng: &mut ChaCha8Rng, len: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..len).map(|_| rng.random_range(lo..hi)).collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Values nondecreasing up to a random peak and nonincreasing after it.
fn unimodal(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let mut v = sorted_uniform(rng, len, -1.0, 1.0);
    let peak = v.pop().expect("len >= 1");
    let r = rng.random_range(0..len);
    v.shuffle(rng);
    let (left, right) = v.split_at_mut(r);
    left.sort_by(f64::total_cmp);
    right.sort_by(|a, b| b.total_cmp(a));
    let mut out = left.to_vec();
    out.push(peak);
    out.extend_from_slice(right);
    out
}

/// Exponents `0 = n₀ < ⋯ < n_k` with `1 ≤ k < support_size`, each gap at
/// most `max_gap`, and `n_k ≤ max_degree`.
fn lacunary_support(rng: &mut ChaCha8Rng, cfg: &EnsembleConfig) -> Vec<u32> {
    let k = rng.random_range(1..cfg.support_size);
    let mut exps = vec![0u32];
    for j in 1..=k {
        let last = *exps.last().unwrap();
        let remaining_terms = k - j;
        let budget = cfg.max_degree - last - 1 - remaining_terms;
        let gap = rng.random_range(0..=cfg.max_gap.min(budget));
        exps.push(last + gap + 1);
    }
    exps
}

fn draw_coeffs(rng: &mut ChaCha8Rng, kind: EnsembleKind, len: usize) -> Vec<Quaternion> {
    match kind {
        EnsembleKind::MonotoneReal => {
            sorted_uniform(rng, len, 0.0, 1.0).into_iter().map(Quaternion::real).collect()
        }
        EnsembleKind::MonotoneModulusAngle { alpha } => {
            let b = sample_unit(rng);
            let rho = sorted_uniform(rng, len, 0.0, 1.0);
            rho.into_iter()
                .map(|r| {
                    let phi = if alpha > 0.0 { rng.random_range(-alpha / 2.0..=alpha / 2.0) } else { 0.0 };
                    let u = sample_unit_imaginary(rng).get();
                    (Quaternion::real(phi.cos()) + u.scale(phi.sin())) * b * r
                })
                .collect()
        }
        EnsembleKind::ComponentMonotone => {
            let a = sorted_uniform(rng, len, -1.0, 1.0);
            let mut b = sorted_uniform(rng, len, -1.0, 1.0);
            b.reverse();
            let g = unimodal(rng, len);
            (0..len)
                .map(|l| Quaternion::new(a[l], b[l], g[l], rng.random_range(-1.0..1.0)))
                .collect()
        }
        EnsembleKind::ComplexCo1 => {
            let a = sorted_uniform(rng, len, -1.0, 1.0);
            let mut b = sorted_uniform(rng, len, -1.0, 1.0);
            b.reverse();
            (0..len).map(|l| Quaternion::new(a[l], b[l], 0.0, 0.0)).collect()
        }
        EnsembleKind::ComplexCo2 => {
            let a = sorted_uniform(rng, len, -1.0, 1.0);
            (0..len)
                .map(|l| Quaternion::new(a[l], rng.random_range(-1.0..1.0), 0.0, 0.0))
                .collect()
        }
        EnsembleKind::RealLacunary => {
            sorted_uniform(rng, len, -1.0, 1.0).into_iter().map(Quaternion::real).collect()
        }
    }
}

fn acceptable(coeffs: &[Quaternion]) -> bool {
    coeffs.iter().all(|c| c.norm() >= COEFF_MIN)
        && coeffs.windows(2).all(|w| (w[1] - w[0]).norm() > ADJACENT_MIN)
}

/// Validator parameters matching how `kind` was generated.
pub fn params_for(kind: EnsembleKind) -> BoundParams {
    match kind {
        EnsembleKind::MonotoneModulusAngle { alpha } => BoundParams { alpha: Some(alpha), ..Default::default() },
        _ => BoundParams::default(),
    }
}

fn draw_instance(rng: &mut ChaCha8Rng, cfg: &EnsembleConfig) -> Result<SparseQPolynomial> {
    for _ in 0..MAX_DRAWS {
        let exps: Vec<u32> = match cfg.kind {
            EnsembleKind::MonotoneReal => {
                let n = rng.random_range(cfg.support_size - 1..=cfg.max_degree);
                (0..=n).collect()
            }
            _ => lacunary_support(rng, cfg),
        };
        let coeffs = draw_coeffs(rng, cfg.kind, exps.len());
        if !acceptable(&coeffs) {
            continue;
        }
        let terms = exps.into_iter().zip(coeffs.into_iter().map(|c| c * cfg.scale));
        return SparseQPolynomial::new(terms);
    }
    Err(Error::Config(format!("no admissible instance after {MAX_DRAWS} draws")))
}

/// `config.count` polynomials, each satisfying the hypothesis of
/// `config.kind.theorem()`.
pub fn generate(config: &EnsembleConfig) -> Result<Vec<SparseQPolynomial>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let theorem = config.kind.theorem();
    let params = params_for(config.kind);
    let mut out = Vec::with_capacity(config.count);
    for id in 0..config.count {
        let p = draw_instance(&mut rng, config)?;
        let report = bounds::compute(theorem, &p, &params)?;
        if !report.hypothesis.satisfied {
            return Err(Error::Config(format!(
                "generator produced instance {id} violating {theorem}: {}",
                report.hypothesis.summary()
            )));
        }
        out.push(p);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct VerifyRow {
    pub instance_id: usize,
    pub theorem_id: String,
    pub radius: f64,
    pub max_zero_modulus: f64,
    /// `maxZeroModulus / radius`.
    pub tight: f64,
    pub ok: bool,
    pub worst_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

/// Checks the zeros of `p` against `radius`.
pub fn verify_radius(p: &SparseQPolynomial, theorem_id: &str, radius: f64, tol: f64) -> Result<VerifyRow> {
    let zs = find_zeros(p, tol)?;
    let max_zero_modulus = zs.max_modulus();
    let worst_residual = zs.worst_residual();
    let mut diagnostic = Vec::new();
    if !zs.is_complete() {
        let details: Vec<String> = zs
            .unresolved
            .iter()
            .map(|u| format!("({}, {}) x{}: {}", u.x, u.y, u.multiplicity, u.detail))
            .collect();
        diagnostic.push(format!("unresolved roots {}", details.join(", ")));
    }
    if max_zero_modulus > radius * (1.0 + CONTAINMENT_SLACK) {
        diagnostic.push(format!("zero of modulus {max_zero_modulus} outside radius {radius}"));
    }
    if worst_residual > RESIDUAL_LIMIT {
        diagnostic.push(format!("residual {worst_residual} exceeds {RESIDUAL_LIMIT}"));
    }
    Ok(VerifyRow {
        instance_id: 0,
        theorem_id: theorem_id.to_string(),
        radius,
        max_zero_modulus,
        tight: max_zero_modulus / radius,
        ok: diagnostic.is_empty(),
        worst_residual,
        diagnostic: (!diagnostic.is_empty()).then(|| diagnostic.join("; ")),
    })
}

/// Checks the zeros of `p` against a computed bound.
pub fn verify(p: &SparseQPolynomial, report: &BoundReport, tol: f64) -> Result<VerifyRow> {
    let radius = match (report.hypothesis.satisfied, report.radius) {
        (true, Some(r)) => r,
        _ => {
            return Err(Error::Hypothesis(format!(
                "{}: {}",
                report.theorem_id,
                report.hypothesis.summary()
            )))
        }
    };
    verify_radius(p, report.theorem_id.as_str(), radius, tol)
}

/// Which radius a sweep checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    Bound(TheoremId),
    /// The `t1` radius with `|aₙ|` multiplying the bracket.
    T1Literal,
}

impl SweepTarget {
    pub fn label(self) -> &'static str {
        match self {
            SweepTarget::Bound(t) => t.as_str(),
            SweepTarget::T1Literal => "t1-literal",
        }
    }
}

impl FromStr for SweepTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "t1-literal" {
            Ok(SweepTarget::T1Literal)
        } else {
            s.parse().map(SweepTarget::Bound)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct Summary {
    pub count: usize,
    pub failures: usize,
    pub min_tight: f64,
    pub mean_tight: f64,
    pub max_tight: f64,
}

fn failed_row(instance_id: usize, label: &str, detail: String) -> VerifyRow {
    VerifyRow {
        instance_id,
        theorem_id: label.to_string(),
        radius: f64::NAN,
        max_zero_modulus: f64::NAN,
        tight: f64::NAN,
        ok: false,
        worst_residual: f64::NAN,
        diagnostic: Some(detail),
    }
}

fn sweep_one(id: usize, p: &SparseQPolynomial, target: SweepTarget, params: &BoundParams, tol: f64) -> VerifyRow {
    let label = target.label();
    let theorem = match target {
        SweepTarget::Bound(t) => t,
        SweepTarget::T1Literal => TheoremId::T1,
    };
    let report = match bounds::compute(theorem, p, params) {
        Ok(r) => r,
        Err(e) => return failed_row(id, label, e.to_string()),
    };
    if !report.hypothesis.satisfied {
        return failed_row(id, label, format!("hypothesis violated: {}", report.hypothesis.summary()));
    }
    let radius = match target {
        SweepTarget::Bound(_) => report.radius,
        SweepTarget::T1Literal => report.params.get("literalRadius").copied(),
    };
    let Some(radius) = radius else {
        return failed_row(id, label, "no radius".into());
    };
    match verify_radius(p, label, radius, tol) {
        Ok(mut row) => {
            row.instance_id = id;
            row
        }
        Err(e) => failed_row(id, label, e.to_string()),
    }
}

/// Verifies every instance against `target`; rows are ordered by instance id.
pub fn sweep_instances(
    instances: &[SparseQPolynomial],
    target: SweepTarget,
    params: &BoundParams,
    tol: f64,
) -> (Vec<VerifyRow>, Summary) {
    let rows: Vec<VerifyRow> = instances
        .par_iter()
        .enumerate()
        .map(|(id, p)| sweep_one(id, p, target, params, tol))
        .collect();
    let summary = summarize(&rows);
    (rows, summary)
}

pub fn sweep(config: &EnsembleConfig, target: SweepTarget, tol: f64) -> Result<(Vec<VerifyRow>, Summary)> {
    let instances = generate(config)?;
    let params = params_for(config.kind);
    Ok(sweep_instances(&instances, target, &params, tol))
}

pub fn summarize(rows: &[VerifyRow]) -> Summary {
    let tights: Vec<f64> = rows.iter().map(|r| r.tight).filter(|t| t.is_finite()).collect();
    let (min, max, mean) = if tights.is_empty() {
        (f64::NAN, f64::NAN, f64::NAN)
    } else {
        (
            tights.iter().copied().fold(f64::INFINITY, f64::min),
            tights.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            tights.iter().sum::<f64>() / tights.len() as f64,
        )
    };
    Summary {
        count: rows.len(),
        failures: rows.iter().filter(|r| !r.ok).count(),
        min_tight: min,
        mean_tight: mean,
        max_tight: max,
    }
}

pub const CSV_HEADER: [&str; 7] =
    ["instanceId", "theoremId", "radius", "maxZeroModulus", "tight", "ok", "worstResidual"];

/// Rows as CSV with floats in `%.17g`; non-finite values print as `NaN`.
pub fn write_csv<W: Write>(rows: &[VerifyRow], out: W) -> Result<()> {
    let num = |x: f64| if x.is_finite() { format_g17(x) } else { "NaN".to_string() };
    let mut w = csv::Writer::from_writer(out);
    let io_err = |e: csv::Error| Error::Config(format!("cannot write CSV: {e}"));
    w.write_record(CSV_HEADER).map_err(io_err)?;
    for r in rows {
        w.write_record([
            r.instance_id.to_string(),
            r.theorem_id.clone(),
            num(r.radius),
            num(r.max_zero_modulus),
            num(r.tight),
            r.ok.to_string(),
            num(r.worst_residual),
        ])
        .map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::Config(format!("cannot write CSV: {e}")))?;
    Ok(())
}
