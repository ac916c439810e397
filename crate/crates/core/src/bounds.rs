//! Hypothesis validators and inclusion radii.
//!
//! Each `bound_*` function checks the coefficient restrictions of one
//! Eneström–Kakeya-type result and, when they hold, returns a radius `R` such
//! that every zero satisfies `|q| ≤ R`. Inequalities are checked non-strictly
//! with an absolute slack of [`SLACK`].
//!
//! | id     | restriction on the coefficients                                  |
//! |--------|------------------------------------------------------------------|
//! | `ek`   | dense, real, `0 < a₀ ≤ a₁ ≤ ⋯ ≤ aₙ`; radius 1                     |
//! | `q2`   | dense, `|a₀| ≤ ⋯ ≤ |aₙ|`, every `∠(a_ν, b) ≤ θ ≤ π/2`            |
//! | `q3`   | dense, `0 ≤ α₁ ≤ ⋯ ≤ αₙ`, `αₙ ≠ 0` (real parts)                 |
//! | `t1`   | lacunary, `0 < |a_{n₀}| ≤ ⋯`, adjacent distinct, pairwise angles ≤ 2α |
//! | `t2`   | lacunary, α ↑, β ↓, γ unimodal, δ free, adjacent distinct        |
//! | `co1`  | lacunary, coefficients `α + βi`, α ↑, β ↓                         |
//! | `co2`  | lacunary, coefficients `α + βi`, α ↑                              |
//! | `cor3` | lacunary, real, nondecreasing                                     |
//!
//! The `t1` radius is `M{(cos α + sin α) + 2 sin α Σ_{j<k}|a_{n_j}| / |aₙ|}`.
//! The form with `|aₙ|` multiplying the bracket instead of dividing it is not
//! invariant under `p ↦ p·λ` (which leaves the zeros in place) and is unsound
//! for small coefficients; it is reported as `literalRadius` for comparison.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mconst::{m_overall, MStrategy};
use crate::poly::SparseQPolynomial;
use crate::quat::{angle_between, AngleFrame, Quaternion};

/// Absolute slack applied to every inequality in the validators.
pub const SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TheoremId {
    Ek,
    Q2,
    Q3,
    T1,
    T2,
    Co1,
    Co2,
    Cor3,
    Cauchy,
}

impl TheoremId {
    pub const VALIDATED: [TheoremId; 8] = [
        TheoremId::Ek,
        TheoremId::Q2,
        TheoremId::Q3,
        TheoremId::T1,
        TheoremId::T2,
        TheoremId::Co1,
        TheoremId::Co2,
        TheoremId::Cor3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TheoremId::Ek => "ek",
            TheoremId::Q2 => "q2",
            TheoremId::Q3 => "q3",
            TheoremId::T1 => "t1",
            TheoremId::T2 => "t2",
            TheoremId::Co1 => "co1",
            TheoremId::Co2 => "co2",
            TheoremId::Cor3 => "cor3",
            TheoremId::Cauchy => "cauchy",
        }
    }
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "ek" => TheoremId::Ek,
            "q2" => TheoremId::Q2,
            "q3" => TheoremId::Q3,
            "t1" => TheoremId::T1,
            "t2" => TheoremId::T2,
            "co1" => TheoremId::Co1,
            "co2" => TheoremId::Co2,
            "cor3" => TheoremId::Cor3,
            "cauchy" => TheoremId::Cauchy,
            other => return Err(Error::Parse(format!("unknown theorem id `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub condition: String,
    pub index: Option<usize>,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct HypothesisReport {
    pub theorem_id: TheoremId,
    pub satisfied: bool,
    pub violations: Vec<Violation>,
}

impl HypothesisReport {
    fn new(theorem_id: TheoremId) -> Self {
        Self { theorem_id, satisfied: true, violations: Vec::new() }
    }

    fn violate(&mut self, condition: &str, index: Option<usize>, detail: impl Into<String>) {
        self.satisfied = false;
        self.violations.push(Violation {
            condition: condition.to_string(),
            index,
            detail: detail.into(),
        });
    }

    /// One-line summary of the violations.
    pub fn summary(&self) -> String {
        self.violations
            .iter()
            .map(|v| match v.index {
                Some(i) => format!("{} at index {}: {}", v.condition, i, v.detail),
                None => format!("{}: {}", v.condition, v.detail),
            })
            .collect::<Vec<_>>()
            .join("; ")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct BoundReport {
    pub theorem_id: TheoremId,
    /// `None` when the hypothesis fails.
    pub radius: Option<f64>,
    pub params: BTreeMap<String, f64>,
    pub hypothesis: HypothesisReport,
    pub erratum_applied: bool,
}

impl BoundReport {
    fn new(hypothesis: HypothesisReport) -> Self {
        Self {
            theorem_id: hypothesis.theorem_id,
            radius: None,
            params: BTreeMap::new(),
            hypothesis,
            erratum_applied: false,
        }
    }
}

/// Peak index of the unimodal γ-components.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PeakIndex {
    #[default]
    Auto,
    Index(usize),
}

impl FromStr for PeakIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(PeakIndex::Auto);
        }
        s.parse::<usize>()
            .map(PeakIndex::Index)
            .map_err(|_| Error::Parse(format!("peak index must be `auto` or an integer, got `{s}`")))
    }
}

/// Optional parameters; unset angles default to the smallest admissible value.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BoundParams {
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub theta: Option<f64>,
    pub b: Option<Quaternion>,
    pub peak: PeakIndex,
}

/// Real components `a_l = α_l + β_l i + γ_l j + δ_l k` of each stored term.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentView {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub delta: Vec<f64>,
}

impl ComponentView {
    pub fn of(p: &SparseQPolynomial) -> Self {
        let mut v = Self { alpha: vec![], beta: vec![], gamma: vec![], delta: vec![] };
        for c in p.coeffs() {
            v.alpha.push(c.w);
            v.beta.push(c.x);
            v.gamma.push(c.y);
            v.delta.push(c.z);
        }
        v
    }

    pub fn coefficient(&self, l: usize) -> Quaternion {
        Quaternion::new(self.alpha[l], self.beta[l], self.gamma[l], self.delta[l])
    }
}

fn le(a: f64, b: f64) -> bool {
    a <= b + SLACK
}

/// Right-hand side of the chord inequality
/// `|q₂ − q₁| ≤ (|q₂| − |q₁|) cos θ + (|q₁| + |q₂|) sin θ`, valid when
/// `|q₁| ≤ |q₂|` and `∠(q₁, q₂) ≤ 2θ ≤ π`.
pub fn chord_bound(q1: Quaternion, q2: Quaternion, theta: f64) -> Result<f64> {
    let (n1, n2) = (q1.norm(), q2.norm());
    if !le(n1, n2) {
        return Err(Error::domain(format!("|q1| = {n1} exceeds |q2| = {n2}")));
    }
    if !(0.0..=FRAC_PI_2).contains(&theta) {
        return Err(Error::domain(format!("theta = {theta} outside [0, pi/2]")));
    }
    if n1 > 0.0 && n2 > 0.0 {
        let ang = angle_between(q1, q2)?;
        if !le(ang, 2.0 * theta) {
            return Err(Error::domain(format!("angle {ang} exceeds 2 theta = {}", 2.0 * theta)));
        }
    }
    Ok((n2 - n1) * theta.cos() + (n1 + n2) * theta.sin())
}

fn require_degree(p: &SparseQPolynomial, h: &mut HypothesisReport) {
    if p.degree() == 0 {
        h.violate("degree", None, "polynomial must have degree >= 1");
    }
}

fn require_dense(p: &SparseQPolynomial, h: &mut HypothesisReport) {
    if !p.is_dense() {
        let missing = (0..=p.degree()).find(|e| p.coeff(*e) == Quaternion::ZERO);
        h.violate(
            "dense support",
            missing.map(|e| e as usize),
            "every exponent 0..=n must carry a nonzero coefficient",
        );
    }
}

fn require_lacunary_class(p: &SparseQPolynomial, h: &mut HypothesisReport) {
    if p.terms().len() < 2 {
        h.violate("support", None, "at least two terms are required");
    }
    if p.terms()[0].exp != 0 {
        h.violate("support", Some(0), "lowest exponent n_0 must be 0");
    }
}

fn require_adjacent_distinct(p: &SparseQPolynomial, h: &mut HypothesisReport) {
    for (j, w) in p.terms().windows(2).enumerate() {
        if (w[1].coeff - w[0].coeff).norm() <= SLACK {
            h.violate(
                "adjacent coefficients distinct",
                Some(j + 1),
                format!("a_{{n_{}}} equals a_{{n_{}}}", j + 1, j),
            );
        }
    }
}

fn require_nondecreasing(values: &[f64], name: &str, h: &mut HypothesisReport) {
    for j in 1..values.len() {
        if !le(values[j - 1], values[j]) {
            h.violate(
                &format!("{name} nondecreasing"),
                Some(j),
                format!("{} > {}", values[j - 1], values[j]),
            );
        }
    }
}

fn require_nonincreasing(values: &[f64], name: &str, h: &mut HypothesisReport) {
    for j in 1..values.len() {
        if !le(values[j], values[j - 1]) {
            h.violate(
                &format!("{name} nonincreasing"),
                Some(j),
                format!("{} < {}", values[j - 1], values[j]),
            );
        }
    }
}

fn require_zero(values: &[f64], name: &str, h: &mut HypothesisReport) {
    for (j, v) in values.iter().enumerate() {
        if v.abs() > SLACK {
            h.violate(&format!("{name} component zero"), Some(j), format!("{name} = {v}"));
        }
    }
}

/// Hypothesis of the quaternionic Eneström–Kakeya theorem.
pub fn check_ek(p: &SparseQPolynomial) -> HypothesisReport {
    let mut h = HypothesisReport::new(TheoremId::Ek);
    require_degree(p, &mut h);
    require_dense(p, &mut h);
    let view = ComponentView::of(p);
    for (j, c) in p.coeffs().enumerate() {
        if !c.is_real() {
            h.violate("real coefficients", Some(j), format!("coefficient {c} is not real"));
        }
    }
    if view.alpha[0] <= 0.0 {
        h.violate("positive coefficients", Some(0), format!("a_0 = {} <= 0", view.alpha[0]));
    }
    require_nondecreasing(&view.alpha, "coefficients", &mut h);
    h
}

pub fn bound_ek(p: &SparseQPolynomial) -> BoundReport {
    let mut report = BoundReport::new(check_ek(p));
    if report.hypothesis.satisfied {
        report.radius = Some(1.0);
    }
    report
}

/// Cone-restricted coefficients of nondecreasing modulus (dense support).
pub fn bound_q2(p: &SparseQPolynomial, frame: &AngleFrame) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::Q2);
    require_degree(p, &mut h);
    require_dense(p, &mut h);
    let moduli: Vec<f64> = p.coeffs().map(Quaternion::norm).collect();
    require_nondecreasing(&moduli, "moduli", &mut h);
    let theta = frame.half_aperture();
    for (j, c) in p.coeffs().enumerate() {
        let ang = angle_between(c, frame.b()).expect("nonzero operands");
        if !le(ang, theta) {
            h.violate("angle to b", Some(j), format!("angle {ang} exceeds theta = {theta}"));
        }
    }
    let mut report = BoundReport::new(h);
    report.params.insert("theta".into(), theta);
    for (key, value) in ["bW", "bX", "bY", "bZ"].iter().zip(frame.b().to_array()) {
        report.params.insert((*key).into(), value);
    }
    if report.hypothesis.satisfied {
        let lead = p.leading().norm();
        let lower: f64 = moduli[..moduli.len() - 1].iter().sum();
        report.radius = Some(theta.cos() + theta.sin() + 2.0 * theta.sin() / lead * lower);
    }
    report
}

/// Smallest admissible cone: `b = aₙ` and `θ = max_ν ∠(a_ν, aₙ)`, or the
/// smallest `θ` for a given `b`.
pub fn default_frame(p: &SparseQPolynomial, b: Option<Quaternion>) -> Result<AngleFrame> {
    let b = b.unwrap_or_else(|| p.leading());
    let mut theta = 0.0f64;
    for c in p.coeffs() {
        theta = theta.max(angle_between(c, b)?);
    }
    AngleFrame::new(b, theta.min(FRAC_PI_2))
}

/// Nondecreasing nonnegative real parts from index 1 (dense support).
pub fn bound_q3(p: &SparseQPolynomial) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::Q3);
    require_degree(p, &mut h);
    require_dense(p, &mut h);
    let view = ComponentView::of(p);
    let alpha_n = *view.alpha.last().unwrap();
    if view.alpha.len() > 1 {
        if view.alpha[1] < -SLACK {
            h.violate("alpha_1 nonnegative", Some(1), format!("alpha_1 = {}", view.alpha[1]));
        }
        let tail = &view.alpha[1..];
        for j in 1..tail.len() {
            if !le(tail[j - 1], tail[j]) {
                h.violate(
                    "real parts nondecreasing",
                    Some(j + 1),
                    format!("{} > {}", tail[j - 1], tail[j]),
                );
            }
        }
    }
    if alpha_n <= 0.0 {
        h.violate("alpha_n nonzero", view.alpha.len().checked_sub(1), format!("alpha_n = {alpha_n}"));
    }
    let mut report = BoundReport::new(h);
    if report.hypothesis.satisfied {
        // The sum runs over ν = 0..=n inclusive.
        report.radius = Some(1.0 + 2.0 / alpha_n * p.coeff_norm_sum());
    }
    report
}

fn max_adjacent_angle(p: &SparseQPolynomial) -> f64 {
    p.terms()
        .windows(2)
        .map(|w| angle_between(w[1].coeff, w[0].coeff).expect("stored coefficients are nonzero"))
        .fold(0.0, f64::max)
}

/// Lacunary coefficients of nondecreasing modulus with adjacent angles at
/// most `2α`. `alpha = None` selects the smallest admissible `α`.
///
/// The hypothesis is stated through `|arg a_{n_j} − β| ≤ α`; what the radius
/// actually needs is the pairwise condition `∠(a_{n_j}, a_{n_{j−1}}) ≤ 2α`,
/// which is what gets checked. `beta` is recorded only.
pub fn bound_t1(p: &SparseQPolynomial, alpha: Option<f64>, beta: Option<f64>) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::T1);
    require_lacunary_class(p, &mut h);
    let moduli: Vec<f64> = p.coeffs().map(Quaternion::norm).collect();
    require_nondecreasing(&moduli, "moduli", &mut h);
    require_adjacent_distinct(p, &mut h);
    let alpha = alpha.unwrap_or_else(|| (max_adjacent_angle(p) / 2.0).min(FRAC_PI_2));
    if !(0.0..=FRAC_PI_2).contains(&alpha) {
        h.violate("alpha range", None, format!("alpha = {alpha} outside [0, pi/2]"));
    }
    for (j, w) in p.terms().windows(2).enumerate() {
        let ang = angle_between(w[1].coeff, w[0].coeff).expect("nonzero coefficients");
        if !le(ang, 2.0 * alpha) {
            h.violate(
                "adjacent angle",
                Some(j + 1),
                format!("angle {ang} exceeds 2 alpha = {}", 2.0 * alpha),
            );
        }
    }

    let mut report = BoundReport::new(h);
    report.params.insert("alpha".into(), alpha);
    if let Some(beta) = beta {
        report.params.insert("beta".into(), beta);
    }
    if !report.hypothesis.satisfied {
        return report;
    }
    let m = match m_overall(p, MStrategy::ClosedForm) {
        Ok(r) => r.overall,
        Err(e) => {
            report.hypothesis.violate("M constant", None, e.to_string());
            return report;
        }
    };
    let lead = p.leading().norm();
    let lower: f64 = moduli[..moduli.len() - 1].iter().sum();
    let (s, c) = alpha.sin_cos();
    let corrected = m * ((c + s) + 2.0 * lower * s / lead);
    let literal = m * (lead * (c + s) + 2.0 * lower * s);
    report.params.insert("M".into(), m);
    report.params.insert("literalRadius".into(), literal);
    report.radius = Some(corrected);
    report.erratum_applied = true;
    report
}

/// Smallest index attaining the maximum of `values`.
fn first_argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

fn is_unimodal_at(values: &[f64], r: usize) -> bool {
    values[..=r].windows(2).all(|w| le(w[0], w[1])) && values[r..].windows(2).all(|w| le(w[1], w[0]))
}

fn m_or_violation(p: &SparseQPolynomial, report: &mut BoundReport) -> Option<f64> {
    match m_overall(p, MStrategy::ClosedForm) {
        Ok(r) => {
            report.params.insert("M".into(), r.overall);
            Some(r.overall)
        }
        Err(e) => {
            report.hypothesis.violate("M constant", None, e.to_string());
            None
        }
    }
}

/// Component-monotone lacunary coefficients: α nondecreasing, β
/// nonincreasing, γ unimodal with peak `r`, δ unrestricted.
pub fn bound_t2(p: &SparseQPolynomial, peak: PeakIndex) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::T2);
    require_lacunary_class(p, &mut h);
    require_adjacent_distinct(p, &mut h);
    let v = ComponentView::of(p);
    let k = v.alpha.len() - 1;
    require_nondecreasing(&v.alpha, "alpha", &mut h);
    require_nonincreasing(&v.beta, "beta", &mut h);
    let r = match peak {
        PeakIndex::Auto => first_argmax(&v.gamma),
        PeakIndex::Index(r) => r,
    };
    if r > k {
        h.violate("gamma unimodal", Some(r), format!("peak index exceeds k = {k}"));
    } else if !is_unimodal_at(&v.gamma, r) {
        h.violate("gamma unimodal", Some(r), "gamma is not unimodal with a peak at this index");
    }

    let mut report = BoundReport::new(h);
    report.params.insert("r".into(), r as f64);
    if !report.hypothesis.satisfied {
        return report;
    }
    let Some(m) = m_or_violation(p, &mut report) else {
        return report;
    };
    let delta_lower: f64 = v.delta[..k].iter().map(|d| d.abs()).sum();
    let bracket = (v.alpha[k] - v.alpha[0])
        + (v.beta[0] - v.beta[k])
        + 2.0 * v.gamma[r]
        - (v.gamma[0] + v.gamma[k])
        + 2.0 * delta_lower
        + v.delta[k].abs()
        + v.alpha[0].abs()
        + v.beta[0].abs()
        + v.gamma[0].abs();
    report.radius = Some(m / p.leading().norm() * bracket);
    report
}

fn require_complex_form(v: &ComponentView, h: &mut HypothesisReport) {
    require_zero(&v.gamma, "j", h);
    require_zero(&v.delta, "k", h);
}

/// Lacunary coefficients `α + βi` with α nondecreasing and β nonincreasing.
pub fn bound_co1(p: &SparseQPolynomial) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::Co1);
    require_lacunary_class(p, &mut h);
    require_adjacent_distinct(p, &mut h);
    let v = ComponentView::of(p);
    require_complex_form(&v, &mut h);
    require_nondecreasing(&v.alpha, "alpha", &mut h);
    require_nonincreasing(&v.beta, "beta", &mut h);
    let mut report = BoundReport::new(h);
    if !report.hypothesis.satisfied {
        return report;
    }
    let Some(m) = m_or_violation(p, &mut report) else {
        return report;
    };
    let k = v.alpha.len() - 1;
    let bracket = (v.alpha[k] - v.alpha[0] + v.alpha[0].abs())
        + (v.beta[0] - v.beta[k] + v.beta[0].abs());
    report.radius = Some(m / p.leading().norm() * bracket);
    report
}

/// Lacunary coefficients `α + βi` with α nondecreasing.
pub fn bound_co2(p: &SparseQPolynomial) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::Co2);
    require_lacunary_class(p, &mut h);
    require_adjacent_distinct(p, &mut h);
    let v = ComponentView::of(p);
    require_complex_form(&v, &mut h);
    require_nondecreasing(&v.alpha, "alpha", &mut h);
    let mut report = BoundReport::new(h);
    if !report.hypothesis.satisfied {
        return report;
    }
    let Some(m) = m_or_violation(p, &mut report) else {
        return report;
    };
    let k = v.alpha.len() - 1;
    let beta_lower: f64 = v.beta[..k].iter().map(|b| b.abs()).sum();
    let bracket = (v.alpha[k] - v.alpha[0] + v.alpha[0].abs()) + 2.0 * beta_lower + v.beta[k].abs();
    report.radius = Some(m / p.leading().norm() * bracket);
    report
}

/// Real nondecreasing lacunary coefficients.
pub fn bound_cor3(p: &SparseQPolynomial) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::Cor3);
    require_lacunary_class(p, &mut h);
    require_adjacent_distinct(p, &mut h);
    let v = ComponentView::of(p);
    require_zero(&v.beta, "i", &mut h);
    require_complex_form(&v, &mut h);
    require_nondecreasing(&v.alpha, "alpha", &mut h);
    let mut report = BoundReport::new(h);
    if !report.hypothesis.satisfied {
        return report;
    }
    let Some(m) = m_or_violation(p, &mut report) else {
        return report;
    };
    let k = v.alpha.len() - 1;
    report.radius = Some(m / p.leading().norm() * (v.alpha[k] - v.alpha[0] + v.alpha[0].abs()));
    report
}

/// Classical Cauchy radius `1 + max_{ν<n} |a_ν| / |aₙ|`.
pub fn cauchy_bound(p: &SparseQPolynomial) -> Result<f64> {
    if p.degree() == 0 {
        return Err(Error::domain("Cauchy bound needs degree >= 1"));
    }
    let lead = p.leading().norm();
    let terms = p.terms();
    let max_lower = terms[..terms.len() - 1]
        .iter()
        .map(|t| t.coeff.norm())
        .fold(0.0, f64::max);
    Ok(1.0 + max_lower / lead)
}

pub fn bound_cauchy(p: &SparseQPolynomial) -> BoundReport {
    let mut h = HypothesisReport::new(TheoremId::Cauchy);
    require_degree(p, &mut h);
    let mut report = BoundReport::new(h);
    report.radius = cauchy_bound(p).ok();
    report
}

/// Runs the named bound with `params`, filling unset angles with their
/// smallest admissible values.
pub fn compute(theorem: TheoremId, p: &SparseQPolynomial, params: &BoundParams) -> Result<BoundReport> {
    Ok(match theorem {
        TheoremId::Ek => bound_ek(p),
        TheoremId::Q2 => {
            let frame = match params.theta {
                Some(theta) => AngleFrame::new(params.b.unwrap_or_else(|| p.leading()), theta)?,
                None => default_frame(p, params.b)?,
            };
            bound_q2(p, &frame)
        }
        TheoremId::Q3 => bound_q3(p),
        TheoremId::T1 => bound_t1(p, params.alpha, params.beta),
        TheoremId::T2 => bound_t2(p, params.peak),
        TheoremId::Co1 => bound_co1(p),
        TheoremId::Co2 => bound_co2(p),
        TheoremId::Cor3 => bound_cor3(p),
        TheoremId::Cauchy => bound_cauchy(p),
    })
}

/// Every applicable bound plus the Cauchy radius, sorted by radius.
pub fn auto_select(p: &SparseQPolynomial, params: &BoundParams) -> Vec<BoundReport> {
    if p.degree() == 0 {
        return Vec::new();
    }
    let mut out: Vec<BoundReport> = TheoremId::VALIDATED
        .iter()
        .filter_map(|t| compute(*t, p, params).ok())
        .filter(|r| r.hypothesis.satisfied && r.radius.is_some())
        .collect();
    out.push(bound_cauchy(p));
    out.sort_by(|a, b| {
        a.radius
            .unwrap_or(f64::INFINITY)
            .total_cmp(&b.radius.unwrap_or(f64::INFINITY))
            .then(a.theorem_id.cmp(&b.theorem_id))
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::{find_zeros, DEFAULT_TOL};
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_4, PI};

    const ONE: Quaternion = Quaternion::ONE;
    const I: Quaternion = Quaternion::I;
    const J: Quaternion = Quaternion::J;

    fn re(x: f64) -> Quaternion {
        Quaternion::real(x)
    }

    fn poly(terms: &[(u32, Quaternion)]) -> SparseQPolynomial {
        SparseQPolynomial::new(terms.iter().copied()).unwrap()
    }

    fn max_zero(p: &SparseQPolynomial) -> f64 {
        let zs = find_zeros(p, DEFAULT_TOL).unwrap();
        assert!(zs.is_complete(), "{:?}", zs.unresolved);
        zs.max_modulus()
    }

    #[test]
    fn chord_examples() {
        assert_eq!(chord_bound(ONE, ONE, 0.0).unwrap(), 0.0);
        assert_eq!(chord_bound(ONE, re(2.0), 0.0).unwrap(), 1.0);
        let v = chord_bound(ONE, I, FRAC_PI_4).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
        assert!((v - (I - ONE).norm()).abs() < 1e-12);
        assert!(chord_bound(re(2.0), ONE, 0.5).is_err());
        assert!(chord_bound(ONE, I, 0.5).is_err());
        assert!(chord_bound(ONE, I, 2.0).is_err());
    }

    #[test]
    fn ek_examples() {
        let r = bound_ek(&SparseQPolynomial::from_real(&[1.0, 1.0, 1.0]).unwrap());
        assert!(r.hypothesis.satisfied);
        assert_eq!(r.radius, Some(1.0));
        let r = bound_ek(&SparseQPolynomial::from_real(&[2.0, 1.0]).unwrap());
        assert!(!r.hypothesis.satisfied && r.radius.is_none());
        assert_eq!(r.hypothesis.violations[0].index, Some(1));
        let r = bound_ek(&poly(&[(0, ONE), (1, I)]));
        assert!(!r.hypothesis.satisfied);
        let r = bound_ek(&poly(&[(0, ONE), (2, re(2.0))]));
        assert_eq!(r.hypothesis.violations[0].condition, "dense support");
    }

    #[test]
    fn q2_examples() {
        let p = SparseQPolynomial::from_real(&[0.5, 1.0, 2.0, 2.0]).unwrap();
        let r = bound_q2(&p, &AngleFrame::new(ONE, 0.0).unwrap());
        assert_eq!(r.radius, Some(1.0));
        let p = poly(&[(0, ONE), (1, re(2.0))]);
        let r = bound_q2(&p, &AngleFrame::new(ONE, 0.0).unwrap());
        assert_eq!(r.radius, Some(1.0));
        assert!(max_zero(&p) <= 1.0);
        // |a_ν| = 1 everywhere, θ = π/2: 0 + 1 + 2·n.
        let p = SparseQPolynomial::from_dense(&[ONE, I, J, -I]).unwrap();
        let r = bound_q2(&p, &AngleFrame::new(ONE, FRAC_PI_2).unwrap());
        assert!(r.hypothesis.satisfied, "{}", r.hypothesis.summary());
        assert!((r.radius.unwrap() - 7.0).abs() < 1e-12);
        let r = bound_q2(&p, &AngleFrame::new(ONE, 0.3).unwrap());
        assert!(!r.hypothesis.satisfied);
    }

    #[test]
    fn q3_examples() {
        let p = poly(&[(0, I), (1, ONE)]);
        let r = bound_q3(&p);
        assert_eq!(r.radius, Some(5.0));
        assert!((max_zero(&p) - 1.0).abs() < 1e-12);
        let r = bound_q3(&SparseQPolynomial::from_real(&[1.0, 1.0]).unwrap());
        assert_eq!(r.radius, Some(5.0));
        let r = bound_q3(&poly(&[(0, ONE), (1, I)]));
        assert!(!r.hypothesis.satisfied);
        assert_eq!(r.hypothesis.violations[0].condition, "alpha_n nonzero");
    }

    #[test]
    fn t1_examples() {
        let p = poly(&[(0, ONE), (2, re(2.0))]);
        let r = bound_t1(&p, Some(0.0), None);
        assert!(r.hypothesis.satisfied);
        assert_eq!(r.params["M"], 3.0);
        assert_eq!(r.radius, Some(3.0));
        assert!(r.erratum_applied);
        assert!((max_zero(&p) - 0.5f64.sqrt()).abs() < 1e-12);

        let small = p.scale_right(re(0.01)).unwrap();
        let rs = bound_t1(&small, Some(0.0), None);
        assert_eq!(rs.radius, r.radius);
        assert!(rs.params["literalRadius"] < 0.1);

        let p = poly(&[(0, ONE), (1, re(2.0))]);
        let r = bound_t1(&p, Some(0.0), None);
        assert_eq!(r.params["M"], 1.0);
        assert_eq!(r.radius, Some(1.0));
        assert!(max_zero(&p) <= 1.0);
    }

    #[test]
    fn t1_violations_are_named() {
        let p = poly(&[(0, ONE), (1, re(2.0)), (3, re(2.0))]);
        let r = bound_t1(&p, Some(0.0), None);
        assert!(!r.hypothesis.satisfied);
        let v = &r.hypothesis.violations[0];
        assert_eq!(v.condition, "adjacent coefficients distinct");
        assert_eq!(v.index, Some(2));
        let p = poly(&[(0, ONE), (2, I.scale(2.0))]);
        let r = bound_t1(&p, Some(0.3), None);
        assert_eq!(r.hypothesis.violations[0].condition, "adjacent angle");
        let r = bound_t1(&p, None, Some(0.7));
        assert!(r.hypothesis.satisfied);
        assert!((r.params["alpha"] - PI / 4.0).abs() < 1e-15);
        assert_eq!(r.params["beta"], 0.7);
    }

    #[test]
    fn t2_examples() {
        let p = poly(&[(0, ONE + I), (1, re(2.0))]);
        let r = bound_t2(&p, PeakIndex::Auto);
        assert!(r.hypothesis.satisfied, "{}", r.hypothesis.summary());
        assert_eq!(r.radius, Some(2.0));
        assert!((max_zero(&p) - 0.5f64.sqrt()).abs() < 1e-12);

        // γ decreasing then increasing has no valid peak.
        let p = poly(&[(0, J.scale(2.0)), (1, ONE + J), (2, re(2.0) + J.scale(3.0))]);
        let r = bound_t2(&p, PeakIndex::Auto);
        assert!(!r.hypothesis.satisfied);
        assert_eq!(r.hypothesis.violations[0].condition, "gamma unimodal");
        let r = bound_t2(&p, PeakIndex::Index(7));
        assert!(!r.hypothesis.satisfied);
    }

    #[test]
    fn t2_peak_tie_breaks_to_first() {
        let p = poly(&[(0, ONE), (1, re(2.0) + J), (3, re(3.0) + J), (4, re(4.0))]);
        let r = bound_t2(&p, PeakIndex::Auto);
        assert!(r.hypothesis.satisfied);
        assert_eq!(r.params["r"], 1.0);
        let r2 = bound_t2(&p, PeakIndex::Index(2));
        assert_eq!(r.radius, r2.radius);
    }

    #[test]
    fn corollary_examples() {
        let p = poly(&[(0, ONE + I), (1, re(2.0))]);
        assert_eq!(bound_co1(&p).radius, Some(2.0));
        let p = poly(&[(0, ONE), (1, re(2.0))]);
        assert_eq!(bound_co1(&p).radius, Some(1.0));
        assert!(!bound_co1(&poly(&[(0, ONE + J), (1, re(2.0))])).hypothesis.satisfied);

        let p = poly(&[(0, ONE - I), (1, re(2.0))]);
        assert_eq!(bound_co2(&p).radius, Some(2.0));
        let p = poly(&[(0, I), (1, ONE + I)]);
        let r = bound_co2(&p).radius.unwrap();
        assert!((r - 4.0 / 2f64.sqrt()).abs() < 1e-12);

        let p = poly(&[(0, ONE), (1, re(2.0))]);
        assert_eq!(bound_cor3(&p).radius, Some(1.0));
        let p = poly(&[(0, ONE), (2, re(2.0))]);
        assert_eq!(bound_cor3(&p).radius, Some(3.0));
        let p = SparseQPolynomial::from_real(&[1.0, 1.0, 2.0]).unwrap();
        let r = bound_cor3(&p);
        assert!(!r.hypothesis.satisfied);
        assert_eq!(r.hypothesis.violations[0].index, Some(1));
    }

    #[test]
    fn reduction_chains_are_exact() {
        let p = poly(&[(0, re(-0.5)), (2, re(0.25)), (3, re(1.5)), (6, re(2.75))]);
        let cor3 = bound_cor3(&p).radius.unwrap();
        assert_eq!(bound_t2(&p, PeakIndex::Auto).radius.unwrap(), cor3);
        assert_eq!(bound_co2(&p).radius.unwrap(), cor3);
        assert_eq!(bound_co1(&p).radius.unwrap(), cor3);
        let dense = SparseQPolynomial::from_real(&[0.2, 0.3, 0.3, 0.9]).unwrap();
        assert_eq!(bound_q2(&dense, &AngleFrame::new(ONE, 0.0).unwrap()).radius, Some(1.0));
    }

    #[test]
    fn cauchy_examples() {
        assert_eq!(cauchy_bound(&SparseQPolynomial::from_real(&[1.0, 1.0]).unwrap()).unwrap(), 2.0);
        assert_eq!(cauchy_bound(&poly(&[(0, ONE), (1, re(2.0))])).unwrap(), 1.5);
        assert!(cauchy_bound(&poly(&[(0, ONE)])).is_err());
    }

    #[test]
    fn auto_select_examples() {
        let reports = auto_select(&SparseQPolynomial::from_real(&[1.0, 2.0, 3.0]).unwrap(), &BoundParams::default());
        assert!(reports.iter().any(|r| r.theorem_id == TheoremId::Ek && r.radius == Some(1.0)));
        assert!(reports.windows(2).all(|w| w[0].radius <= w[1].radius));

        // Decreasing moduli, wide angles and mixed components defeat every validator.
        let p = poly(&[(0, re(3.0) + J), (2, -I), (3, Quaternion::new(0.0, 0.2, -0.1, 0.3))]);
        let reports = auto_select(&p, &BoundParams::default());
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].theorem_id, TheoremId::Cauchy);

        let p = poly(&[(0, ONE), (3, re(2.0)), (5, re(4.0))]);
        let reports = auto_select(&p, &BoundParams::default());
        assert!(reports.iter().any(|r| r.theorem_id == TheoremId::T1));
    }

    #[test]
    fn validators_are_decisive() {
        let polys = [
            poly(&[(0, ONE), (1, re(2.0))]),
            poly(&[(0, I), (2, ONE)]),
            SparseQPolynomial::from_real(&[3.0, 1.0, 2.0]).unwrap(),
            poly(&[(1, ONE), (4, J)]),
        ];
        for p in &polys {
            for t in TheoremId::VALIDATED {
                let r = compute(t, p, &BoundParams::default()).unwrap();
                assert_eq!(r.hypothesis.satisfied, r.hypothesis.violations.is_empty());
                assert_eq!(r.hypothesis.satisfied, r.radius.is_some());
            }
        }
    }

    proptest! {
        #[test]
        fn chord_bound_dominates(
            a in prop::array::uniform4(-3.0f64..3.0),
            b in prop::array::uniform4(-3.0f64..3.0),
            extra in 0.0f64..1.0,
        ) {
            let (mut q1, mut q2) = (Quaternion::from(a), Quaternion::from(b));
            prop_assume!(q1.norm() > 1e-6 && q2.norm() > 1e-6);
            if q1.norm() > q2.norm() {
                std::mem::swap(&mut q1, &mut q2);
            }
            let half = angle_between(q1, q2).unwrap() / 2.0;
            let theta = half + extra * (FRAC_PI_2 - half);
            let rhs = chord_bound(q1, q2, theta).unwrap();
            prop_assert!((q2 - q1).norm() <= rhs * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn corrected_t1_radius_is_scale_invariant(
            lambda in 1e-4f64..1e4,
            seed_moduli in prop::collection::vec(0.1f64..2.0, 2..6),
        ) {
            let mut moduli = seed_moduli;
            moduli.sort_by(f64::total_cmp);
            moduli.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
            prop_assume!(moduli.len() >= 2);
            let b = Quaternion::new(0.3, 0.4, -0.5, 0.2);
            let terms: Vec<(u32, Quaternion)> = moduli
                .iter()
                .enumerate()
                .map(|(i, m)| ((2 * i) as u32, b.scale(*m) * Quaternion::new(1.0, 0.05 * i as f64, 0.0, 0.0)))
                .collect();
            let p = SparseQPolynomial::new(terms).unwrap();
            let r = bound_t1(&p, Some(0.2), None);
            prop_assume!(r.hypothesis.satisfied);
            let s = bound_t1(&p.scale_right(re(lambda)).unwrap(), Some(0.2), None);
            let (r, s) = (r.radius.unwrap(), s.radius.unwrap());
            prop_assert!((r - s).abs() <= 1e-12 * r);
        }
    }
}
