//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::f64::consts::{FRAC_PI_4, SQRT_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use quatek::bounds::{bound_ek, bound_t1, chord_bound, TheoremId};
use quatek::harness::{self, EnsembleConfig, EnsembleKind, Summary, SweepTarget, VerifyRow};
use quatek::mconst::{m_closed_form, m_overall, m_sampled, maximize_on_unit_sphere, MStrategy};
use quatek::quat::angle_between;
use quatek::roots::{find_zeros, Zero, ZeroSet, DEFAULT_TOL};
use quatek::{Quaternion, SparseQPolynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Outcome = Result<String, String>;

fn gaussian_quaternion(rng: &mut ChaCha8Rng) -> Quaternion {
    Quaternion::new(
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
        rng.sample(StandardNormal),
    )
}

/// Naive evaluation `Σ q^{n_ν} a_ν` by repeated multiplication.
fn eval_naive(p: &SparseQPolynomial, q: Quaternion) -> Quaternion {
    let mut acc = Quaternion::ZERO;
    for t in p.terms() {
        let mut power = Quaternion::ONE;
        for _ in 0..t.exp {
            power = power * q;
        }
        acc += power * t.coeff;
    }
    acc
}

fn random_polynomial(rng: &mut ChaCha8Rng, max_degree: u32) -> SparseQPolynomial {
    let n = rng.random_range(1..=max_degree);
    let mut terms = Vec::new();
    for e in 0..n {
        if rng.random_bool(0.6) {
            terms.push((e, gaussian_quaternion(rng)));
        }
    }
    terms.push((n, gaussian_quaternion(rng)));
    SparseQPolynomial::new(terms).expect("gaussian coefficients are nonzero")
}

fn sweep_failures(rows: &[VerifyRow], summary: &Summary) -> Option<String> {
    (summary.failures > 0).then(|| {
        let first = rows.iter().find(|r| !r.ok).expect("a failed row");
        format!(
            "{} failures; first: instance {} ({:?})",
            summary.failures, first.instance_id, first.diagnostic
        )
    })
}

fn within_budget(elapsed: Duration, limit: Duration) -> Result<(), String> {
    if elapsed < limit {
        Ok(())
    } else {
        Err(format!("took {elapsed:.2?}, budget {limit:.0?}"))
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let cfg = EnsembleConfig::new(EnsembleKind::MonotoneReal, 10, 3, 500, 2024);
    let instances = harness::generate(&cfg).map_err(|e| e.to_string())?;
    if instances.iter().any(|p| !(2..=10).contains(&p.degree())) {
        return Err("degree outside 2..=10".into());
    }
    let (rows, summary) = harness::sweep_instances(
        &instances,
        SweepTarget::Bound(TheoremId::Ek),
        &Default::default(),
        DEFAULT_TOL,
    );
    let elapsed = start.elapsed();
    if let Some(msg) = sweep_failures(&rows, &summary) {
        return Err(msg);
    }
    let worst = rows.iter().map(|r| r.max_zero_modulus).fold(0.0, f64::max);
    if worst > 1.0 + 1e-7 {
        return Err(format!("zero of modulus {worst}"));
    }
    within_budget(elapsed, Duration::from_secs(10))?;
    Ok(format!("500 instances, max |zero| = {worst:.12}, {elapsed:.2?}"))
}

fn lacunary(kind: EnsembleKind, count: usize, seed: u64) -> EnsembleConfig {
    let mut cfg = EnsembleConfig::new(kind, 25, 6, count, seed);
    cfg.max_gap = 4;
    cfg
}

fn criterion_2() -> Outcome {
    let mut total = 0;
    let mut max_tight = 0.0f64;
    for (i, alpha) in [0.0, 0.3, FRAC_PI_4].into_iter().enumerate() {
        let cfg = lacunary(EnsembleKind::MonotoneModulusAngle { alpha }, 100, 300 + i as u64);
        let (rows, summary) =
            harness::sweep(&cfg, SweepTarget::Bound(TheoremId::T1), DEFAULT_TOL).map_err(|e| e.to_string())?;
        if let Some(msg) = sweep_failures(&rows, &summary) {
            return Err(format!("alpha = {alpha}: {msg}"));
        }
        total += rows.len();
        max_tight = max_tight.max(summary.max_tight);
    }
    let mut literal_failures = 0;
    for (i, alpha) in [0.0, 0.3, FRAC_PI_4].into_iter().enumerate() {
        let mut cfg = lacunary(EnsembleKind::MonotoneModulusAngle { alpha }, 100, 300 + i as u64);
        cfg.scale = 1e-3;
        let (_, summary) = harness::sweep(&cfg, SweepTarget::T1Literal, DEFAULT_TOL).map_err(|e| e.to_string())?;
        literal_failures += summary.failures;
    }
    if literal_failures == 0 {
        return Err("literal radius produced no containment failure".into());
    }
    Ok(format!(
        "{total} instances within corrected radius (max tight {max_tight:.4}); literal radius at scale 1e-3 fails {literal_failures}/300"
    ))
}

fn criterion_3() -> Outcome {
    let pairs = [
        (EnsembleKind::ComponentMonotone, TheoremId::T2),
        (EnsembleKind::ComplexCo1, TheoremId::Co1),
        (EnsembleKind::ComplexCo2, TheoremId::Co2),
        (EnsembleKind::RealLacunary, TheoremId::Cor3),
    ];
    let mut notes = Vec::new();
    for (i, (kind, theorem)) in pairs.into_iter().enumerate() {
        let cfg = lacunary(kind, 200, 400 + i as u64);
        let (rows, summary) =
            harness::sweep(&cfg, SweepTarget::Bound(theorem), DEFAULT_TOL).map_err(|e| e.to_string())?;
        if let Some(msg) = sweep_failures(&rows, &summary) {
            return Err(format!("{theorem}: {msg}"));
        }
        notes.push(format!("{theorem} max tight {:.4}", summary.max_tight));
    }
    Ok(format!("200 instances each, zero failures ({})", notes.join(", ")))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_rel = 0.0f64;
    for i in 0..200 {
        let d = [0u32, 1, 2, 5][i % 4];
        let a_prev = gaussian_quaternion(&mut rng);
        let a_j = gaussian_quaternion(&mut rng);
        let n_prev = rng.random_range(0..4u32);
        let n_j = n_prev + d + 1;
        let closed = m_closed_form(a_j, a_prev, d).map_err(|e| e.to_string())?;
        let sampled = m_sampled(a_j, a_prev, n_j, n_prev, 10_000, i as u64).map_err(|e| e.to_string())?;
        if closed < 1.0 || sampled < 1.0 {
            return Err(format!("pair {i}: M below 1 (closed {closed}, sampled {sampled})"));
        }
        let rel = (closed - sampled).abs() / closed;
        if rel > 1e-3 {
            return Err(format!("pair {i} (d = {d}): closed {closed} vs sampled {sampled}"));
        }
        if closed < sampled * (1.0 - 1e-12) {
            return Err(format!("pair {i}: closed {closed} below sampled {sampled}"));
        }
        worst_rel = worst_rel.max(rel);
    }
    let elapsed = start.elapsed();
    within_budget(elapsed, Duration::from_secs(5))?;
    Ok(format!("200 pairs, worst relative gap {worst_rel:.2e}, {elapsed:.2?}"))
}

fn same_zero(a: &Zero, b: &Zero, tol: f64) -> bool {
    match (a, b) {
        (Zero::Point { q: p, .. }, Zero::Point { q, .. }) => p.distance(*q) <= tol,
        (Zero::Sphere { x: x1, y: y1, .. }, Zero::Sphere { x: x2, y: y2, .. }) => {
            (x1 - x2).hypot(y1 - y2) <= tol
        }
        _ => false,
    }
}

fn covered(of: &[Zero], by: &[Zero], tol: f64) -> bool {
    of.iter().all(|z| by.iter().any(|w| same_zero(z, w, tol)))
}

fn certify(p: &SparseQPolynomial, zs: &ZeroSet) -> Result<f64, String> {
    if !zs.is_complete() {
        return Err(format!("unresolved roots {:?}", zs.unresolved));
    }
    let weight: usize = zs.zeros.iter().map(Zero::degree_weight).sum();
    if weight != p.degree() as usize || zs.total_multiplicity != p.degree() as usize {
        return Err(format!("multiplicities sum to {weight}, degree {}", p.degree()));
    }
    let scale = p.coeff_norm_sum();
    let mut worst = 0.0f64;
    for q in zs.points() {
        let r = eval_naive(p, q).norm() / (scale * q.norm().max(1.0).powi(p.degree() as i32));
        worst = worst.max(r);
    }
    if worst > 1e-8 {
        return Err(format!("point residual {worst:.3e}"));
    }
    Ok(worst)
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for i in 0..300 {
        let p = random_polynomial(&mut rng, 8);
        let zs = find_zeros(&p, DEFAULT_TOL).map_err(|e| format!("instance {i}: {e}"))?;
        worst = worst.max(certify(&p, &zs).map_err(|e| format!("instance {i}: {e}"))?);
    }
    let one = Zero::Point { q: Quaternion::ONE, multiplicity: 1, residual: 0.0 };
    for i in 0..100 {
        let p = random_polynomial(&mut rng, 8);
        let xi = p.xi();
        let zp = find_zeros(&p, DEFAULT_TOL).map_err(|e| format!("xi instance {i}: {e}"))?;
        let zx = find_zeros(&xi, DEFAULT_TOL).map_err(|e| format!("xi instance {i}: {e}"))?;
        certify(&xi, &zx).map_err(|e| format!("xi instance {i}: {e}"))?;
        let mut expected = zp.zeros.clone();
        expected.push(one.clone());
        if !covered(&expected, &zx.zeros, 1e-7) || !covered(&zx.zeros, &expected, 1e-7) {
            return Err(format!("xi instance {i}: zero sets differ"));
        }
    }
    Ok(format!("300 certified (worst residual {worst:.2e}); 100 xi-sets match"))
}

/// `max_{|q| = R} |p(q)|` by the sampled maximizer.
fn sphere_max(p: &SparseQPolynomial, radius: f64, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    maximize_on_unit_sphere(|u| p.evaluate(u * radius).norm(), 10_000, &mut rng).1
}

fn criterion_6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let p = random_polynomial(&mut rng, 8);
        let n = p.degree() as i32;
        let unit = sphere_max(&p, 1.0, 1000 + i);
        for r in [1.5, 2.0, 4.0] {
            let outer = sphere_max(&p, r, 2000 + i);
            let ratio = outer / (r.powi(n) * unit);
            if ratio > 1.0 + 1e-6 {
                return Err(format!("instance {i}, R = {r}: ratio {ratio}"));
            }
            worst = worst.max(ratio);
        }
    }
    let lambda = Quaternion::new(0.3, -1.2, 0.5, 2.0);
    for n in [1u32, 3, 6] {
        let p = SparseQPolynomial::monomial(n, lambda).map_err(|e| e.to_string())?;
        let unit = sphere_max(&p, 1.0, 7);
        for r in [1.5, 2.0, 4.0] {
            let rel = (sphere_max(&p, r, 8) - r.powi(n as i32) * unit).abs() / (r.powi(n as i32) * unit);
            if rel > 1e-10 {
                return Err(format!("q^{n}·lambda at R = {r}: relative gap {rel:.2e}"));
            }
        }
    }
    Ok(format!("150 checks, worst ratio {worst:.9}; monomial equality within 1e-10"))
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tightest = f64::INFINITY;
    for i in 0..10_000 {
        let (mut q1, mut q2) = (gaussian_quaternion(&mut rng), gaussian_quaternion(&mut rng));
        if q1.norm() > q2.norm() {
            std::mem::swap(&mut q1, &mut q2);
        }
        let half = angle_between(q1, q2).map_err(|e| e.to_string())? / 2.0;
        let theta = half + rng.random::<f64>() * (std::f64::consts::FRAC_PI_2 - half);
        let rhs = chord_bound(q1, q2, theta).map_err(|e| format!("pair {i}: {e}"))?;
        let lhs = (q2 - q1).norm();
        if lhs > rhs * (1.0 + 1e-12) {
            return Err(format!("pair {i}: |q2 - q1| = {lhs} > {rhs}"));
        }
        tightest = tightest.min(rhs - lhs);
    }
    let collinear = chord_bound(Quaternion::ONE, Quaternion::real(2.0), 0.0).map_err(|e| e.to_string())?;
    let orthogonal = chord_bound(Quaternion::ONE, Quaternion::I, FRAC_PI_4).map_err(|e| e.to_string())?;
    if (collinear - 1.0).abs() > 1e-12 || (orthogonal - SQRT_2).abs() > 1e-12 {
        return Err(format!("equality witnesses gave {collinear} and {orthogonal}"));
    }
    Ok(format!("10000 pairs dominated (smallest margin {tightest:.2e}); both equality witnesses exact"))
}

fn criterion_8() -> Outcome {
    let p = SparseQPolynomial::from_real(&[1.0, 1.0, 1.0]).map_err(|e| e.to_string())?;
    let zs = find_zeros(&p, DEFAULT_TOL).map_err(|e| e.to_string())?;
    match zs.zeros.as_slice() {
        [Zero::Sphere { x, y, multiplicity: 1, .. }]
            if (x + 0.5).abs() <= 1e-9 && (y - 3f64.sqrt() / 2.0).abs() <= 1e-9 => {}
        other => return Err(format!("1+q+q^2 zeros: {other:?}")),
    }
    if (zs.max_modulus() - 1.0).abs() > 1e-9 {
        return Err(format!("max modulus {}", zs.max_modulus()));
    }
    let ek = harness::verify(&p, &bound_ek(&p), DEFAULT_TOL).map_err(|e| e.to_string())?;
    if ek.radius != 1.0 || (ek.tight - 1.0).abs() > 1e-9 || !ek.ok {
        return Err(format!("ek row {ek:?}"));
    }

    let p = SparseQPolynomial::new([(0, Quaternion::ONE), (2, Quaternion::real(2.0))]).map_err(|e| e.to_string())?;
    let m = m_overall(&p, MStrategy::ClosedForm).map_err(|e| e.to_string())?.overall;
    if m != 3.0 {
        return Err(format!("M = {m}"));
    }
    let report = bound_t1(&p, Some(0.0), None);
    let row = harness::verify(&p, &report, DEFAULT_TOL).map_err(|e| e.to_string())?;
    let expected_tight = (0.5f64).sqrt() / 3.0;
    if report.radius != Some(3.0) || (row.tight - expected_tight).abs() > 1e-6 || !row.ok {
        return Err(format!("t1 row {row:?}"));
    }
    Ok(format!("1+q+q^2 sphere (-1/2, sqrt3/2), tight {:.12}; 1+2q^2 M = 3, tight {:.7}", ek.tight, row.tight))
}

fn criterion_9() -> Outcome {
    let configs = [
        EnsembleConfig::new(EnsembleKind::MonotoneReal, 10, 3, 60, 9),
        lacunary(EnsembleKind::MonotoneModulusAngle { alpha: 0.3 }, 60, 9),
        lacunary(EnsembleKind::ComponentMonotone, 60, 9),
    ];
    for cfg in configs {
        let target = SweepTarget::Bound(cfg.kind.theorem());
        let csv = || -> Result<Vec<u8>, String> {
            let (rows, _) = harness::sweep(&cfg, target, DEFAULT_TOL).map_err(|e| e.to_string())?;
            let mut out = Vec::new();
            harness::write_csv(&rows, &mut out).map_err(|e| e.to_string())?;
            Ok(out)
        };
        if csv()? != csv()? {
            return Err(format!("{:?} sweep differs between runs", cfg.kind));
        }
    }
    Ok("three repeated sweeps byte-identical".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("Enestrom-Kakeya containment", criterion_1),
        ("corrected t1 containment and literal-radius failure", criterion_2),
        ("t2 / co1 / co2 / cor3 containment", criterion_3),
        ("M closed form vs sampled maximum", criterion_4),
        ("root finder certification and xi zero sets", criterion_5),
        ("growth of the sphere maximum", criterion_6),
        ("chord inequality dominance", criterion_7),
        ("exact spot values", criterion_8),
        ("sweep determinism", criterion_9),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {}: PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
