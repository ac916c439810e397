//! The extremal constants
//!
//! ```text
//! M_{n_j} = max_{|q|=1} |q^{n_j} a_{n_j} − q^{n_{j−1}+1} a_{n_{j−1}}| / |a_{n_j} − a_{n_{j−1}}|
//! ```
//!
//! and `M = max_j M_{n_j}`.
//!
//! Closed form: on `|q| = 1` the factor `q^{n_{j−1}+1}` can be pulled out of
//! the numerator, leaving `|q^d a_j − a_prev|` with `d = n_j − n_{j−1} − 1`.
//! For `d ≥ 1` the map `q ↦ q^d` is onto the unit sphere, and
//! `max_{|w|=1} |w·a − b| = |a| + |b|` (attained at `w = −b a⁻¹ |a|/|b|`), so
//! `M_{n_j} = (|a_j| + |a_prev|) / |a_j − a_prev|`. For `d = 0` the numerator
//! is `q^{n_j}(a_j − a_prev)` and `M_{n_j} = 1`.
//!
//! The closed form is a derivation rather than a given, so [`m_sampled`]
//! maximizes the quotient directly as an independent check.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::SparseQPolynomial;
use crate::quat::{sample_unit, Quaternion};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MMethod {
    ClosedForm,
    Sampled,
}

/// How [`m_overall`] evaluates each gap constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MStrategy {
    ClosedForm,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapConstant {
    pub j: usize,
    /// `n_j − n_{j−1} − 1`.
    pub gap: u32,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct MReport {
    pub per_gap: Vec<GapConstant>,
    pub overall: f64,
    pub method: MMethod,
}

fn distinct_denominator(a_j: Quaternion, a_prev: Quaternion) -> Result<f64> {
    let den = (a_j - a_prev).norm();
    if den == 0.0 {
        return Err(Error::Hypothesis("adjacent coefficients are equal".into()));
    }
    Ok(den)
}

/// Closed-form `M_{n_j}` for the pair `(a_j, a_prev)` separated by `d`
/// missing exponents.
pub fn m_closed_form(a_j: Quaternion, a_prev: Quaternion, d: u32) -> Result<f64> {
    let den = distinct_denominator(a_j, a_prev)?;
    if d == 0 {
        return Ok(1.0);
    }
    // The quotient equals 1 at q = 1, so the maximum is never below it.
    Ok(((a_j.norm() + a_prev.norm()) / den).max(1.0))
}

/// The quotient of `M_{n_j}` evaluated at one point of the unit sphere.
fn quotient(q: Quaternion, a_j: Quaternion, a_prev: Quaternion, n_j: u32, n_prev: u32, den: f64) -> f64 {
    (q.pow(n_j) * a_j - q.pow(n_prev + 1) * a_prev).norm() / den
}

/// Direct maximization of the `M_{n_j}` quotient over the unit sphere:
/// `samples` uniform points plus `q = 1`, followed by local refinement of the
/// best candidates. The result is a value of the quotient, hence a lower
/// bound on the true maximum.
pub fn m_sampled(
    a_j: Quaternion,
    a_prev: Quaternion,
    n_j: u32,
    n_prev: u32,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let den = distinct_denominator(a_j, a_prev)?;
    if n_j <= n_prev {
        return Err(Error::domain("exponents must satisfy n_j > n_prev"));
    }
    if samples < 1000 {
        return Err(Error::domain("at least 1000 samples are required"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = |q: Quaternion| quotient(q, a_j, a_prev, n_j, n_prev, den);
    Ok(maximize_on_unit_sphere(f, samples, &mut rng).1)
}

/// Number of best samples handed to local refinement.
const REFINE_STARTS: usize = 4;
const GOLDEN_ITERS: usize = 40;
const MAX_ROUNDS: usize = 200;

/// Maximizes `f` over the unit 3-sphere by uniform sampling (plus the anchor
/// `q = 1`) and local refinement of the best few samples.
///
/// Refinement alternates a golden-section search on the slice angle `t` of
/// `q = cos t + u sin t` with `u` fixed, and golden-section searches along the
/// three great circles through `q` in the tangent directions `q·i`, `q·j`,
/// `q·k`. The step shrinks whenever a round brings no improvement.
pub fn maximize_on_unit_sphere<F, R>(f: F, samples: usize, rng: &mut R) -> (Quaternion, f64)
where
    F: Fn(Quaternion) -> f64,
    R: rand::Rng + ?Sized,
{
    let mut best: Vec<(Quaternion, f64)> = Vec::with_capacity(REFINE_STARTS + 1);
    let offer = |q: Quaternion, v: f64, best: &mut Vec<(Quaternion, f64)>| {
        if best.len() < REFINE_STARTS {
            best.push((q, v));
        } else if let Some(worst) = best
            .iter_mut()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .filter(|w| w.1 < v)
        {
            *worst = (q, v);
        }
    };
    offer(Quaternion::ONE, f(Quaternion::ONE), &mut best);
    for _ in 0..samples {
        let q = sample_unit(rng);
        let v = f(q);
        offer(q, v, &mut best);
    }

    let mut overall = best
        .iter()
        .copied()
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("at least the anchor");
    for (q, v) in best {
        let refined = refine(&f, q, v);
        if refined.1 > overall.1 {
            overall = refined;
        }
    }
    overall
}

fn refine<F: Fn(Quaternion) -> f64>(f: &F, mut q: Quaternion, mut v: f64) -> (Quaternion, f64) {
    let mut step = 0.25;
    for _ in 0..MAX_ROUNDS {
        let before = v;

        // Slice angle with the imaginary direction held fixed.
        let im = q.im();
        if im.norm() > 1e-12 {
            let u = im.scale(1.0 / im.norm());
            let t0 = im.norm().atan2(q.re());
            let along = |t: f64| Quaternion::real(t.cos()) + u.scale(t.sin());
            let (t, val) = golden_max(|t| f(along(t)), t0 - step, t0 + step);
            if val > v {
                q = along(t);
                v = val;
            }
        }

        // Great circles through q towards q·i, q·j, q·k.
        for e in [Quaternion::I, Quaternion::J, Quaternion::K] {
            let tangent = q * e;
            let along = |s: f64| q.scale(s.cos()) + tangent.scale(s.sin());
            let (s, val) = golden_max(|s| f(along(s)), -step, step);
            if val > v {
                let moved = along(s);
                q = moved.scale(1.0 / moved.norm());
                v = val;
            }
        }

        if v <= before * (1.0 + 1e-15) {
            step *= 0.5;
            if step < 1e-9 {
                break;
            }
        }
    }
    (q, v)
}

/// Golden-section search for a maximum of `g` on `[lo, hi]`.
fn golden_max<G: Fn(f64) -> f64>(g: G, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut g1 = g(x1);
    let mut g2 = g(x2);
    for _ in 0..GOLDEN_ITERS {
        if g1 < g2 {
            lo = x1;
            x1 = x2;
            g1 = g2;
            x2 = lo + ratio * (hi - lo);
            g2 = g(x2);
        } else {
            hi = x2;
            x2 = x1;
            g2 = g1;
            x1 = hi - ratio * (hi - lo);
            g1 = g(x1);
        }
    }
    if g1 >= g2 {
        (x1, g1)
    } else {
        (x2, g2)
    }
}

/// Per-gap constants `M_{n_j}` and their maximum `M`.
pub fn m_overall(p: &SparseQPolynomial, strategy: MStrategy) -> Result<MReport> {
    let terms = p.terms();
    if terms.len() < 2 {
        return Err(Error::domain("M is defined for polynomials with at least two terms"));
    }
    let mut per_gap = Vec::with_capacity(terms.len() - 1);
    for (j, w) in terms.windows(2).enumerate() {
        let (prev, cur) = (w[0], w[1]);
        let j = j + 1;
        if cur.coeff == prev.coeff {
            return Err(Error::Hypothesis(format!(
                "adjacent coefficients at j = {j} are equal"
            )));
        }
        let gap = cur.exp - prev.exp - 1;
        let value = match strategy {
            MStrategy::ClosedForm => m_closed_form(cur.coeff, prev.coeff, gap)?,
            MStrategy::Sampled { samples, seed } => m_sampled(
                cur.coeff,
                prev.coeff,
                cur.exp,
                prev.exp,
                samples,
                seed.wrapping_add(j as u64),
            )?,
        };
        per_gap.push(GapConstant { j, gap, value });
    }
    let overall = per_gap.iter().map(|g| g.value).fold(f64::NEG_INFINITY, f64::max);
    let method = match strategy {
        MStrategy::ClosedForm => MMethod::ClosedForm,
        MStrategy::Sampled { .. } => MMethod::Sampled,
    };
    Ok(MReport { per_gap, overall, method })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    const ONE: Quaternion = Quaternion::ONE;
    const I: Quaternion = Quaternion::I;

    fn re(x: f64) -> Quaternion {
        Quaternion::real(x)
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    #[test]
    fn closed_form_examples() {
        assert_eq!(m_closed_form(re(3.0), Quaternion::new(0.1, 2.0, -1.0, 0.5), 0).unwrap(), 1.0);
        assert_eq!(m_closed_form(re(2.0), ONE, 1).unwrap(), 3.0);
        assert!((m_closed_form(I, ONE, 2).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(matches!(m_closed_form(I, I, 3), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn sampled_examples() {
        // d = 1: a_j = 2, a_prev = 1 at n_j = 3, n_prev = 1.
        let v = m_sampled(re(2.0), ONE, 3, 1, 10_000, 1).unwrap();
        assert!(rel(v, 3.0) < 1e-3, "{v}");
        assert!(v <= 3.0 * (1.0 + 1e-12));
        // d = 2: a_j = i, a_prev = 1.
        let v = m_sampled(I, ONE, 4, 1, 10_000, 2).unwrap();
        assert!(rel(v, 2f64.sqrt()) < 1e-3, "{v}");
        // d = 0 collapses to 1, attained everywhere.
        let v = m_sampled(re(2.0), I, 2, 1, 1000, 3).unwrap();
        assert!((v - 1.0).abs() < 1e-12, "{v}");
        assert!(m_sampled(re(2.0), ONE, 3, 1, 10, 0).is_err());
        assert!(m_sampled(ONE, ONE, 3, 1, 1000, 0).is_err());
    }

    #[test]
    fn sampled_anchor_is_exactly_one() {
        let a = Quaternion::new(0.3, -1.2, 0.8, 2.2);
        let b = Quaternion::new(-0.7, 0.1, 0.4, -1.9);
        let den = (a - b).norm();
        assert_eq!(quotient(ONE, a, b, 7, 2, den), 1.0);
    }

    #[test]
    fn closed_form_agrees_with_oracle_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for case in 0..40 {
            let a = sample_unit(&mut rng).scale(rng.random_range(0.1..3.0));
            let b = sample_unit(&mut rng).scale(rng.random_range(0.1..3.0));
            let d = [0u32, 1, 2, 5][case % 4];
            let n_prev = rng.random_range(0..4u32);
            let closed = m_closed_form(a, b, d).unwrap();
            let sampled = m_sampled(a, b, n_prev + d + 1, n_prev, 10_000, case as u64).unwrap();
            assert!(sampled >= 1.0);
            assert!(closed >= sampled * (1.0 - 1e-12), "{closed} < {sampled}");
            assert!(rel(sampled, closed) < 1e-3, "case {case}: {sampled} vs {closed}");
        }
    }

    #[test]
    fn overall_examples() {
        let p = SparseQPolynomial::new([(0, ONE), (1, re(2.0))]).unwrap();
        assert_eq!(m_overall(&p, MStrategy::ClosedForm).unwrap().overall, 1.0);
        let p = SparseQPolynomial::new([(0, ONE), (2, re(2.0))]).unwrap();
        let r = m_overall(&p, MStrategy::ClosedForm).unwrap();
        assert_eq!(r.overall, 3.0);
        assert_eq!(r.per_gap, vec![GapConstant { j: 1, gap: 1, value: 3.0 }]);
        let p = SparseQPolynomial::new([(0, ONE), (1, re(2.0)), (4, re(4.0))]).unwrap();
        let r = m_overall(&p, MStrategy::ClosedForm).unwrap();
        assert_eq!(r.per_gap.iter().map(|g| g.value).collect::<Vec<_>>(), vec![1.0, 3.0]);
        assert_eq!(r.per_gap[1].gap, 2);
        assert_eq!(r.overall, 3.0);
        let sampled = m_overall(&p, MStrategy::Sampled { samples: 10_000, seed: 5 }).unwrap();
        assert_eq!(sampled.method, MMethod::Sampled);
        assert!(rel(sampled.overall, 3.0) < 1e-3);
    }

    #[test]
    fn overall_names_equal_pair() {
        let p = SparseQPolynomial::new([(0, ONE), (1, re(2.0)), (3, re(2.0))]).unwrap();
        match m_overall(&p, MStrategy::ClosedForm) {
            Err(Error::Hypothesis(msg)) => assert!(msg.contains("j = 2"), "{msg}"),
            other => panic!("{other:?}"),
        }
        let single = SparseQPolynomial::new([(3, ONE)]).unwrap();
        assert!(m_overall(&single, MStrategy::ClosedForm).is_err());
    }

    #[test]
    fn scale_invariance_is_exact() {
        let p = SparseQPolynomial::new([
            (0, Quaternion::new(0.5, 0.25, 0.0, -1.0)),
            (3, Quaternion::new(1.5, -0.5, 2.0, 0.75)),
            (4, Quaternion::new(-2.0, 1.0, 0.5, 3.0)),
        ])
        .unwrap();
        let scaled = p.scale_right(re(4.0)).unwrap();
        let a = m_overall(&p, MStrategy::ClosedForm).unwrap();
        let b = m_overall(&scaled, MStrategy::ClosedForm).unwrap();
        assert_eq!(a.per_gap, b.per_gap);
    }

    #[test]
    fn blows_up_as_coefficients_merge() {
        let target = Quaternion::new(1.0, 1.0, 0.0, 0.0);
        let direction = Quaternion::new(0.2, -0.1, 0.3, 0.4);
        let values: Vec<f64> = [1e-1, 1e-3, 1e-6]
            .iter()
            .map(|&t| m_closed_form(target, target + direction.scale(t), 2).unwrap())
            .collect();
        assert!(values[0] < values[1] && values[1] < values[2], "{values:?}");
        assert!(values[2] > 1e5);
    }
}
