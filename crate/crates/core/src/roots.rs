//! Complete zero finding for quaternionic polynomials.
//!
//! Every zero of `p` lies on a sphere `x + y𝕊` whose complex representative
//! `x + iy` is a root of the real normal polynomial `N(p) = p ⋆ pᶜ`. The
//! pipeline finds the complex roots of `N(p)`, then decides for each root pair
//! whether `p` vanishes on the whole sphere or at a single point of it.
//!
//! Writing `(x + iy)^{n_ν} = α_ν + iβ_ν` and `A = Σ α_ν a_ν`, `B = Σ β_ν a_ν`,
//! one has `p(x + Iy) = A + I·B` for every `I ∈ 𝕊`. Hence `p` vanishes on the
//! sphere iff `A = B = 0`, and otherwise at most at `I = −A B⁻¹`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::poly::{RealPolynomial, SparseQPolynomial};
use crate::quat::{Quaternion, UnitImaginary};

/// Default classification tolerance.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Relative radius under which complex roots of `N(p)` are merged.
const CLUSTER_RADIUS: f64 = 1e-6;
const ABERTH_MAX_ITER: usize = 2000;

/// Upper-half-plane representative `x + iy` (`y ≥ 0`) of a root of a real
/// polynomial. `y = 0` marks a real root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComplexRootPair {
    pub x: f64,
    pub y: f64,
    pub multiplicity: usize,
}

impl ComplexRootPair {
    pub fn modulus(&self) -> f64 {
        self.x.hypot(self.y)
    }

    fn degree_weight(&self) -> usize {
        if self.y > 0.0 {
            2 * self.multiplicity
        } else {
            self.multiplicity
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Zero {
    /// An isolated zero.
    Point { q: Quaternion, multiplicity: usize, residual: f64 },
    /// `p` vanishes on the whole sphere `x + y𝕊`. Each unit of multiplicity
    /// accounts for two degrees of `p`.
    Sphere { x: f64, y: f64, multiplicity: usize, residual: f64 },
}

impl Zero {
    /// Modulus shared by every point of the zero.
    pub fn modulus(&self) -> f64 {
        match self {
            Zero::Point { q, .. } => q.norm(),
            Zero::Sphere { x, y, .. } => x.hypot(*y),
        }
    }

    pub fn residual(&self) -> f64 {
        match self {
            Zero::Point { residual, .. } | Zero::Sphere { residual, .. } => *residual,
        }
    }

    /// Degrees of `p` consumed by this zero.
    pub fn degree_weight(&self) -> usize {
        match self {
            Zero::Point { multiplicity, .. } => *multiplicity,
            Zero::Sphere { multiplicity, .. } => 2 * multiplicity,
        }
    }
}

/// A root pair of `N(p)` that could not be matched to a zero of `p`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Unresolved {
    pub x: f64,
    pub y: f64,
    pub multiplicity: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSet {
    pub zeros: Vec<Zero>,
    pub tolerance_used: f64,
    pub total_multiplicity: usize,
    pub unresolved: Vec<Unresolved>,
}

impl ZeroSet {
    pub fn max_modulus(&self) -> f64 {
        self.zeros.iter().map(Zero::modulus).fold(0.0, f64::max)
    }

    pub fn worst_residual(&self) -> f64 {
        self.zeros.iter().map(Zero::residual).fold(0.0, f64::max)
    }

    pub fn is_complete(&self) -> bool {
        self.unresolved.is_empty()
    }

    /// Point zeros, spheres excluded.
    pub fn points(&self) -> impl Iterator<Item = Quaternion> + '_ {
        self.zeros.iter().filter_map(|z| match z {
            Zero::Point { q, .. } => Some(*q),
            Zero::Sphere { .. } => None,
        })
    }
}

/// Outcome of testing one root pair of `N(p)` against `p`.
#[derive(Debug, Clone, PartialEq)]
pub enum Classification {
    Sphere,
    Point(Quaternion),
    Spurious(String),
}

/// Relative residual `|p(q)| / (Σ|a_ν| · max(1, |q|)ⁿ)`.
pub fn residual(p: &SparseQPolynomial, q: Quaternion) -> f64 {
    let scale = p.coeff_norm_sum() * q.norm().max(1.0).powi(p.degree() as i32);
    p.evaluate(q).norm() / scale
}

/// Fixed directions of 𝕊 used to certify spherical zeros.
pub fn sphere_test_directions() -> [UnitImaginary; 8] {
    let v = |x: f64, y: f64, z: f64| {
        UnitImaginary::new(Quaternion::new(0.0, x, y, z)).expect("nonzero direction")
    };
    [
        v(1.0, 0.0, 0.0),
        v(0.0, 1.0, 0.0),
        v(0.0, 0.0, 1.0),
        v(-1.0, 0.0, 0.0),
        v(1.0, 1.0, 1.0),
        v(1.0, -2.0, 0.5),
        v(-0.3, 0.7, -1.1),
        v(0.0, -1.0, 1.0),
    ]
}

/// Worst relative residual of `p` over the test directions of a sphere.
pub fn sphere_residual(p: &SparseQPolynomial, x: f64, y: f64) -> f64 {
    sphere_test_directions()
        .into_iter()
        .map(|u| residual(p, Quaternion::from_slice(x, u, y)))
        .fold(0.0, f64::max)
}

/// All complex roots of a real polynomial, grouped into upper-half-plane
/// representatives with multiplicities.
pub fn real_roots_complex(rp: &RealPolynomial) -> Result<Vec<ComplexRootPair>> {
    if rp.degree() == 0 {
        return Err(Error::domain("constant polynomial has no roots"));
    }
    // Exact factors of z are split off first; they arise from the lowest
    // exponent of a lacunary polynomial and would collapse the initial guesses.
    let zero_mult = rp.coeffs().iter().take_while(|c| **c == 0.0).count();
    let reduced = RealPolynomial::new(rp.coeffs()[zero_mult..].to_vec())?;

    let mut pairs = Vec::new();
    if zero_mult > 0 {
        pairs.push(ComplexRootPair { x: 0.0, y: 0.0, multiplicity: zero_mult });
    }
    if reduced.degree() > 0 {
        let raw = aberth(&reduced)?;
        pairs.extend(cluster_and_polish(&reduced, &raw));
    }

    let covered: usize = pairs.iter().map(ComplexRootPair::degree_weight).sum();
    if covered != rp.degree() {
        return Err(Error::Numerical(format!(
            "root clusters account for {covered} of {} roots",
            rp.degree()
        )));
    }
    pairs.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    Ok(pairs)
}

/// Aberth–Ehrlich simultaneous iteration over all roots.
fn aberth(rp: &RealPolynomial) -> Result<Vec<Complex64>> {
    let n = rp.degree();
    let lead = *rp.coeffs().last().unwrap();
    let monic: Vec<f64> = rp.coeffs().iter().map(|c| c / lead).collect();
    let monic = RealPolynomial::new(monic)?;
    let deriv = monic.derivative().expect("degree >= 1");

    if n == 1 {
        return Ok(vec![Complex64::new(-monic.coeffs()[0], 0.0)]);
    }

    // Start on a circle of the geometric-mean root radius, rotated off the
    // real axis so the guesses are not conjugate-symmetric.
    let radius = monic.coeffs()[0].abs().powf(1.0 / n as f64).max(1e-3);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64 + 0.4;
            Complex64::from_polar(radius, t)
        })
        .collect();

    let mut converged = vec![false; n];
    for _ in 0..ABERTH_MAX_ITER {
        let mut all_done = true;
        for k in 0..n {
            if converged[k] {
                continue;
            }
            let zk = z[k];
            let pv = monic.eval_complex(zk);
            if pv.norm() == 0.0 {
                converged[k] = true;
                continue;
            }
            let dv = deriv.eval_complex(zk);
            let ratio = pv / dv;
            let repulsion: Complex64 = (0..n)
                .filter(|&j| j != k)
                .map(|j| {
                    let d = zk - z[j];
                    if d.norm() == 0.0 {
                        Complex64::new(0.0, 0.0)
                    } else {
                        d.inv()
                    }
                })
                .sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * repulsion);
            if !step.re.is_finite() || !step.im.is_finite() {
                // Perturb off a degenerate configuration.
                z[k] = zk + Complex64::new(1e-8, 1e-8) * (1.0 + zk.norm());
                all_done = false;
                continue;
            }
            z[k] = zk - step;
            if step.norm() <= 4.0 * f64::EPSILON * (1.0 + z[k].norm()) {
                converged[k] = true;
            } else {
                all_done = false;
            }
        }
        if all_done {
            break;
        }
    }
    if z.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(Error::Numerical("root iteration diverged".into()));
    }
    Ok(z)
}

/// Merges roots closer than `CLUSTER_RADIUS · (1 + |z|)`, or whose Newton
/// inclusion disks overlap, and polishes each
/// cluster centre with Newton's method on the derivative of order `m − 1`,
/// where the cluster of size `m` is a simple root.
fn cluster_and_polish(rp: &RealPolynomial, roots: &[Complex64]) -> Vec<ComplexRootPair> {
    let n = roots.len();
    // Every disk of radius n·|P/P'| around an approximation contains a true
    // root, so overlapping disks belong to the same (multiple) root.
    let deriv = rp.derivative().expect("degree >= 1");
    let inclusion: Vec<f64> = roots
        .iter()
        .map(|&z| {
            // |P| is floored at its rounding-error bound: inside a cluster the
            // computed value is pure noise.
            let noise = 4.0 * f64::EPSILON * rp.eval_abs(z.norm()) * n as f64;
            let value = rp.eval_complex(z).norm() + noise;
            let r = n as f64 * value / deriv.eval_complex(z).norm();
            if r.is_finite() {
                r
            } else {
                0.0
            }
        })
        .collect();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while parent[r] != r {
            r = parent[r];
        }
        let mut c = i;
        while parent[c] != r {
            let next = parent[c];
            parent[c] = r;
            c = next;
        }
        r
    }
    for i in 0..n {
        for j in (i + 1)..n {
            let floor = CLUSTER_RADIUS * (1.0 + roots[i].norm().max(roots[j].norm()));
            let tol = floor.max(inclusion[i] + inclusion[j]);
            if (roots[i] - roots[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<Complex64>> = Default::default();
    for (i, r) in roots.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(*r);
    }

    let mut derivs = vec![rp.clone()];
    while let Some(d) = derivs.last().unwrap().derivative() {
        derivs.push(d);
    }

    let mut out = Vec::new();
    for members in groups.values() {
        let m = members.len();
        let centre = members.iter().sum::<Complex64>() / m as f64;
        let on_axis = centre.im.abs() <= CLUSTER_RADIUS * (1.0 + centre.norm());
        if !on_axis && centre.im < 0.0 {
            continue;
        }
        let target = &derivs[(m - 1).min(derivs.len() - 1)];
        let d_target = &derivs[m.min(derivs.len() - 1)];
        let limit = CLUSTER_RADIUS * (1.0 + centre.norm());
        let polished = if on_axis {
            let x = polish_real(target, d_target, centre.re, limit);
            Complex64::new(x, 0.0)
        } else {
            polish_complex(target, d_target, centre, limit)
        };
        out.push(ComplexRootPair {
            x: polished.re,
            y: if on_axis { 0.0 } else { polished.im },
            multiplicity: m,
        });
    }
    out
}

fn polish_complex(
    f: &RealPolynomial,
    df: &RealPolynomial,
    start: Complex64,
    limit: f64,
) -> Complex64 {
    if f.degree() == 0 {
        return start;
    }
    let mut z = start;
    let mut fz = f.eval_complex(z).norm();
    for _ in 0..20 {
        let d = df.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let next = z - f.eval_complex(z) / d;
        let fn_ = f.eval_complex(next).norm();
        if (next - start).norm() > limit || !(fn_ < fz) {
            break;
        }
        z = next;
        fz = fn_;
    }
    z
}

fn polish_real(f: &RealPolynomial, df: &RealPolynomial, start: f64, limit: f64) -> f64 {
    if f.degree() == 0 {
        return start;
    }
    let mut x = start;
    let mut fx = f.eval(x).abs();
    for _ in 0..20 {
        let d = df.eval(x);
        if d == 0.0 {
            break;
        }
        let next = x - f.eval(x) / d;
        let fn_ = f.eval(next).abs();
        if (next - start).abs() > limit || !(fn_ < fx) {
            break;
        }
        x = next;
        fx = fn_;
    }
    x
}

/// `(A, B)` with `p(x + Iy) = A + I·B` for every `I ∈ 𝕊`.
pub fn slice_components(p: &SparseQPolynomial, x: f64, y: f64) -> (Quaternion, Quaternion) {
    let z = Complex64::new(x, y);
    let mut power = Complex64::new(1.0, 0.0);
    let mut at = 0u32;
    let mut a = Quaternion::ZERO;
    let mut b = Quaternion::ZERO;
    for t in p.terms() {
        while at < t.exp {
            power *= z;
            at += 1;
        }
        a += t.coeff.scale(power.re);
        b += t.coeff.scale(power.im);
    }
    (a, b)
}

/// Decides whether the sphere `x + y𝕊` (`y > 0`) is entirely made of zeros,
/// carries one isolated zero, or is not a zero set of `p` at all.
pub fn classify(p: &SparseQPolynomial, x: f64, y: f64, tol: f64) -> Classification {
    let r = x.hypot(y);
    let scale = p.coeff_norm_sum() * r.max(1.0).powi(p.degree() as i32);
    let (a, b) = slice_components(p, x, y);
    let (na, nb) = (a.norm(), b.norm());
    if na <= tol * scale && nb <= tol * scale {
        return Classification::Sphere;
    }
    if nb <= tol * scale {
        return Classification::Spurious(format!(
            "|B| = {nb:e} vanishes while |A| = {na:e} does not"
        ));
    }
    let unit = -(a * b.inverse().expect("|B| > 0"));
    if unit.re().abs() > tol || (unit.norm() - 1.0).abs() > tol {
        return Classification::Spurious(format!(
            "-A/B = {unit} is not a unit imaginary quaternion"
        ));
    }
    let u = UnitImaginary::new(unit).expect("imaginary part close to unit length");
    Classification::Point(Quaternion::from_slice(x, u, y))
}

/// Finds every zero of `p`: isolated points and whole spheres.
pub fn find_zeros(p: &SparseQPolynomial, tol: f64) -> Result<ZeroSet> {
    if p.degree() == 0 {
        return Err(Error::domain("zero finding needs degree >= 1"));
    }
    let normal = p.normal()?;
    let pairs = real_roots_complex(&normal)?;

    let mut zeros = Vec::new();
    let mut unresolved = Vec::new();
    for pair in pairs {
        if pair.y == 0.0 {
            resolve_real(p, pair, tol, &mut zeros, &mut unresolved);
        } else {
            resolve_pair(p, &normal, pair, tol, &mut zeros, &mut unresolved);
        }
    }

    let total: usize = zeros.iter().map(Zero::degree_weight).sum();
    if total != p.degree() as usize && unresolved.is_empty() {
        unresolved.push(Unresolved {
            x: f64::NAN,
            y: f64::NAN,
            multiplicity: 0,
            detail: format!("multiplicities sum to {total}, degree is {}", p.degree()),
        });
    }
    Ok(ZeroSet { zeros, tolerance_used: tol, total_multiplicity: total, unresolved })
}

fn resolve_real(
    p: &SparseQPolynomial,
    pair: ComplexRootPair,
    tol: f64,
    zeros: &mut Vec<Zero>,
    unresolved: &mut Vec<Unresolved>,
) {
    // A real zero of p is a root of N(p) of even multiplicity.
    let q = Quaternion::real(pair.x);
    let res = residual(p, q);
    if pair.multiplicity % 2 != 0 || res > tol.sqrt() {
        unresolved.push(Unresolved {
            x: pair.x,
            y: 0.0,
            multiplicity: pair.multiplicity,
            detail: format!(
                "real root of N(p) with multiplicity {} and residual {res:e}",
                pair.multiplicity
            ),
        });
        return;
    }
    zeros.push(Zero::Point { q, multiplicity: pair.multiplicity / 2, residual: res });
}

fn resolve_pair(
    p: &SparseQPolynomial,
    normal: &RealPolynomial,
    pair: ComplexRootPair,
    tol: f64,
    zeros: &mut Vec<Zero>,
    unresolved: &mut Vec<Unresolved>,
) {
    let (mut x, mut y) = (pair.x, pair.y);
    let mut class = classify(p, x, y, tol);
    if let Classification::Spurious(_) = class {
        (x, y) = repolish(normal, pair);
        class = classify(p, x, y, tol);
    }

    let mut remaining = pair.multiplicity;
    let mut current = p.clone();
    let mut spheres = 0usize;
    // Peel off the real quadratic factor of the sphere as many times as it
    // divides p; what is left of the multiplicity is an isolated zero on it.
    while matches!(class, Classification::Sphere) && remaining >= 2 {
        spheres += 1;
        remaining -= 2;
        if remaining == 0 {
            break;
        }
        match current.div_real_quadratic(2.0 * x, x * x + y * y) {
            Ok((quot, _, _)) if quot.degree() > 0 => {
                current = quot;
                class = classify(&current, x, y, tol);
            }
            _ => break,
        }
    }
    if spheres > 0 {
        zeros.push(Zero::Sphere {
            x,
            y,
            multiplicity: spheres,
            residual: sphere_residual(p, x, y),
        });
    }
    if remaining == 0 {
        return;
    }
    match class {
        Classification::Point(q) => zeros.push(Zero::Point {
            q,
            multiplicity: remaining,
            residual: residual(p, q),
        }),
        Classification::Sphere => unresolved.push(Unresolved {
            x,
            y,
            multiplicity: remaining,
            detail: "odd multiplicity left on a spherical zero".into(),
        }),
        Classification::Spurious(detail) => unresolved.push(Unresolved {
            x,
            y,
            multiplicity: remaining,
            detail,
        }),
    }
}

/// Second polishing pass: plain Newton on `N(p)` itself (simple clusters) or
/// on its derivative of order `m − 1`, without the step-length guard.
fn repolish(normal: &RealPolynomial, pair: ComplexRootPair) -> (f64, f64) {
    let mut f = normal.clone();
    for _ in 1..pair.multiplicity {
        match f.derivative() {
            Some(d) => f = d,
            None => break,
        }
    }
    let Some(df) = f.derivative() else {
        return (pair.x, pair.y);
    };
    let mut z = Complex64::new(pair.x, pair.y);
    for _ in 0..50 {
        let d = df.eval_complex(z);
        if d.norm() == 0.0 {
            break;
        }
        let step = f.eval_complex(z) / d;
        z -= step;
        if step.norm() <= f64::EPSILON * (1.0 + z.norm()) {
            break;
        }
    }
    if z.im > 0.0 && z.re.is_finite() {
        (z.re, z.im)
    } else {
        (pair.x, pair.y)
    }
}
