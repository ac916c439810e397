//! Quaternion arithmetic.
//!
//! Components are stored scalar-first, `q = w + x·i + y·j + z·k`, and the
//! product is the Hamilton product (`ij = k`, `jk = i`, `ki = j`).

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 4]", into = "[f64; 4]")]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const ZERO: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 0.0);
    pub const ONE: Quaternion = Quaternion::new(1.0, 0.0, 0.0, 0.0);
    pub const I: Quaternion = Quaternion::new(0.0, 1.0, 0.0, 0.0);
    pub const J: Quaternion = Quaternion::new(0.0, 0.0, 1.0, 0.0);
    pub const K: Quaternion = Quaternion::new(0.0, 0.0, 0.0, 1.0);

    #[inline]
    pub const fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Self { w, x, y, z }
    }

    #[inline]
    pub const fn real(w: f64) -> Self {
        Self::new(w, 0.0, 0.0, 0.0)
    }

    /// `x + u·y` for a unit imaginary `u`, i.e. the point of the slice
    /// through `u` with complex coordinate `x + iy`.
    #[inline]
    pub fn from_slice(x: f64, u: UnitImaginary, y: f64) -> Self {
        Self::real(x) + u.get().scale(y)
    }

    #[inline]
    pub fn re(self) -> f64 {
        self.w
    }

    /// Imaginary part as a quaternion with zero real component.
    #[inline]
    pub fn im(self) -> Self {
        Self::new(0.0, self.x, self.y, self.z)
    }

    #[inline]
    pub fn conj(self) -> Self {
        Self::new(self.w, -self.x, -self.y, -self.z)
    }

    #[inline]
    pub fn norm_sqr(self) -> f64 {
        self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z
    }

    #[inline]
    pub fn norm(self) -> f64 {
        // hypot-style scaling is unnecessary at the magnitudes used here.
        self.norm_sqr().sqrt()
    }

    /// Euclidean inner product of the two 4-vectors, equal to `Re(p q̄)`.
    #[inline]
    pub fn dot(self, other: Self) -> f64 {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn scale(self, s: f64) -> Self {
        Self::new(self.w * s, self.x * s, self.y * s, self.z * s)
    }

    /// Multiplicative inverse `q̄ / |q|²`.
    pub fn inverse(self) -> Result<Self> {
        let n2 = self.norm_sqr();
        if n2 == 0.0 || !n2.is_finite() {
            return Err(Error::domain("inverse of a zero quaternion"));
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// `q^n` by binary powering.
    pub fn pow(self, n: u32) -> Self {
        let mut result = Self::ONE;
        let mut base = self;
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                result = result * base;
            }
            e >>= 1;
            if e > 0 {
                base = base * base;
            }
        }
        result
    }

    pub fn is_finite(self) -> bool {
        self.w.is_finite() && self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    pub fn is_real(self) -> bool {
        self.x == 0.0 && self.y == 0.0 && self.z == 0.0
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.w, self.x, self.y, self.z]
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl From<[f64; 4]> for Quaternion {
    fn from(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }
}

impl From<Quaternion> for [f64; 4] {
    fn from(q: Quaternion) -> Self {
        q.to_array()
    }
}

impl From<f64> for Quaternion {
    fn from(w: f64) -> Self {
        Self::real(w)
    }
}

impl fmt::Display for Quaternion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {:+}i {:+}j {:+}k", self.w, self.x, self.y, self.z)
    }
}

impl Add for Quaternion {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.w + o.w, self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl AddAssign for Quaternion {
    #[inline]
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}

impl Sub for Quaternion {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.w - o.w, self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl Neg for Quaternion {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.w, -self.x, -self.y, -self.z)
    }
}

impl Mul for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(
            self.w * o.w - self.x * o.x - self.y * o.y - self.z * o.z,
            self.w * o.x + self.x * o.w + self.y * o.z - self.z * o.y,
            self.w * o.y - self.x * o.z + self.y * o.w + self.z * o.x,
            self.w * o.z + self.x * o.y - self.y * o.x + self.z * o.w,
        )
    }
}

impl Mul<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn mul(self, s: f64) -> Self {
        self.scale(s)
    }
}

impl Div<f64> for Quaternion {
    type Output = Self;
    #[inline]
    fn div(self, s: f64) -> Self {
        self.scale(1.0 / s)
    }
}

/// Angle in `[0, π]` between `p` and `q` viewed as vectors of ℝ⁴.
///
/// Evaluated as `atan2(|Im(p q̄)|, Re(p q̄))`, which stays accurate for nearly
/// parallel arguments where `acos` loses half the digits.
pub fn angle_between(p: Quaternion, q: Quaternion) -> Result<f64> {
    if p.norm_sqr() == 0.0 || q.norm_sqr() == 0.0 {
        return Err(Error::domain("angle with a zero quaternion is undefined"));
    }
    let pq = p * q.conj();
    Ok(pq.im().norm().atan2(pq.re()))
}

/// An element of the unit sphere 𝕊 of purely imaginary quaternions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitImaginary(Quaternion);

impl UnitImaginary {
    /// Normalizes the imaginary part of `q`; the real part is discarded.
    pub fn new(q: Quaternion) -> Result<Self> {
        let v = q.im();
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::domain("imaginary part is zero"));
        }
        Ok(Self(v.scale(1.0 / n)))
    }

    pub fn get(self) -> Quaternion {
        self.0
    }

    pub fn i() -> Self {
        Self(Quaternion::I)
    }
}

/// Reference direction `b` and half aperture `θ ∈ [0, π/2]` of a cone of
/// admissible coefficient directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleFrame {
    b: Quaternion,
    half_aperture: f64,
}

impl AngleFrame {
    pub fn new(b: Quaternion, half_aperture: f64) -> Result<Self> {
        if b.norm_sqr() == 0.0 || !b.is_finite() {
            return Err(Error::domain("reference direction b must be a nonzero quaternion"));
        }
        if !(0.0..=FRAC_PI_2).contains(&half_aperture) {
            return Err(Error::domain(format!(
                "half aperture {half_aperture} outside [0, pi/2]"
            )));
        }
        Ok(Self { b, half_aperture })
    }

    pub fn b(&self) -> Quaternion {
        self.b
    }

    pub fn half_aperture(&self) -> f64 {
        self.half_aperture
    }
}

/// Draws a quaternion uniformly from the unit 3-sphere: four independent
/// standard normals, normalized.
pub fn sample_unit<R: Rng + ?Sized>(rng: &mut R) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        let n = q.norm();
        if n > 1e-12 {
            return q.scale(1.0 / n);
        }
    }
}

/// Draws a point of 𝕊 uniformly.
pub fn sample_unit_imaginary<R: Rng + ?Sized>(rng: &mut R) -> UnitImaginary {
    loop {
        let v = Quaternion::new(
            0.0,
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        );
        if v.norm() > 1e-12 {
            return UnitImaginary::new(v).expect("nonzero imaginary vector");
        }
    }
}
