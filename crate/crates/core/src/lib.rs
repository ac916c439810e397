//! Zero-inclusion radii for lacunary polynomials over the quaternions.
//!
//! Polynomials are written `p(q) = Σ q^{n_ν} a_{n_ν}` with the powers of the
//! variable on the left and quaternion coefficients on the right. The crate
//! computes Eneström–Kakeya-type inclusion radii ([`bounds`]), the extremal
//! constants those radii depend on ([`mconst`]), and certifies every radius by
//! locating all zeros of the polynomial ([`roots`]): isolated points as well
//! as whole spheres `x + y𝕊`.

pub mod bounds;
pub mod error;
pub mod harness;
pub mod io;
pub mod mconst;
pub mod poly;
pub mod quat;
pub mod roots;

pub use error::{Error, Result};
pub use poly::{RealPolynomial, SparseQPolynomial, Term};
pub use quat::{angle_between, AngleFrame, Quaternion, UnitImaginary};
