//! Poisson spherical random waves.
//!
//! A Poisson spherical random wave of degree `ℓ` and rate `ν` is the field
//!
//! ```text
//! T(x) = ν^{-1/2} Σ_k √((2ℓ+1)/4π) P_ℓ(⟨x, ξ_k⟩),   x ∈ S²,
//! ```
//!
//! where `{ξ_k}` is a homogeneous Poisson process on the sphere whose
//! intensity is `ν` times surface (Lebesgue) measure, so the expected number
//! of points is `4πν`.
//!
//! The crate is layered bottom-up:
//!
//! * [`sphfn`] — Legendre functions, real spherical harmonics, Gauss–Legendre
//!   quadrature.
//! * [`wigner`] — Wigner 3j / Clebsch–Gordan coefficients (stable float
//!   recursion plus an exact rational oracle) and Gaunt integrals.
//! * [`model`] — realizations of the Poisson process and the field built on it.
//! * [`moments`] — closed-form cumulants and norm moments.
//! * [`bounds`] — quantitative CLT bounds assembled from the moments.
//! * [`mc`] — seeded, parallel Monte Carlo and empirical statistics.
//!
//! Numeric kernels in `sphfn`, `moments` and `bounds` are generic over
//! [`Real`]; the simulation layers work in `f64`.

pub mod bounds;
mod error;
pub mod mc;
pub mod model;
pub mod moments;
pub mod sphfn;
mod sum;
pub mod wigner;

pub use error::{Error, Result};
pub use sum::{neumaier, NeumaierSum};

use num_traits::{Float, FloatConst, FromPrimitive};
use std::fmt::{Debug, Display};

/// Floating-point scalar accepted by the generic kernels.
pub trait Real:
    Float + FloatConst + FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable")
    }

    /// Conversion from a count or degree.
    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("integer representable")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// A point on the unit sphere in double precision.
pub type Point = sphfn::SpherePoint<f64>;
/// Gauss–Legendre rule in double precision.
pub type Quadrature = sphfn::QuadratureRule<f64>;
/// Wigner 3j family in double precision.
pub type Family = wigner::Family<f64>;
