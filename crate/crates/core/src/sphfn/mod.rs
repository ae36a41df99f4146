//! Special functions on the sphere.
//!
//! Real spherical harmonics follow the convention without the Condon–Shortley
//! phase: for `m > 0`, `Y_{ℓm} = √2 N_{ℓm} P_ℓ^m(cos θ) cos(mφ)`, for `m < 0`
//! the same with `|m|` and `sin(|m|φ)`, and `Y_{ℓ0} = N_{ℓ0} P_ℓ(cos θ)`, with
//! `N_{ℓm} = √((2ℓ+1)/4π · (ℓ-m)!/(ℓ+m)!)`. They are orthonormal on `S²`.

mod harmonics;
mod legendre;
mod point;
mod quadrature;

pub use harmonics::{
    assoc_legendre, assoc_legendre_normalized, normalized_legendre_column, real_sph_harm,
    sph_harm_row,
};
pub use legendre::{legendre, legendre_all, legendre_quartic_integral, legendre_sum, MAX_DEGREE};
pub use point::SpherePoint;
pub use quadrature::{gauss_legendre_rule, quadrature_order, QuadratureRule, SphereQuadrature};

use crate::error::domain;
use crate::{Real, Result};

#[inline]
pub(crate) fn check_argument<T: Real>(t: T) -> Result<()> {
    if t.is_nan() || t.abs() > T::one() {
        Err(domain!("Legendre argument {t} outside [-1, 1]"))
    } else {
        Ok(())
    }
}

#[inline]
pub(crate) fn check_degree(ell: usize) -> Result<()> {
    if ell > MAX_DEGREE {
        Err(crate::Error::Capacity(format!(
            "degree {ell} exceeds the supported maximum {MAX_DEGREE}"
        )))
    } else {
        Ok(())
    }
}
