use crate::error::domain;
use crate::{Real, Result};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A point on the unit sphere, stored as a Cartesian unit vector.
///
/// Serializes (in `f64`) as the array `[x, y, z]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpherePoint<T> {
    x: T,
    y: T,
    z: T,
}

impl<T: Real> SpherePoint<T> {
    /// Polar angle `θ ∈ [0, π]`, azimuth `φ` (any real; reduced mod 2π).
    pub fn from_angles(theta: T, phi: T) -> Result<Self> {
        if !(theta >= T::zero() && theta <= T::PI()) || !phi.is_finite() {
            return Err(domain!("angles (θ={theta}, φ={phi}) out of range"));
        }
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Ok(Self { x: st * cp, y: st * sp, z: ct })
    }

    /// Normalizes a nonzero finite vector onto the sphere.
    pub fn from_vector(x: T, y: T, z: T) -> Result<Self> {
        let r = (x * x + y * y + z * z).sqrt();
        if !r.is_finite() || r == T::zero() {
            return Err(domain!("cannot project ({x}, {y}, {z}) onto the sphere"));
        }
        Ok(Self { x: x / r, y: y / r, z: z / r })
    }

    /// Takes a vector that is already unit length to within `1e-12` as is,
    /// so stored points replay bit for bit.
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN coordinates must be rejected
    pub fn from_unit_vector(x: T, y: T, z: T) -> Result<Self> {
        let n2 = x * x + y * y + z * z;
        if !((n2 - T::one()).abs() <= T::lit(2e-12)) {
            return Err(domain!("({x}, {y}, {z}) is not a unit vector"));
        }
        Ok(Self { x, y, z })
    }

    pub fn north_pole() -> Self {
        Self { x: T::zero(), y: T::zero(), z: T::one() }
    }

    #[inline]
    pub fn xyz(&self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    #[inline]
    pub fn z(&self) -> T {
        self.z
    }

    /// Polar angle, computed with `atan2` so it stays accurate near the poles.
    pub fn theta(&self) -> T {
        (self.x * self.x + self.y * self.y).sqrt().atan2(self.z)
    }

    /// Azimuth in `[0, 2π)`.
    pub fn phi(&self) -> T {
        let p = self.y.atan2(self.x);
        if p < T::zero() {
            p + T::PI() + T::PI()
        } else {
            p
        }
    }

    /// Inner product, clamped into `[-1, 1]`.
    #[inline]
    pub fn dot(&self, other: &Self) -> T {
        let d = self.x * other.x + self.y * other.y + self.z * other.z;
        d.max(-T::one()).min(T::one())
    }
}

impl Serialize for SpherePoint<f64> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.xyz().serialize(s)
    }
}

impl<'de> Deserialize<'de> for SpherePoint<f64> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, z] = <[f64; 3]>::deserialize(d)?;
        Self::from_unit_vector(x, y, z).map_err(serde::de::Error::custom)
    }
}
