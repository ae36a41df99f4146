//! Wigner 3j symbols, Clebsch–Gordan coefficients and Gaunt integrals.
//!
//! Two evaluation paths are provided:
//!
//! * a floating-point path computing whole `ℓ3`-families at once by the
//!   Schulten–Gordon three-term recursion, run from both ends of the range and
//!   matched inside the classically allowed region (accurate to a few ulps,
//!   stable to `ℓ ≈ 5000`);
//! * an exact path ([`exact`]) using arbitrary-precision rationals in Racah's
//!   single-sum formula, intended as an oracle for small degrees.
//!
//! Clebsch–Gordan coefficients use
//! `C^{ℓ3 m3}_{ℓ1 m1; ℓ2 m2} = (-1)^{ℓ1-ℓ2+m3} √(2ℓ3+1) (ℓ1 ℓ2 ℓ3; m1 m2 -m3)`.

pub mod exact;
mod gaunt;
mod recursion;

pub use gaunt::{gaunt_complex_quartic, gaunt_quartic};
pub use recursion::{central_row, wigner3j_family, wigner3j_zero, Family};

use crate::{Error, Result};
use parking_lot::RwLock;
use std::collections::HashMap;
use std::sync::{Arc, LazyLock};

/// Largest angular momentum accepted by the floating-point path.
pub const MAX_L: u32 = 5000;

/// Arguments of a 3j symbol `(ℓ1 ℓ2 ℓ3; m1 m2 m3)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ThreeJ {
    pub l: [u32; 3],
    pub m: [i32; 3],
}

impl ThreeJ {
    pub const fn new(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Self {
        Self { l: [l1, l2, l3], m: [m1, m2, m3] }
    }

    /// Triangle inequality, `|m_i| ≤ ℓ_i` and `Σ m_i = 0`.
    pub fn selection_rules_hold(&self) -> bool {
        let [l1, l2, l3] = self.l.map(i64::from);
        let [m1, m2, m3] = self.m.map(i64::from);
        m1 + m2 + m3 == 0
            && m1.abs() <= l1
            && m2.abs() <= l2
            && m3.abs() <= l3
            && l3 >= (l1 - l2).abs()
            && l3 <= l1 + l2
    }

    fn check_capacity(&self, max: u32) -> Result<()> {
        match self.l.iter().find(|&&l| l > max) {
            Some(l) => Err(Error::Capacity(format!("angular momentum {l} exceeds {max}"))),
            None => Ok(()),
        }
    }
}

/// Arguments of `C^{ℓ m}_{ℓ1 m1; ℓ2 m2}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cg {
    pub l1: u32,
    pub m1: i32,
    pub l2: u32,
    pub m2: i32,
    pub l: u32,
    pub m: i32,
}

impl Cg {
    pub const fn new(l1: u32, m1: i32, l2: u32, m2: i32, l: u32, m: i32) -> Self {
        Self { l1, m1, l2, m2, l, m }
    }

    /// The 3j symbol this coefficient is proportional to, and the factor.
    pub fn to_three_j(&self) -> (ThreeJ, f64) {
        let e = i64::from(self.l1) - i64::from(self.l2) + i64::from(self.m);
        let sign = if e.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        (
            ThreeJ::new(self.l1, self.l2, self.l, self.m1, self.m2, -self.m),
            sign * f64::from(2 * self.l + 1).sqrt(),
        )
    }
}

type FamilyKey = (u32, u32, i32, i32);

/// Double-precision evaluator memoizing whole 3j families.
///
/// The cache holds at most `capacity` families and is cleared wholesale when
/// full. Concurrent readers do not block each other.
pub struct Wigner {
    capacity: usize,
    cache: RwLock<HashMap<FamilyKey, Arc<Family<f64>>>>,
}

impl Default for Wigner {
    fn default() -> Self {
        Self::with_capacity(4096)
    }
}

static GLOBAL: LazyLock<Wigner> = LazyLock::new(Wigner::default);

impl Wigner {
    pub fn with_capacity(capacity: usize) -> Self {
        Self { capacity: capacity.max(1), cache: RwLock::new(HashMap::new()) }
    }

    /// Process-wide shared evaluator.
    pub fn global() -> &'static Wigner {
        &GLOBAL
    }

    /// The family `(ℓ1 ℓ2 ·; m1 m2 -m1-m2)` over all admissible `ℓ3`.
    pub fn family(&self, l1: u32, l2: u32, m1: i32, m2: i32) -> Result<Arc<Family<f64>>> {
        let key = (l1, l2, m1, m2);
        if let Some(f) = self.cache.read().get(&key) {
            return Ok(Arc::clone(f));
        }
        let fam = Arc::new(wigner3j_family::<f64>(l1, l2, m1, m2)?);
        let mut w = self.cache.write();
        if w.len() >= self.capacity {
            w.clear();
        }
        w.insert(key, Arc::clone(&fam));
        Ok(fam)
    }

    pub fn three_j(&self, key: ThreeJ) -> Result<f64> {
        key.check_capacity(MAX_L)?;
        if !key.selection_rules_hold() {
            return Ok(0.0);
        }
        let [l1, l2, l3] = key.l;
        let [m1, m2, _] = key.m;
        if m1 == 0 && m2 == 0 {
            return Ok(wigner3j_zero(l1, l2, l3));
        }
        Ok(self.family(l1, l2, m1, m2)?.get(l3))
    }

    pub fn cg(&self, key: Cg) -> Result<f64> {
        let (tj, factor) = key.to_three_j();
        Ok(factor * self.three_j(tj)?)
    }
}

/// `(ℓ1 ℓ2 ℓ3; m1 m2 m3)` via the shared evaluator; exactly `0` when a
/// selection rule fails.
///
/// ```
/// let v = poisson_waves::wigner::wigner3j(1, 1, 2, 0, 0, 0).unwrap();
/// assert!((v - (2.0_f64 / 15.0).sqrt()).abs() < 1e-15);
/// ```
pub fn wigner3j(l1: u32, l2: u32, l3: u32, m1: i32, m2: i32, m3: i32) -> Result<f64> {
    Wigner::global().three_j(ThreeJ::new(l1, l2, l3, m1, m2, m3))
}

/// `C^{ℓ m}_{ℓ1 m1; ℓ2 m2}` via the shared evaluator.
pub fn clebsch_gordan(l1: u32, m1: i32, l2: u32, m2: i32, l: u32, m: i32) -> Result<f64> {
    Wigner::global().cg(Cg::new(l1, m1, l2, m2, l, m))
}

/// `∫_0^1 P_ℓ^4 = Σ_L (2L+1) (ℓ ℓ L; 0 0 0)^4`, independent of quadrature.
pub fn quartic_integral_via_wigner(ell: u32) -> Result<f64> {
    let row = central_row::<f64>(ell)?;
    Ok(crate::neumaier(row.iter().enumerate().map(|(l, z)| {
        let z2 = z * z;
        (2 * l + 1) as f64 * z2 * z2
    })))
}

#[cfg(test)]
mod tests;
