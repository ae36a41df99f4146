//! Closed-form moments and fourth cumulants.
//!
//! With `N ~ Poisson(4πν)` points, Campbell's formula gives
//! `cum_4(Σ f(ξ_k)) = ν ∫ f⁴`, from which every cumulant below follows:
//!
//! * point value: `cum_4 T(x) = (2ℓ+1)²/(4πν) · ∫_0^1 P_ℓ⁴`;
//! * real coefficient: `cum_4 â_{ℓm} = (4π/ν) · w_m · Σ_L (C^{L0}_{ℓ0ℓ0})² (C^{L0}_{ℓ,-m;ℓ,m})² / (2L+1)`,
//!   with `w_0 = 1` and `w_m = 3/2` otherwise (the real basis mixes `±m`);
//! * coefficient sum: `Σ_m cum_4 â_{ℓm} = (4π/ν) [3/2 · S₂ − 1/2 · S₄]`, where
//!   `S₂ = Σ_L (ℓ ℓ L; 0 0 0)²` and `S₄ = Σ_L (2L+1)(ℓ ℓ L; 0 0 0)⁴ = ∫_0^1 P_ℓ⁴`.

use crate::error::domain;
use crate::sphfn::legendre_quartic_integral;
use crate::wigner::{central_row, quartic_integral_via_wigner, wigner3j_family};
use crate::{neumaier, Real, Result};
use serde::{Deserialize, Serialize};

/// Worst case of the uniform constant in `(ℓ ℓ L; 0 0 0)² ≤ (2/π) γ / (L √(2ℓ-L) √(2ℓ+L))`.
pub const GAMMA_3J: f64 = 1.539;

fn check<T: Real>(ell: usize, rate: T) -> Result<()> {
    if !(rate.is_finite() && rate > T::zero()) {
        return Err(domain!("rate must be positive and finite, got {rate}"));
    }
    crate::sphfn::check_degree(ell)
}

fn four_pi<T: Real>() -> T {
    T::lit(4.0) * T::PI()
}

/// How `∫_0^1 P_ℓ⁴` is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum QuarticRoute {
    #[default]
    Quadrature,
    Wigner,
}

/// `∫_0^1 P_ℓ⁴` by the selected route.
pub fn quartic_integral<T: Real>(ell: usize, route: QuarticRoute) -> Result<T> {
    match route {
        QuarticRoute::Quadrature => legendre_quartic_integral(ell),
        QuarticRoute::Wigner => {
            let v = quartic_integral_via_wigner(ell as u32)?;
            Ok(T::from_f64(v).expect("representable"))
        }
    }
}

/// `cum_4 T(x) = (2ℓ+1)²/(4πν) · ∫_0^1 P_ℓ⁴`.
pub fn cum4_point<T: Real>(ell: usize, rate: T) -> Result<T> {
    check(ell, rate)?;
    let n = T::from_usize_lossy(2 * ell + 1);
    Ok(n * n / four_pi::<T>() * quartic_integral::<T>(ell, QuarticRoute::Quadrature)? / rate)
}

/// `E[T(x)⁴] = 3 + cum_4 T(x)`, i.e. `ν E[P⁴] + 3 ν² E[P²]²` with `E[P²] = 4π/(2ℓ+1)`
/// after normalization.
pub fn fourth_moment_point<T: Real>(ell: usize, rate: T) -> Result<T> {
    Ok(T::lit(3.0) + cum4_point(ell, rate)?)
}

/// `3/(2π³) · log ℓ / ν`, the large-`ℓ` form of [`cum4_point`].
pub fn cum4_point_leading<T: Real>(ell: usize, rate: T) -> Result<T> {
    check(ell, rate)?;
    if ell < 2 {
        return Err(domain!("leading-order forms need ℓ ≥ 2"));
    }
    let pi = T::PI();
    Ok(T::lit(3.0) / (T::lit(2.0) * pi * pi * pi) * T::from_usize_lossy(ell).ln() / rate)
}

/// `3 + 3/(2π³) · log ℓ / ν`.
pub fn fourth_moment_point_leading<T: Real>(ell: usize, rate: T) -> Result<T> {
    Ok(T::lit(3.0) + cum4_point_leading(ell, rate)?)
}

/// `3/(2π²) · log ℓ / ℓ²`, the large-`ℓ` form of `∫_0^1 P_ℓ⁴`.
pub fn quartic_integral_leading<T: Real>(ell: usize) -> T {
    let l = T::from_usize_lossy(ell);
    T::lit(3.0) / (T::lit(2.0) * T::PI() * T::PI()) * l.ln() / (l * l)
}

/// `cum_4 â_{ℓm}` for the real coefficient of order `m`.
pub fn cum4_coefficient<T: Real>(ell: usize, m: i64, rate: T) -> Result<T> {
    check(ell, rate)?;
    if m.unsigned_abs() as usize > ell {
        return Err(domain!("order {m} exceeds degree {ell}"));
    }
    let l = ell as u32;
    let mu = m.unsigned_abs() as i32;
    let central = central_row::<T>(l)?;
    let fam = wigner3j_family::<T>(l, l, -mu, mu)?;
    // C_L² C_{L,m}² / (2L+1) = (2L+1) z_L² f_L² in 3j form.
    let sum = neumaier((0..=2 * l).step_by(2).map(|big_l| {
        let z = central[big_l as usize];
        let f = fam.get(big_l);
        T::from_u32(2 * big_l + 1).unwrap() * z * z * f * f
    }));
    let w = if m == 0 { T::one() } else { T::lit(1.5) };
    Ok(four_pi::<T>() / rate * w * sum)
}

/// `(6/π) · log ℓ / (ℓ² ν)`, the large-`ℓ` form of `cum_4 â_{ℓ0}`.
pub fn cum4_coefficient_zero_leading<T: Real>(ell: usize, rate: T) -> Result<T> {
    check(ell, rate)?;
    let l = T::from_usize_lossy(ell);
    Ok(T::lit(6.0) / T::PI() * l.ln() / (l * l * rate))
}

/// The two central sums `S₂ = Σ_L (ℓ ℓ L; 0 0 0)²` and `S₄ = Σ_L (2L+1)(ℓ ℓ L; 0 0 0)⁴`.
pub fn central_sums<T: Real>(ell: usize) -> Result<(T, T)> {
    let row = central_row::<T>(ell as u32)?;
    let s2 = neumaier(row.iter().map(|&z| z * z));
    let s4 = neumaier(row.iter().enumerate().map(|(l, &z)| {
        let z2 = z * z;
        T::from_usize_lossy(2 * l + 1) * z2 * z2
    }));
    Ok((s2, s4))
}

/// `Σ_m cum_4 â_{ℓm}`, collapsed over `m` by unitarity.
pub fn cum4_coefficient_sum<T: Real>(ell: usize, rate: T) -> Result<T> {
    check(ell, rate)?;
    let (s2, s4) = central_sums::<T>(ell)?;
    Ok(four_pi::<T>() / rate * (T::lit(1.5) * s2 - T::lit(0.5) * s4))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bracket<T> {
    pub lower: T,
    pub upper: T,
}

impl<T: Real> Bracket<T> {
    pub fn contains(&self, x: T) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn width(&self) -> T {
        self.upper - self.lower
    }
}

/// `(2/π) γ (log ℓ/ℓ + 2/ℓ + 1/(4ℓ+1)²)`, an upper bound for `S₂` from the
/// uniform 3j bound (the `L = 0` term, the bulk, and the `L = 2ℓ` end).
pub fn central_sum_upper<T: Real>(ell: usize) -> T {
    let l = T::from_usize_lossy(ell);
    let r = T::from_usize_lossy(4 * ell + 1);
    T::lit(2.0) / T::PI() * T::lit(GAMMA_3J) * (l.ln() / l + T::lit(2.0) / l + T::one() / (r * r))
}

/// Bracket for [`cum4_coefficient_sum`]:
/// `4π/((2ℓ+1)ν) ≤ Σ_m cum_4 â_{ℓm} ≤ (3/2)(4π/ν) · (2/π) γ (log ℓ/ℓ + 2/ℓ + 1/(4ℓ+1)²)`.
///
/// The lower end keeps only `L = 0` in `S₂`; the upper end drops `S₄ ≥ 0`.
pub fn cum4_bracket<T: Real>(ell: usize, rate: T) -> Result<Bracket<T>> {
    check(ell, rate)?;
    if ell < 1 {
        return Err(domain!("the bracket needs ℓ ≥ 1"));
    }
    let fp = four_pi::<T>();
    Ok(Bracket {
        lower: fp / (T::from_usize_lossy(2 * ell + 1) * rate),
        upper: T::lit(1.5) * fp / rate * central_sum_upper::<T>(ell),
    })
}

/// `E‖T‖²`, `E‖T‖⁴` and `‖S‖²_HS` of the field in `L²(S²)`.
///
/// `E‖T‖⁴` is kept as its three contributions (Poisson shot noise, squared
/// mean, covariance trace) so their combination cancels exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormMoments<T> {
    /// `E‖T‖² = Σ_m E â² = 4π`.
    pub mean_sq: T,
    /// `4π/ν`.
    pub shot_noise: T,
    /// `‖S‖²_HS = (4π)²/(2ℓ+1)`.
    pub hs_sq: T,
}

impl<T: Real> NormMoments<T> {
    /// `E‖T‖⁴ = 4π/ν + (4π)² + 2 (4π)²/(2ℓ+1)`.
    pub fn fourth(&self) -> T {
        neumaier([self.shot_noise, self.mean_sq * self.mean_sq, T::lit(2.0) * self.hs_sq])
    }

    /// `E‖T‖⁴ − (E‖T‖²)² − 2‖S‖²_HS`, summed from the components with
    /// compensation; equals the shot-noise term.
    pub fn defect(&self) -> T {
        let m2 = self.mean_sq * self.mean_sq;
        let hs2 = T::lit(2.0) * self.hs_sq;
        neumaier([self.shot_noise, m2, hs2, -m2, -hs2])
    }

    /// `Var ‖T‖² = E‖T‖⁴ − (E‖T‖²)²`.
    pub fn variance_of_norm_sq(&self) -> T {
        let hs2 = T::lit(2.0) * self.hs_sq;
        neumaier([self.shot_noise, hs2])
    }
}

pub fn norm_moments<T: Real>(ell: usize, rate: T) -> Result<NormMoments<T>> {
    check(ell, rate)?;
    let fp = four_pi::<T>();
    Ok(NormMoments {
        mean_sq: fp,
        shot_noise: fp / rate,
        hs_sq: fp * fp / T::from_usize_lossy(2 * ell + 1),
    })
}

/// The functional whose law is studied.
///
/// Serialized as its display string: `point_value`, `coefficient:M`,
/// `coefficient_sum`, `norm_squared` or `fdd`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, )]
pub enum Target {
    /// `T(x)` at one point.
    PointValue,
    /// The real coefficient `â_{ℓm}`.
    Coefficient(i64),
    /// The full coefficient vector; its scalar summary is `Σ_m cum_4 â_{ℓm}`.
    CoefficientSum,
    /// `‖T‖²`, whose fourth-moment defect is `Var‖T‖² − 2‖S‖²_HS = 4π/ν`.
    NormSquared,
    /// `(T(x_1), …, T(x_d))`; its scalar summary is `Σ_i cum_4 T(x_i)`.
    Fdd,
}

impl Target {
    /// Whether a replicate produces a vector rather than a scalar.
    pub fn is_vector(&self) -> bool {
        matches!(self, Self::CoefficientSum | Self::Fdd)
    }
}

impl std::fmt::Display for Target {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::PointValue => f.write_str("point_value"),
            Self::Coefficient(m) => write!(f, "coefficient:{m}"),
            Self::CoefficientSum => f.write_str("coefficient_sum"),
            Self::NormSquared => f.write_str("norm_squared"),
            Self::Fdd => f.write_str("fdd"),
        }
    }
}

impl Serialize for Target {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Target {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl std::str::FromStr for Target {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "point_value" => Self::PointValue,
            "coefficient_sum" => Self::CoefficientSum,
            "norm_squared" => Self::NormSquared,
            "fdd" => Self::Fdd,
            _ => match s.strip_prefix("coefficient:") {
                Some(m) => Self::Coefficient(m.parse().map_err(|_| domain!("bad order in '{s}'"))?),
                None => return Err(domain!("unknown target '{s}'")),
            },
        })
    }
}

/// Analytic cumulant of a target, optionally paired with a Monte Carlo
/// estimate and its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantReport {
    pub target: Target,
    pub ell: usize,
    pub rate: f64,
    pub analytic: f64,
    pub mc_estimate: Option<f64>,
    pub mc_stderr: Option<f64>,
}

impl CumulantReport {
    /// `(estimate − analytic) / stderr`.
    pub fn z_score(&self) -> Option<f64> {
        match (self.mc_estimate, self.mc_stderr) {
            (Some(e), Some(se)) if se > 0.0 => Some((e - self.analytic) / se),
            _ => None,
        }
    }
}

/// The analytic side of a [`CumulantReport`]; `d` is the number of points
/// for [`Target::Fdd`].
pub fn analytic_report(target: Target, ell: usize, rate: f64, d: usize) -> Result<CumulantReport> {
    let analytic = match target {
        Target::PointValue => cum4_point(ell, rate)?,
        Target::Coefficient(m) => cum4_coefficient(ell, m, rate)?,
        Target::CoefficientSum => cum4_coefficient_sum(ell, rate)?,
        Target::NormSquared => norm_moments(ell, rate)?.defect(),
        Target::Fdd => d as f64 * cum4_point(ell, rate)?,
    };
    Ok(CumulantReport { target, ell, rate, analytic, mc_estimate: None, mc_stderr: None })
}
