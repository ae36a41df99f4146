//! Quantitative CLT bounds for the Poisson wave.
//!
//! Every bound is a smoothness constant times the square root of a fourth
//! cumulant (or, for the functional bound, the fourth-moment defect of
//! `‖T‖²`). Suprema over test-function classes cannot be evaluated, so the
//! smoothness caps `M₁, M₂, M₃` are supplied by the caller as a
//! [`SmoothnessBudget`]; all bounds are linear in them.

use crate::error::domain;
use crate::moments::{
    cum4_bracket, cum4_coefficient_sum, cum4_point, cum4_point_leading, fourth_moment_point,
    norm_moments, GAMMA_3J,
};
use crate::{Real, Result};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothnessBudget<T> {
    pub m1: T,
    pub m2: T,
    pub m3: T,
}

impl<T: Real> SmoothnessBudget<T> {
    pub fn new(m1: T, m2: T, m3: T) -> Result<Self> {
        if [m1, m2, m3].iter().any(|m| !(m.is_finite() && *m >= T::zero())) {
            return Err(domain!("smoothness caps must be finite and nonnegative"));
        }
        Ok(Self { m1, m2, m3 })
    }

    /// `M₁ = M₂ = M₃ = 1`.
    pub fn unit() -> Self {
        Self { m1: T::one(), m2: T::one(), m3: T::one() }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { m1: self.m1 * c, m2: self.m2 * c, m3: self.m3 * c }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Theorem {
    OneDimWasserstein,
    OneDimKolmogorov,
    FddD3,
    HarmonicD3,
    HarmonicD2,
    FddViaHarmonics,
    Functional,
}

impl Theorem {
    pub const ALL: [Theorem; 7] = [
        Self::OneDimWasserstein,
        Self::OneDimKolmogorov,
        Self::FddD3,
        Self::HarmonicD3,
        Self::HarmonicD2,
        Self::FddViaHarmonics,
        Self::Functional,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::OneDimWasserstein => "one-dim-wasserstein",
            Self::OneDimKolmogorov => "one-dim-kolmogorov",
            Self::FddD3 => "fdd-d3",
            Self::HarmonicD3 => "harmonic-d3",
            Self::HarmonicD2 => "harmonic-d2",
            Self::FddViaHarmonics => "fdd-via-harmonics",
            Self::Functional => "functional",
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Theorem {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| domain!("unknown theorem '{s}'"))
    }
}

/// An evaluated bound together with the inputs that produced it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundReport<T> {
    pub theorem: Theorem,
    pub value: T,
    /// Large-`ℓ` form, where one exists.
    pub leading_term: Option<T>,
    pub ell: Option<usize>,
    pub rate: T,
    pub dimension: Option<usize>,
    pub budget: Option<SmoothnessBudget<T>>,
    /// Intermediate quantities (alternative radicands, the two branches of a minimum, …).
    pub details: BTreeMap<&'static str, T>,
}

impl<T: Real> BoundReport<T> {
    fn new(theorem: Theorem, value: T, rate: T) -> Self {
        Self {
            theorem,
            value,
            leading_term: None,
            ell: None,
            rate,
            dimension: None,
            budget: None,
            details: BTreeMap::new(),
        }
    }

    pub fn detail(&self, key: &str) -> Option<T> {
        self.details.get(key).copied()
    }
}

fn need_ell<T: Real>(ell: usize, rate: T) -> Result<()> {
    if ell < 2 {
        return Err(domain!("bound requires ℓ ≥ 2, got {ell}"));
    }
    if !(rate.is_finite() && rate > T::zero()) {
        return Err(domain!("rate must be positive and finite, got {rate}"));
    }
    Ok(())
}

fn need_dim(d: usize) -> Result<()> {
    if d == 0 {
        return Err(domain!("dimension must be at least 1"));
    }
    Ok(())
}

/// `c₁ = 1/√(2π) + 2/3`, the one-dimensional Wasserstein constant.
pub fn wasserstein_constant<T: Real>() -> T {
    (T::lit(2.0) * T::PI()).sqrt().recip() + T::lit(2.0) / T::lit(3.0)
}

/// `√3/(2π²) + (2/3)√(3/(2π³))`, the coefficient of `√(log ℓ/ν)`.
pub fn one_dim_leading_constant<T: Real>() -> T {
    let pi = T::PI();
    let three = T::lit(3.0);
    three.sqrt() / (T::lit(2.0) * pi * pi)
        + T::lit(2.0) / three * (three / (T::lit(2.0) * pi * pi * pi)).sqrt()
}

/// `d_W(T(x), N(0,1)) ≤ c₁ √cum_4 T(x)`.
pub fn bound_one_dim<T: Real>(ell: usize, rate: T) -> Result<BoundReport<T>> {
    need_ell(ell, rate)?;
    let k4 = cum4_point(ell, rate)?;
    let mut r = BoundReport::new(Theorem::OneDimWasserstein, wasserstein_constant::<T>() * k4.sqrt(), rate);
    let log_ratio = T::from_usize_lossy(ell).ln() / rate;
    r.leading_term = Some(one_dim_leading_constant::<T>() * log_ratio.sqrt());
    r.ell = Some(ell);
    r.details.insert("cum4", k4);
    Ok(r)
}

/// `d_Kol ≤ (11 + √E F⁴ + (E F⁴)^{1/4}) √(E F⁴ − 3)`.
pub fn bound_one_dim_kolmogorov<T: Real>(ell: usize, rate: T) -> Result<BoundReport<T>> {
    if ell < 1 {
        return Err(domain!("bound requires ℓ ≥ 1"));
    }
    let e4 = fourth_moment_point(ell, rate)?;
    let k4 = cum4_point(ell, rate)?;
    let value = (T::lit(11.0) + e4.sqrt() + e4.sqrt().sqrt()) * k4.sqrt();
    let mut r = BoundReport::new(Theorem::OneDimKolmogorov, value, rate);
    r.ell = Some(ell);
    r.details.insert("fourth_moment", e4);
    Ok(r)
}

/// `B₃(g; d) = (√(2d)/4) M₂ + (2d/9) M₃`.
fn b3_fdd<T: Real>(d: usize, b: &SmoothnessBudget<T>) -> T {
    let d = T::from_usize_lossy(d);
    (T::lit(2.0) * d).sqrt() / T::lit(4.0) * b.m2 + T::lit(2.0) * d / T::lit(9.0) * b.m3
}

/// `d₃(F, Z_d) ≤ B₃(g; d) · d · √cum_4 T(x)` for the `d`-point vector, using `Tr Γ_d = d`.
pub fn bound_fdd_d3<T: Real>(ell: usize, rate: T, d: usize, budget: SmoothnessBudget<T>) -> Result<BoundReport<T>> {
    need_ell(ell, rate)?;
    need_dim(d)?;
    let b3 = b3_fdd(d, &budget);
    let df = T::from_usize_lossy(d);
    let mut r = BoundReport::new(Theorem::FddD3, b3 * df * cum4_point(ell, rate)?.sqrt(), rate);
    r.leading_term = Some(b3 * df * cum4_point_leading(ell, rate)?.sqrt());
    r.ell = Some(ell);
    r.dimension = Some(d);
    r.budget = Some(budget);
    r.details.insert("b3", b3);
    Ok(r)
}

/// `B₃(g; ℓ) = (√(2(2ℓ+1))/4) M₂ + (2/9) √((2ℓ+1) 4π) M₃`.
fn b3_harmonic<T: Real>(ell: usize, b: &SmoothnessBudget<T>) -> T {
    let n = T::from_usize_lossy(2 * ell + 1);
    (T::lit(2.0) * n).sqrt() / T::lit(4.0) * b.m2
        + T::lit(2.0) / T::lit(9.0) * (n * T::lit(4.0) * T::PI()).sqrt() * b.m3
}

/// `(2ℓ+1) · upper` and `(2ℓ+1) · Σ_m cum_4 â_{ℓm}`, the bracket and exact
/// radicands shared by the harmonic-vector bounds, plus the leading-order one.
fn harmonic_radicands<T: Real>(ell: usize, rate: T) -> Result<(T, T, T)> {
    let n = T::from_usize_lossy(2 * ell + 1);
    let upper = cum4_bracket(ell, rate)?.upper;
    let exact = cum4_coefficient_sum(ell, rate)?;
    let l = T::from_usize_lossy(ell);
    let leading = T::lit(1.5) * T::lit(4.0) * T::PI() / rate * T::lit(2.0) / T::PI() * T::lit(GAMMA_3J) * l.ln() / l;
    Ok((n * upper, n * exact, n * leading))
}

/// `d₃(â_ℓ, Z_{2ℓ+1}) ≤ B₃(g; ℓ) √((2ℓ+1) Σ_m cum_4 â_{ℓm})`, with the sum
/// replaced by its upper bracket; the exact-sum form is in
/// `details["exact_form"]`.
pub fn bound_harmonic_d3<T: Real>(ell: usize, rate: T, budget: SmoothnessBudget<T>) -> Result<BoundReport<T>> {
    need_ell(ell, rate)?;
    let b3 = b3_harmonic(ell, &budget);
    let (bracket, exact, leading) = harmonic_radicands(ell, rate)?;
    let mut r = BoundReport::new(Theorem::HarmonicD3, b3 * bracket.sqrt(), rate);
    r.leading_term = Some(b3 * leading.sqrt());
    r.ell = Some(ell);
    r.dimension = Some(2 * ell + 1);
    r.budget = Some(budget);
    r.details.insert("b3", b3);
    r.details.insert("exact_form", b3 * exact.sqrt());
    Ok(r)
}

/// `d₂(â_ℓ, Z_{2ℓ+1}) ≤ B₂ √((2ℓ+1) · upper)` with covariance `Γ = (4π/(2ℓ+1)) I`, where
/// `B₂ = ‖Γ^{-1/2}‖ M₁/√π + (√(2π)/6) ‖Γ^{-1/2}‖ Tr Γ · M₂ = √((2ℓ+1)/4π)(M₁/√π + (√(2π)/6) 4π M₂)`.
pub fn bound_harmonic_d2<T: Real>(ell: usize, rate: T, budget: SmoothnessBudget<T>) -> Result<BoundReport<T>> {
    need_ell(ell, rate)?;
    let four_pi = T::lit(4.0) * T::PI();
    let inv_sqrt = (T::from_usize_lossy(2 * ell + 1) / four_pi).sqrt();
    let a1 = inv_sqrt / T::PI().sqrt() * budget.m1;
    let a2 = (T::lit(2.0) * T::PI()).sqrt() / T::lit(6.0) * inv_sqrt * four_pi * budget.m2;
    let b2 = a1 + a2;
    let (bracket, exact, leading) = harmonic_radicands(ell, rate)?;
    let mut r = BoundReport::new(Theorem::HarmonicD2, b2 * bracket.sqrt(), rate);
    r.leading_term = Some(b2 * leading.sqrt());
    r.ell = Some(ell);
    r.dimension = Some(2 * ell + 1);
    r.budget = Some(budget);
    r.details.insert("a1", a1);
    r.details.insert("b2", b2);
    r.details.insert("exact_form", b2 * exact.sqrt());
    Ok(r)
}

/// The `d`-point vector as a linear image of `â_ℓ`: `B₃(h∘Ψ) ≤ d(2ℓ+1)/(4√π) M₂ +
/// (2√2 d/9)(2ℓ+1) M₃` times the harmonic radicand. `value` is the smaller of
/// this and [`bound_fdd_d3`]; both branches are in `details`.
pub fn bound_fdd_via_harmonics<T: Real>(
    ell: usize,
    rate: T,
    d: usize,
    budget: SmoothnessBudget<T>,
) -> Result<BoundReport<T>> {
    need_ell(ell, rate)?;
    need_dim(d)?;
    let df = T::from_usize_lossy(d);
    let n = T::from_usize_lossy(2 * ell + 1);
    let cap = df * n / (T::lit(4.0) * T::PI().sqrt()) * budget.m2
        + T::lit(2.0) * T::SQRT_2() * df / T::lit(9.0) * n * budget.m3;
    let (bracket, _, leading) = harmonic_radicands(ell, rate)?;
    let harmonic = cap * bracket.sqrt();
    let direct = bound_fdd_d3(ell, rate, d, budget)?;
    let value = harmonic.min(direct.value);
    debug_assert!(value <= harmonic && value <= direct.value);
    let mut r = BoundReport::new(Theorem::FddViaHarmonics, value, rate);
    r.leading_term = Some((cap * leading.sqrt()).min(direct.leading_term.unwrap_or(T::infinity())));
    r.ell = Some(ell);
    r.dimension = Some(d);
    r.budget = Some(budget);
    r.details.insert("cap", cap);
    r.details.insert("harmonic_route", harmonic);
    r.details.insert("direct", direct.value);
    Ok(r)
}

/// `d₃(T, Z) ≤ (1/4 + √(4 E‖T‖²)) √(E‖T‖⁴ − (E‖T‖²)² − 2‖S‖²_HS) = (1/4 + 4√π) √(4π/ν)`
/// in `L²(S²)`. The degree only enters through cancelling terms.
pub fn bound_functional_at<T: Real>(ell: usize, rate: T) -> Result<BoundReport<T>> {
    let nm = norm_moments(ell, rate)?;
    let constant = T::lit(0.25) + (T::lit(4.0) * nm.mean_sq).sqrt();
    let defect = nm.defect();
    let mut r = BoundReport::new(Theorem::Functional, constant * defect.sqrt(), rate);
    r.details.insert("constant", constant);
    r.details.insert("defect", defect);
    Ok(r)
}

/// [`bound_functional_at`] evaluated at `ℓ = 2`.
pub fn bound_functional<T: Real>(rate: T) -> Result<BoundReport<T>> {
    bound_functional_at(2, rate)
}

/// Evaluates `theorem` with the given inputs; `ell` and `d` default to 2 and 1
/// where a theorem ignores them.
pub fn evaluate<T: Real>(
    theorem: Theorem,
    ell: Option<usize>,
    rate: T,
    d: Option<usize>,
    budget: SmoothnessBudget<T>,
) -> Result<BoundReport<T>> {
    let need = |x: Option<usize>, name: &str| x.ok_or_else(|| domain!("theorem {theorem} needs --{name}"));
    match theorem {
        Theorem::OneDimWasserstein => bound_one_dim(need(ell, "ell")?, rate),
        Theorem::OneDimKolmogorov => bound_one_dim_kolmogorov(need(ell, "ell")?, rate),
        Theorem::FddD3 => bound_fdd_d3(need(ell, "ell")?, rate, d.unwrap_or(1), budget),
        Theorem::HarmonicD3 => bound_harmonic_d3(need(ell, "ell")?, rate, budget),
        Theorem::HarmonicD2 => bound_harmonic_d2(need(ell, "ell")?, rate, budget),
        Theorem::FddViaHarmonics => bound_fdd_via_harmonics(need(ell, "ell")?, rate, d.unwrap_or(1), budget),
        Theorem::Functional => match ell {
            Some(l) => bound_functional_at(l, rate),
            None => bound_functional(rate),
        },
    }
}
