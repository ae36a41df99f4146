use super::{check_argument, check_degree, gauss_legendre_rule, quadrature_order};
use crate::{Real, Result};

/// Largest degree accepted by the special-function routines.
pub const MAX_DEGREE: usize = 20_000;

/// Legendre polynomial `P_ℓ(t)` by the Bonnet three-term recurrence.
///
/// ```
/// # use poisson_waves::sphfn::legendre;
/// assert!((legendre(2, 0.5_f64).unwrap() + 0.125).abs() < 1e-15);
/// ```
pub fn legendre<T: Real>(ell: usize, t: T) -> Result<T> {
    check_argument(t)?;
    check_degree(ell)?;
    if t == T::one() {
        return Ok(T::one());
    }
    if t == -T::one() {
        return Ok(if ell.is_multiple_of(2) { T::one() } else { -T::one() });
    }
    Ok(bonnet(ell, t))
}

#[inline]
pub(crate) fn bonnet<T: Real>(ell: usize, t: T) -> T {
    if ell == 0 {
        return T::one();
    }
    let (mut p0, mut p1) = (T::one(), t);
    for k in 1..ell {
        let kf = T::from_usize_lossy(k);
        let p2 = ((kf + kf + T::one()) * t * p1 - kf * p0) / (kf + T::one());
        p0 = p1;
        p1 = p2;
    }
    p1
}

/// `[P_0(t), …, P_ℓ(t)]`.
pub fn legendre_all<T: Real>(ell_max: usize, t: T) -> Result<Vec<T>> {
    check_argument(t)?;
    check_degree(ell_max)?;
    let mut out = Vec::with_capacity(ell_max + 1);
    out.push(T::one());
    if ell_max == 0 {
        return Ok(out);
    }
    out.push(t);
    for k in 1..ell_max {
        let kf = T::from_usize_lossy(k);
        let p = ((kf + kf + T::one()) * t * out[k] - kf * out[k - 1]) / (kf + T::one());
        out.push(p);
    }
    if t.abs() == T::one() {
        for (k, p) in out.iter_mut().enumerate() {
            *p = if t < T::zero() && k % 2 == 1 { -T::one() } else { T::one() };
        }
    }
    Ok(out)
}

const LANES: usize = 16;
const BLOCK: usize = 256;

/// `Σ_i P_ℓ(t_i)`. The recurrence runs on `LANES` arguments at a time held
/// in registers; block totals are combined with compensated summation.
///
/// Arguments are not range-checked.
pub fn legendre_sum(ell: usize, ts: &[f64]) -> f64 {
    if ell == 0 {
        return ts.len() as f64;
    }
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("avx2") {
        // SAFETY: the required CPU feature was detected at runtime.
        return unsafe { legendre_sum_avx2(ell, ts) };
    }
    legendre_sum_kernel(ell, ts)
}

/// Same arithmetic as the portable path (no contraction into FMA), so the
/// result is bit-identical; only the vector width differs.
#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "avx2")]
unsafe fn legendre_sum_avx2(ell: usize, ts: &[f64]) -> f64 {
    legendre_sum_kernel(ell, ts)
}

#[inline(always)]
fn legendre_sum_kernel(ell: usize, ts: &[f64]) -> f64 {
    // Recurrence coefficients depend only on k; hoist them out of the loops.
    let coeffs: Vec<(f64, f64)> = (1..ell)
        .map(|k| {
            let k = k as f64;
            ((2.0 * k + 1.0) / (k + 1.0), k / (k + 1.0))
        })
        .collect();
    let mut total = crate::NeumaierSum::new();
    for block in ts.chunks(BLOCK) {
        let mut lanes = block.chunks_exact(LANES);
        let mut acc = [0.0_f64; LANES];
        for t in lanes.by_ref() {
            let t: &[f64; LANES] = t.try_into().expect("exact chunk");
            let mut p0 = [1.0_f64; LANES];
            let mut p1 = *t;
            for &(a, b) in &coeffs {
                for i in 0..LANES {
                    let p2 = a * t[i] * p1[i] - b * p0[i];
                    p0[i] = p1[i];
                    p1[i] = p2;
                }
            }
            for i in 0..LANES {
                acc[i] += p1[i];
            }
        }
        let mut sum: f64 = acc.iter().sum();
        for &t in lanes.remainder() {
            let (mut p0, mut p1) = (1.0, t);
            for &(a, b) in &coeffs {
                let p2 = a * t * p1 - b * p0;
                p0 = p1;
                p1 = p2;
            }
            sum += p1;
        }
        total.add(sum);
    }
    total.value()
}

/// `∫_0^1 P_ℓ(t)^4 dt`, by Gauss–Legendre quadrature on `[-1, 1]` (exact for
/// the degree-`4ℓ` integrand) and halving, since `P_ℓ^4` is even.
pub fn legendre_quartic_integral<T: Real>(ell: usize) -> Result<T> {
    check_degree(ell)?;
    let rule = gauss_legendre_rule::<T>(quadrature_order(4, ell))?;
    let half = T::lit(0.5);
    Ok(rule.integrate(|t| {
        let p = bonnet(ell, t);
        let p2 = p * p;
        p2 * p2
    }) * half)
}
