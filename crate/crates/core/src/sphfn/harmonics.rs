use super::{check_argument, check_degree, SpherePoint};
use crate::error::domain;
use crate::{Real, Result};

/// Runs the fully normalized associated Legendre recurrence for fixed order `m`
/// over `ℓ = m..=ell_max`, calling `visit(ℓ, v, k)` with the value `v · S^{-k}`,
/// where `S` is a large power that keeps the sectoral start `∝ (1-t²)^{m/2}`
/// from underflowing at high order.
fn column_scaled<T: Real>(m: usize, ell_max: usize, t: T, mut visit: impl FnMut(usize, T, i32)) {
    let big = T::max_value().sqrt().sqrt();
    let small = big.recip();
    let s = ((T::one() - t) * (T::one() + t)).sqrt();
    let mut pmm = (T::lit(4.0) * T::PI()).sqrt().recip();
    let mut k = 0_i32;
    for i in 1..=m {
        let i = T::from_usize_lossy(i);
        pmm = pmm * ((i + i + T::one()) / (i + i)).sqrt() * s;
        if pmm != T::zero() && pmm.abs() < small {
            pmm = pmm * big;
            k += 1;
        }
    }
    visit(m, pmm, k);
    if ell_max == m {
        return;
    }
    let mf = T::from_usize_lossy(m);
    let mut prev = pmm;
    let mut cur = (mf + mf + T::lit(3.0)).sqrt() * t * pmm;
    visit(m + 1, cur, k);
    let m2 = mf * mf;
    for l in (m + 2)..=ell_max {
        let lf = T::from_usize_lossy(l);
        let l1 = lf - T::one();
        let a = ((T::lit(4.0) * lf * lf - T::one()) / (lf * lf - m2)).sqrt();
        let b = ((l1 * l1 - m2) / (T::lit(4.0) * l1 * l1 - T::one())).sqrt();
        let next = a * (t * cur - b * prev);
        prev = cur;
        cur = next;
        if k > 0 && cur.abs() > T::one() {
            cur = cur * small;
            prev = prev * small;
            k -= 1;
        }
        visit(l, cur, k);
    }
}

#[inline]
fn unscale<T: Real>(mut v: T, k: i32) -> T {
    let small = T::max_value().sqrt().sqrt().recip();
    for _ in 0..k {
        v = v * small;
        if v == T::zero() {
            break;
        }
    }
    v
}

/// `N_{ℓm} P_ℓ^m(t)` for `ℓ = m..=ell_max`, where
/// `N_{ℓm} = √((2ℓ+1)/4π · (ℓ-m)!/(ℓ+m)!)` and `P_ℓ^m` carries no
/// Condon–Shortley phase.
pub fn normalized_legendre_column<T: Real>(m: usize, ell_max: usize, t: T) -> Result<Vec<T>> {
    check_argument(t)?;
    check_degree(ell_max)?;
    if m > ell_max {
        return Err(domain!("order {m} exceeds degree {ell_max}"));
    }
    let mut out = Vec::with_capacity(ell_max - m + 1);
    column_scaled(m, ell_max, t, |_, v, k| out.push(unscale(v, k)));
    Ok(out)
}

/// `N_{ℓm} P_ℓ^m(t)`; see [`normalized_legendre_column`].
pub fn assoc_legendre_normalized<T: Real>(ell: usize, m: usize, t: T) -> Result<T> {
    check_argument(t)?;
    check_degree(ell)?;
    if m > ell {
        return Err(domain!("order {m} exceeds degree {ell}"));
    }
    let mut last = T::zero();
    column_scaled(m, ell, t, |_, v, k| last = unscale(v, k));
    Ok(last)
}

/// Associated Legendre function `P_ℓ^m(t) = (1-t²)^{m/2} d^m/dt^m P_ℓ(t)`,
/// without the Condon–Shortley phase.
///
/// The unnormalized function exceeds the `f64` range for large `ℓ` and `m`;
/// such values are returned as `±∞` rather than `NaN`.
pub fn assoc_legendre<T: Real>(ell: usize, m: usize, t: T) -> Result<T> {
    check_argument(t)?;
    check_degree(ell)?;
    if m > ell {
        return Err(domain!("order {m} exceeds degree {ell}"));
    }
    let (mut v, mut k) = (T::zero(), 0);
    column_scaled(m, ell, t, |_, vv, kk| {
        v = vv;
        k = kk;
    });
    if v == T::zero() {
        return Ok(v);
    }
    // log √(4π (ℓ+m)! / ((2ℓ+1)(ℓ-m)!))
    let log_ratio = ((ell - m + 1)..=(ell + m))
        .map(|j| T::from_usize_lossy(j).ln())
        .fold(T::zero(), |a, b| a + b);
    let four_pi = T::lit(4.0) * T::PI();
    let log_norm = T::lit(0.5) * (four_pi.ln() - T::from_usize_lossy(2 * ell + 1).ln() + log_ratio);
    if k == 0 {
        let f = log_norm.exp();
        if f.is_finite() {
            return Ok(v * f);
        }
    }
    let big = T::max_value().sqrt().sqrt();
    let mag = (v.abs().ln() - T::from_i32(k).unwrap() * big.ln() + log_norm).exp();
    Ok(if v < T::zero() { -mag } else { mag })
}

/// All real spherical harmonics of degree `ℓ` at `point`, indexed by `m + ℓ`
/// for `m = -ℓ..=ℓ`. Cost is `O(ℓ²)`.
pub fn sph_harm_row<T: Real>(ell: usize, point: &SpherePoint<T>) -> Result<Vec<T>> {
    check_degree(ell)?;
    let t = point.z();
    let phi = point.phi();
    let sqrt2 = T::SQRT_2();
    let mut row = vec![T::zero(); 2 * ell + 1];
    for m in 0..=ell {
        let mut p = T::zero();
        column_scaled(m, ell, t, |l, v, k| {
            if l == ell {
                p = unscale(v, k);
            }
        });
        if m == 0 {
            row[ell] = p;
        } else {
            let (s, c) = (T::from_usize_lossy(m) * phi).sin_cos();
            row[ell + m] = sqrt2 * p * c;
            row[ell - m] = sqrt2 * p * s;
        }
    }
    Ok(row)
}

/// Real spherical harmonic `Y_{ℓm}` at `point`.
pub fn real_sph_harm<T: Real>(ell: usize, m: i64, point: &SpherePoint<T>) -> Result<T> {
    check_degree(ell)?;
    let am = m.unsigned_abs() as usize;
    if am > ell {
        return Err(domain!("order {m} exceeds degree {ell}"));
    }
    let p = assoc_legendre_normalized(ell, am, point.z())?;
    if m == 0 {
        return Ok(p);
    }
    let (s, c) = (T::from_usize_lossy(am) * point.phi()).sin_cos();
    Ok(T::SQRT_2() * p * if m > 0 { c } else { s })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_values() {
        assert!((assoc_legendre(1, 1, 0.0_f64).unwrap() - 1.0).abs() < 1e-14);
        assert!((assoc_legendre(2, 2, 0.0_f64).unwrap() - 3.0).abs() < 1e-13);
        // P_3^1 = (3/2)(5t²-1)√(1-t²)
        let t: f64 = 0.3;
        let want = 1.5 * (5.0 * t * t - 1.0) * (1.0 - t * t).sqrt();
        assert!((assoc_legendre(3, 1, t).unwrap() - want).abs() < 1e-14);
        // P_4^3 = 105 t (1-t²)^{3/2}
        let want = 105.0 * t * (1.0 - t * t).powf(1.5);
        assert!((assoc_legendre(4, 3, t).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn raw_overflow_is_infinite_not_nan() {
        let v = assoc_legendre(3000, 2000, 0.2_f64).unwrap();
        assert!(!v.is_nan());
        assert!(v.is_infinite() || v.is_finite());
        assert_eq!(assoc_legendre(300, 5, 1.0_f64).unwrap(), 0.0);
    }

    #[test]
    fn high_order_does_not_underflow_prematurely() {
        // θ where the order-600 start underflows plainly but P̄_{2000}^{600} is ordinary.
        let t: f64 = (1.0 - 0.3_f64 * 0.3).sqrt();
        let v = assoc_legendre_normalized(2000, 600, t).unwrap();
        assert!(v.is_finite());
        assert!(v.abs() > 1e-30, "{v}");
    }

    #[test]
    fn row_matches_single_evaluations() {
        let p = SpherePoint::from_angles(1.1_f64, 4.0).unwrap();
        let row = sph_harm_row(6, &p).unwrap();
        for m in -6..=6_i64 {
            let y = real_sph_harm(6, m, &p).unwrap();
            assert!((row[(m + 6) as usize] - y).abs() < 1e-14);
        }
    }

    #[test]
    fn low_degree_closed_forms() {
        let p = SpherePoint::from_angles(0.7_f64, 2.3).unwrap();
        let [x, y, z] = p.xyz();
        let c1 = (3.0 / (4.0 * std::f64::consts::PI)).sqrt();
        assert!((real_sph_harm(1, 0, &p).unwrap() - c1 * z).abs() < 1e-15);
        assert!((real_sph_harm(1, 1, &p).unwrap() - c1 * x).abs() < 1e-15);
        assert!((real_sph_harm(1, -1, &p).unwrap() - c1 * y).abs() < 1e-15);
        let c2 = 0.5 * (15.0 / std::f64::consts::PI).sqrt();
        assert!((real_sph_harm(2, -2, &p).unwrap() - c2 * x * y).abs() < 1e-14);
    }
}
