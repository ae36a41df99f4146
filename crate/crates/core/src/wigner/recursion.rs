use super::MAX_L;
use crate::{Error, Real, Result};

/// The 3j symbols `(ℓ1 ℓ2 ℓ3; m1 m2 -m1-m2)` for `ℓ3 = l3_min..=ℓ1+ℓ2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Family<T> {
    pub l1: u32,
    pub l2: u32,
    pub m1: i32,
    pub m2: i32,
    pub l3_min: u32,
    pub values: Vec<T>,
}

impl<T: Real> Family<T> {
    pub fn m3(&self) -> i32 {
        -self.m1 - self.m2
    }

    pub fn l3_max(&self) -> u32 {
        self.l1 + self.l2
    }

    /// Value at `ℓ3`, zero outside the admissible range.
    pub fn get(&self, l3: u32) -> T {
        if l3 < self.l3_min {
            return T::zero();
        }
        self.values.get((l3 - self.l3_min) as usize).copied().unwrap_or(T::zero())
    }

    /// `(ℓ3, value)` pairs.
    pub fn iter(&self) -> impl Iterator<Item = (u32, T)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (self.l3_min + i as u32, v))
    }
}

#[inline]
fn parity_sign<T: Real>(e: i64) -> T {
    if e.rem_euclid(2) == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// Whole `ℓ3`-family by the Schulten–Gordon recursion
///
/// ```text
/// ℓ3 A(ℓ3+1) f(ℓ3+1) + B(ℓ3) f(ℓ3) + (ℓ3+1) A(ℓ3) f(ℓ3-1) = 0,
/// ```
///
/// run upward from `l3_min` and downward from `ℓ1+ℓ2`, spliced at the centre
/// of the classically allowed region, normalized by `Σ (2ℓ3+1) f² = 1` and
/// signed by `sgn f(ℓ1+ℓ2) = (-1)^{ℓ1-ℓ2-m3}`.
///
/// Returns an empty family when `|m1| > ℓ1` or `|m2| > ℓ2`.
pub fn wigner3j_family<T: Real>(l1: u32, l2: u32, m1: i32, m2: i32) -> Result<Family<T>> {
    if l1 > MAX_L || l2 > MAX_L {
        return Err(Error::Capacity(format!("angular momentum exceeds {MAX_L}")));
    }
    let m3 = -i64::from(m1) - i64::from(m2);
    let (il1, il2, im1, im2) = (i64::from(l1), i64::from(l2), i64::from(m1), i64::from(m2));
    let lmin = (il1 - il2).abs().max(m3.abs());
    let lmax = il1 + il2;
    let mut fam = Family { l1, l2, m1, m2, l3_min: lmin as u32, values: Vec::new() };
    if im1.abs() > il1 || im2.abs() > il2 {
        fam.l3_min = 0;
        return Ok(fam);
    }
    let n = (lmax - lmin + 1) as usize;
    let top_sign: T = parity_sign(il1 - il2 - m3);

    if n == 1 {
        fam.values.push(top_sign / T::from_i64(2 * lmax + 1).unwrap().sqrt());
        return Ok(fam);
    }

    let a = |j: i64| -> T {
        let f1 = j * j - (il1 - il2) * (il1 - il2);
        let f2 = (il1 + il2 + 1) * (il1 + il2 + 1) - j * j;
        let f3 = j * j - m3 * m3;
        (T::from_i64(f1).unwrap() * T::from_i64(f2).unwrap() * T::from_i64(f3).unwrap()).sqrt()
    };
    let b = |j: i64| -> T {
        let inner = il1 * (il1 + 1) * m3 - il2 * (il2 + 1) * m3 - j * (j + 1) * (im2 - im1);
        -T::from_i64(2 * j + 1).unwrap() * T::from_i64(inner).unwrap()
    };
    let jf = |j: i64| T::from_i64(j).unwrap();

    // Splice index: centre of the oscillatory region, where B² < 4 j(j+1) A(j) A(j+1).
    let allowed: Vec<usize> = (1..n - 1)
        .filter(|&i| {
            let j = lmin + i as i64;
            let bj = b(j);
            bj * bj < T::lit(4.0) * jf(j) * jf(j + 1) * a(j) * a(j + 1)
        })
        .collect();
    let split = if allowed.is_empty() { None } else { Some(allowed[allowed.len() / 2]) };

    let big = T::max_value().sqrt().sqrt();
    let small = big.recip();

    // Upward sweep.
    let mut fwd = vec![T::zero(); n];
    if lmin == 0 {
        // ℓ1 = ℓ2, m3 = 0: the first two members are known in closed form.
        let s: T = parity_sign(il1 - im1);
        let l = jf(il1);
        fwd[0] = s / (l + l + T::one()).sqrt();
        fwd[1] = s * jf(im1) / (l * (l + T::one()) * (l + l + T::one())).sqrt();
    } else {
        fwd[0] = T::one();
        fwd[1] = -b(lmin) / (jf(lmin) * a(lmin + 1));
    }
    let fwd_end = match split {
        Some(k) => (k + 1).min(n - 1),
        None => n - 1,
    };
    let mut peak = None;
    for i in 1..fwd_end {
        let j = lmin + i as i64;
        let next = -(b(j) * fwd[i] + jf(j + 1) * a(j) * fwd[i - 1]) / (jf(j) * a(j + 1));
        fwd[i + 1] = next;
        if next.abs() > big {
            fwd[..=i + 1].iter_mut().for_each(|v| *v = *v * small);
        }
        if split.is_none() && peak.is_none() && fwd[i + 1].abs() < fwd[i].abs() {
            peak = Some(i);
            break;
        }
    }
    let k = split.or(peak).unwrap_or(n - 1);

    let mut out = fwd;
    if k < n - 1 {
        let mut bwd = vec![T::zero(); n];
        bwd[n - 1] = T::one();
        bwd[n - 2] = -b(lmax) / (jf(lmax + 1) * a(lmax));
        let lo = k.saturating_sub(1);
        let mut i = n - 2;
        while i > lo {
            let j = lmin + i as i64;
            let prev = -(jf(j) * a(j + 1) * bwd[i + 1] + b(j) * bwd[i]) / (jf(j + 1) * a(j));
            bwd[i - 1] = prev;
            if prev.abs() > big {
                bwd[i - 1..].iter_mut().for_each(|v| *v = *v * small);
            }
            i -= 1;
        }
        // Least-squares scale over a three-point window around the splice.
        let (mut num, mut den) = (T::zero(), T::zero());
        for w in k.saturating_sub(1)..=(k + 1).min(n - 1) {
            num = num + out[w] * bwd[w];
            den = den + bwd[w] * bwd[w];
        }
        let lambda = num / den;
        for w in (k + 1)..n {
            out[w] = lambda * bwd[w];
        }
        // Rescaling may leave the upward part tiny relative to the downward part.
        let peak_abs = out.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        if peak_abs > T::zero() {
            out.iter_mut().for_each(|v| *v = *v / peak_abs);
        }
    }

    let mut norm = T::zero();
    let mut comp = T::zero();
    for (i, v) in out.iter().enumerate() {
        let y = T::from_i64(2 * (lmin + i as i64) + 1).unwrap() * *v * *v - comp;
        let t = norm + y;
        comp = (t - norm) - y;
        norm = t;
    }
    let mut scale = norm.sqrt().recip();
    if (out[n - 1] < T::zero()) != (top_sign < T::zero()) {
        scale = -scale;
    }
    out.iter_mut().for_each(|v| *v = *v * scale);
    fam.values = out;
    Ok(fam)
}

/// `Π_{k=1}^{x} (2k-1)/(2k)` for `x = 0..=n`.
fn half_ratios<T: Real>(n: usize) -> Vec<T> {
    let mut r = Vec::with_capacity(n + 1);
    r.push(T::one());
    for k in 1..=n {
        let kf = T::from_usize_lossy(k);
        let prev = r[k - 1];
        r.push(prev * (kf + kf - T::one()) / (kf + kf));
    }
    r
}

#[inline]
fn zero_from_ratios<T: Real>(r: &[T], l1: u32, l2: u32, l3: u32) -> T {
    let sum = l1 + l2 + l3;
    if sum % 2 == 1 || l3 > l1 + l2 || l3 < l1.abs_diff(l2) {
        return T::zero();
    }
    let g = (sum / 2) as usize;
    let (a, b, c) = (g - l1 as usize, g - l2 as usize, g - l3 as usize);
    let mag = (r[a] * r[b] * r[c] / (T::from_usize_lossy(2 * g + 1) * r[g])).sqrt();
    if g.is_multiple_of(2) {
        mag
    } else {
        -mag
    }
}

/// `(ℓ1 ℓ2 ℓ3; 0 0 0)` in closed form,
/// `(-1)^g √(R(g-ℓ1) R(g-ℓ2) R(g-ℓ3) / ((2g+1) R(g)))` with `2g = Σℓ_i` and
/// `R(x) = Π_{k≤x} (2k-1)/(2k)`; free of factorial overflow.
pub fn wigner3j_zero(l1: u32, l2: u32, l3: u32) -> f64 {
    let g = ((l1 + l2 + l3) / 2) as usize;
    zero_from_ratios(&half_ratios::<f64>(g), l1, l2, l3)
}

/// `[(ℓ ℓ L; 0 0 0) for L = 0..=2ℓ]`.
pub fn central_row<T: Real>(ell: u32) -> Result<Vec<T>> {
    if ell > MAX_L {
        return Err(Error::Capacity(format!("angular momentum {ell} exceeds {MAX_L}")));
    }
    let r = half_ratios::<T>(2 * ell as usize);
    Ok((0..=2 * ell).map(|l| zero_from_ratios(&r, ell, ell, l)).collect())
}
