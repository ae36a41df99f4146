//! Exact 3j and Clebsch–Gordan coefficients in the form `q √n`, `q` rational
//! and `n` a squarefree positive integer.

use super::{Cg, ThreeJ};
use crate::{Error, Result};
use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::collections::BTreeMap;
use std::fmt;

/// Largest angular momentum accepted by the exact path.
pub const MAX_EXACT_L: u32 = 400;

/// The number `coefficient · √radicand`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExactValue {
    pub coefficient: BigRational,
    /// Squarefree; `1` when the value is rational.
    pub radicand: BigUint,
}

impl ExactValue {
    pub fn zero() -> Self {
        Self { coefficient: BigRational::zero(), radicand: BigUint::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.coefficient.is_zero()
    }

    /// The square of the value, exactly.
    pub fn square(&self) -> BigRational {
        let r = BigRational::from_integer(BigInt::from(self.radicand.clone()));
        &self.coefficient * &self.coefficient * r
    }

    /// Nearest double, computed from the exact square so huge radicands do
    /// not overflow.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let mag = self.square().to_f64().unwrap_or(f64::NAN).sqrt();
        if self.coefficient.is_negative() {
            -mag
        } else {
            mag
        }
    }

    /// Builds `s √(Π p^{e_p})` and pulls square factors out of the root.
    fn from_parts(s: BigRational, exponents: &BTreeMap<u64, i64>) -> Self {
        if s.is_zero() {
            return Self::zero();
        }
        let mut num = BigInt::one();
        let mut den = BigInt::one();
        let mut radicand = BigUint::one();
        for (&p, &e) in exponents {
            let (half, rem) = (e.div_euclid(2), e.rem_euclid(2));
            let pp = BigInt::from(p).pow(half.unsigned_abs() as u32);
            if half >= 0 {
                num *= pp;
            } else {
                den *= pp;
            }
            if rem == 1 {
                radicand *= p;
            }
        }
        Self { coefficient: s * BigRational::new(num, den), radicand }
    }
}

impl fmt::Display for ExactValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.radicand.is_one() || self.is_zero() {
            write!(f, "{}", self.coefficient)
        } else {
            write!(f, "{}*sqrt({})", self.coefficient, self.radicand)
        }
    }
}

fn primes_up_to(n: u64) -> Vec<u64> {
    let n = n as usize;
    let mut sieve = vec![true; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if sieve[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
    }
    out
}

/// Exponent of `p` in `n!` (Legendre's formula).
fn factorial_valuation(mut n: u64, p: u64) -> i64 {
    let mut e = 0;
    while n > 0 {
        n /= p;
        e += n as i64;
    }
    e
}

fn factorial_table(n: usize) -> Vec<BigInt> {
    let mut t = Vec::with_capacity(n + 1);
    t.push(BigInt::one());
    for k in 1..=n {
        let next = &t[k - 1] * BigInt::from(k);
        t.push(next);
    }
    t
}

/// `(ℓ1 ℓ2 ℓ3; m1 m2 m3)` exactly, by Racah's formula
///
/// ```text
/// (-1)^{ℓ1-ℓ2-m3} √Δ √(Π (ℓi±mi)!) Σ_k (-1)^k / [k! (ℓ3-ℓ2+k+m1)! (ℓ3-ℓ1+k-m2)!
///                                     (ℓ1+ℓ2-ℓ3-k)! (ℓ1-k-m1)! (ℓ2-k+m2)!]
/// ```
///
/// with `Δ = (ℓ1+ℓ2-ℓ3)! (ℓ1-ℓ2+ℓ3)! (-ℓ1+ℓ2+ℓ3)! / (ℓ1+ℓ2+ℓ3+1)!`.
pub fn wigner3j_exact(key: ThreeJ) -> Result<ExactValue> {
    if let Some(l) = key.l.iter().find(|&&l| l > MAX_EXACT_L) {
        return Err(Error::Capacity(format!("exact path limited to ℓ ≤ {MAX_EXACT_L}, got {l}")));
    }
    if !key.selection_rules_hold() {
        return Ok(ExactValue::zero());
    }
    let [l1, l2, l3] = key.l.map(i64::from);
    let [m1, m2, m3] = key.m.map(i64::from);
    let big_j = (l1 + l2 + l3) as u64;
    let fact = factorial_table(big_j as usize + 1);
    let f = |n: i64| &fact[n as usize];

    let kmin = 0.max(l2 - l3 - m1).max(l1 - l3 + m2);
    let kmax = (l1 + l2 - l3).min(l1 - m1).min(l2 + m2);
    let mut s = BigRational::zero();
    for k in kmin..=kmax {
        let den = f(k) * f(l3 - l2 + k + m1) * f(l3 - l1 + k - m2) * f(l1 + l2 - l3 - k)
            * f(l1 - k - m1)
            * f(l2 - k + m2);
        let term = BigRational::new(BigInt::one(), den);
        if k.is_even() {
            s += term;
        } else {
            s -= term;
        }
    }
    if (l1 - l2 - m3).rem_euclid(2) == 1 {
        s = -s;
    }

    let numerator_args = [
        l1 + l2 - l3,
        l1 - l2 + l3,
        -l1 + l2 + l3,
        l1 + m1,
        l1 - m1,
        l2 + m2,
        l2 - m2,
        l3 + m3,
        l3 - m3,
    ];
    let mut exponents = BTreeMap::new();
    for p in primes_up_to(big_j + 1) {
        let e: i64 = numerator_args.iter().map(|&n| factorial_valuation(n as u64, p)).sum::<i64>()
            - factorial_valuation(big_j + 1, p);
        if e != 0 {
            exponents.insert(p, e);
        }
    }
    Ok(ExactValue::from_parts(s, &exponents))
}

/// `C^{ℓ m}_{ℓ1 m1; ℓ2 m2}` exactly.
pub fn clebsch_gordan_exact(key: Cg) -> Result<ExactValue> {
    let (tj, _) = key.to_three_j();
    let v = wigner3j_exact(tj)?;
    if v.is_zero() {
        return Ok(v);
    }
    // Multiply by (-1)^{ℓ1-ℓ2+m} √(2ℓ+1) and re-extract squares.
    let mut exponents = BTreeMap::new();
    for p in factorize(&v.radicand).into_iter().chain(factorize(&BigUint::from(2 * key.l + 1))) {
        *exponents.entry(p.0).or_insert(0) += p.1;
    }
    let e = i64::from(key.l1) - i64::from(key.l2) + i64::from(key.m);
    let s = if e.rem_euclid(2) == 0 { v.coefficient } else { -v.coefficient };
    Ok(ExactValue::from_parts(s, &exponents))
}

/// Trial-division factorization; arguments here only have small prime factors.
fn factorize(n: &BigUint) -> Vec<(u64, i64)> {
    let mut n = n.clone();
    let mut out = Vec::new();
    let mut p = 2_u64;
    while !n.is_one() {
        let bp = BigUint::from(p);
        let mut e = 0;
        while (&n % &bp).is_zero() {
            n /= &bp;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
        p += 1;
        if BigUint::from(p) * BigUint::from(p) > n && !n.is_one() {
            out.push((n.to_u64().expect("prime factor fits u64"), 1));
            break;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_values() {
        let v = wigner3j_exact(ThreeJ::new(1, 1, 2, 0, 0, 0)).unwrap();
        assert_eq!(v.to_string(), "1/15*sqrt(30)");
        assert!((v.to_f64() - (2.0_f64 / 15.0).sqrt()).abs() < 1e-16);
        let c = clebsch_gordan_exact(Cg::new(1, 0, 1, 0, 0, 0)).unwrap();
        assert_eq!(c.to_string(), "-1/3*sqrt(3)");
        let c = clebsch_gordan_exact(Cg::new(1, 1, 1, -1, 2, 0)).unwrap();
        assert_eq!(c.to_string(), "1/6*sqrt(6)");
        let half = clebsch_gordan_exact(Cg::new(1, 1, 1, 1, 2, 2)).unwrap();
        assert_eq!(half.to_string(), "1");
    }

    #[test]
    fn selection_rule_zero() {
        assert!(wigner3j_exact(ThreeJ::new(1, 1, 3, 0, 0, 0)).unwrap().is_zero());
        assert!(wigner3j_exact(ThreeJ::new(2, 2, 2, 1, 1, 0)).unwrap().is_zero());
        assert!(wigner3j_exact(ThreeJ::new(1, 1, 1, 0, 0, 0)).unwrap().is_zero());
    }
}
