use super::{central_row, Wigner};
use crate::Result;
use num_complex::Complex64;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// `∫_{S²} Y_{ℓμ1} Y_{ℓμ2} Y_{ℓμ3} Y_{ℓμ4}` for complex harmonics with the
/// Condon–Shortley phase:
///
/// ```text
/// Σ_L (2ℓ+1)²/(4π(2L+1)) (C^{L0}_{ℓ0ℓ0})² C^{LM}_{ℓμ1ℓμ2} C^{L,-M}_{ℓμ3ℓμ4} (-1)^M,  M = μ1+μ2.
/// ```
pub fn gaunt_complex_quartic(ell: u32, mu: [i32; 4]) -> Result<f64> {
    let w = Wigner::global();
    if mu.iter().any(|m| m.unsigned_abs() > ell) || mu.iter().sum::<i32>() != 0 {
        return Ok(0.0);
    }
    let big_m = mu[0] + mu[1];
    let central = central_row::<f64>(ell)?;
    let f12 = w.family(ell, ell, mu[0], mu[1])?;
    let f34 = w.family(ell, ell, mu[2], mu[3])?;
    // In 3j form each CG pair contributes (2L+1) and the signs (-1)^M cancel.
    let sign = if big_m.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    let l_lo = big_m.unsigned_abs();
    let mut acc = crate::NeumaierSum::new();
    for l in (l_lo..=2 * ell).filter(|l| l % 2 == 0) {
        let z = central[l as usize];
        acc.add(f64::from(2 * l + 1) * z * z * f12.get(l) * f34.get(l));
    }
    let n = f64::from(2 * ell + 1);
    Ok(sign * n * n / (4.0 * PI) * acc.value())
}

/// Coefficients of a real harmonic in the complex basis:
/// `Y^r_m = Σ u_μ Y_μ`.
fn real_to_complex(m: i32) -> Vec<(i32, Complex64)> {
    let mu = m.abs();
    let parity = if mu % 2 == 0 { 1.0 } else { -1.0 };
    match m.signum() {
        0 => vec![(0, Complex64::new(1.0, 0.0))],
        1 => vec![
            (mu, Complex64::new(parity * FRAC_1_SQRT_2, 0.0)),
            (-mu, Complex64::new(FRAC_1_SQRT_2, 0.0)),
        ],
        // ((-1)^μ Y_μ - Y_{-μ}) / (i√2)
        _ => vec![
            (mu, Complex64::new(0.0, -parity * FRAC_1_SQRT_2)),
            (-mu, Complex64::new(0.0, FRAC_1_SQRT_2)),
        ],
    }
}

/// `∫_{S²} Y_{ℓm1} Y_{ℓm2} Y_{ℓm3} Y_{ℓm4}` for the real harmonics of
/// [`crate::sphfn`], obtained from [`gaunt_complex_quartic`] through the
/// unitary change of basis.
pub fn gaunt_quartic(ell: u32, m: [i32; 4]) -> Result<f64> {
    let basis: Vec<_> = m.iter().map(|&mi| real_to_complex(mi)).collect();
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, ua) in &basis[0] {
        for &(b, ub) in &basis[1] {
            for &(c, uc) in &basis[2] {
                for &(d, ud) in &basis[3] {
                    if a + b + c + d != 0 {
                        continue;
                    }
                    acc += ua * ub * uc * ud * gaunt_complex_quartic(ell, [a, b, c, d])?;
                }
            }
        }
    }
    Ok(acc.re)
}
