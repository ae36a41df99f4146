//! Reproducible random streams and the elementary samplers.
//!
//! Every replicate `r` of an experiment with master seed `s` draws from its
//! own generator, keyed by a SplitMix64 hash of `(s, r)`. A replicate's
//! output therefore depends only on `(s, r)` and never on scheduling.

use crate::Point;
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256PlusPlus;
use std::f64::consts::PI;

pub type StreamRng = Xoshiro256PlusPlus;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generator for stream `index` under master seed `seed`.
pub fn stream(seed: u64, index: u64) -> StreamRng {
    let key = splitmix64(splitmix64(seed) ^ index.rotate_left(32) ^ 0xD1B5_4A32_D192_ED03);
    StreamRng::seed_from_u64(key)
}

/// Uniform on `[-1, 1)`.
#[inline]
pub fn uniform_pm1<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    2.0 * rng.random::<f64>() - 1.0
}

/// Uniform point on `S²`: `z ~ U(-1, 1)`, `φ ~ U(0, 2π)` (Archimedes).
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R) -> Point {
    let z = uniform_pm1(rng);
    let phi = 2.0 * PI * rng.random::<f64>();
    let s = ((1.0 - z) * (1.0 + z)).sqrt();
    let (sp, cp) = phi.sin_cos();
    Point::from_vector(s * cp, s * sp, z).unwrap_or_else(|_| Point::north_pole())
}

/// Poisson variate: sequential inversion below mean 30, Hörmann's PTRS
/// transformed rejection above.
pub fn poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> u64 {
    debug_assert!(mean.is_finite() && mean >= 0.0);
    if mean == 0.0 {
        return 0;
    }
    if mean < 30.0 {
        let u: f64 = rng.random();
        let mut p = (-mean).exp();
        let mut cdf = p;
        let mut k = 0_u64;
        while u > cdf {
            k += 1;
            p *= mean / k as f64;
            cdf += p;
            if p <= 0.0 {
                break;
            }
        }
        return k;
    }
    let smu = mean.sqrt();
    let b = 0.931 + 2.53 * smu;
    let a = -0.059 + 0.02483 * b;
    let inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
    let vr = 0.9277 - 3.6224 / (b - 2.0);
    let log_mu = mean.ln();
    loop {
        let u = rng.random::<f64>() - 0.5;
        let v: f64 = rng.random();
        let us = 0.5 - u.abs();
        let k = ((2.0 * a / us + b) * u + mean + 0.43).floor();
        if us >= 0.07 && v <= vr {
            return k as u64;
        }
        if k < 0.0 || (us < 0.013 && v > us) {
            continue;
        }
        let lhs = v.ln() + inv_alpha.ln() - (a / (us * us) + b).ln();
        let rhs = -mean + k * log_mu - statrs::function::gamma::ln_gamma(k + 1.0);
        if lhs <= rhs {
            return k as u64;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn moments(mean: f64, n: usize) -> (f64, f64) {
        let mut rng = stream(7, mean.to_bits());
        let xs: Vec<f64> = (0..n).map(|_| poisson(mean, &mut rng) as f64).collect();
        let m = xs.iter().sum::<f64>() / n as f64;
        let v = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1) as f64;
        (m, v)
    }

    #[test]
    fn poisson_mean_and_variance() {
        for mean in [0.3, 4.0, 29.9, 30.0, 250.0, 12566.0] {
            let n = 200_000;
            let (m, v) = moments(mean, n);
            let se = (mean / n as f64).sqrt();
            assert!((m - mean).abs() < 5.0 * se, "mean {mean}: {m}");
            let vse = mean * (2.0 / n as f64).sqrt() * (1.0 + 1.0 / mean).sqrt();
            assert!((v - mean).abs() < 6.0 * vse, "var {mean}: {v}");
        }
    }

    #[test]
    fn poisson_small_mean_pmf() {
        let mut rng = stream(11, 0);
        let n = 400_000;
        let zeros = (0..n).filter(|_| poisson(1.5, &mut rng) == 0).count() as f64 / n as f64;
        let p0 = (-1.5_f64).exp();
        assert!((zeros - p0).abs() < 5.0 * (p0 * (1.0 - p0) / n as f64).sqrt());
    }

    #[test]
    fn streams_are_distinct_and_reproducible() {
        let a: u64 = stream(1, 0).random();
        let b: u64 = stream(1, 1).random();
        let c: u64 = stream(2, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, stream(1, 0).random::<u64>());
    }

    #[test]
    fn sphere_points_are_uniform_in_z_and_octant() {
        let mut rng = stream(3, 3);
        let n = 100_000;
        let pts: Vec<Point> = (0..n).map(|_| uniform_sphere(&mut rng)).collect();
        let mean_z = pts.iter().map(|p| p.z()).sum::<f64>() / n as f64;
        assert!(mean_z.abs() < 5.0 * (1.0 / 3.0 / n as f64).sqrt());
        let first_octant = pts.iter().filter(|p| p.xyz().iter().all(|&c| c > 0.0)).count() as f64 / n as f64;
        assert!((first_octant - 0.125).abs() < 5.0 * (0.125 * 0.875 / n as f64).sqrt());
    }
}
