use super::SampleSet;
use crate::error::domain;
use crate::moments::{analytic_report, norm_moments, CumulantReport, Target};
use crate::{neumaier, NeumaierSum, Point, Result};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::erf::erfc;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::ops::Range;

/// Smallest sample for which standard errors are reported.
pub const MIN_REPLICATES_FOR_SE: usize = 1000;
/// Smallest number of batches for batch-means standard errors.
pub const MIN_BATCHES: usize = 20;

/// Unbiased k-statistics `k₁..k₄` with batch-means standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KStatistics {
    pub n: usize,
    pub k: [f64; 4],
    pub se: [f64; 4],
    pub batches: usize,
}

fn raw_k(xs: &[f64]) -> [f64; 4] {
    let n = xs.len() as f64;
    if xs.iter().all(|&x| x == xs[0]) {
        return [xs[0], 0.0, 0.0, 0.0];
    }
    let mean = neumaier(xs.iter().copied()) / n;
    let (mut s2, mut s3, mut s4) = (NeumaierSum::new(), NeumaierSum::new(), NeumaierSum::new());
    for &x in xs {
        let d = x - mean;
        let d2 = d * d;
        s2.add(d2);
        s3.add(d2 * d);
        s4.add(d2 * d2);
    }
    let (m2, m3, m4) = (s2.value() / n, s3.value() / n, s4.value() / n);
    let k2 = n / (n - 1.0) * m2;
    let k3 = n * n / ((n - 1.0) * (n - 2.0)) * m3;
    let k4 = n * n * ((n + 1.0) * m4 - 3.0 * (n - 1.0) * m2 * m2) / ((n - 1.0) * (n - 2.0) * (n - 3.0));
    [mean, k2, k3, k4]
}

fn batch_ranges(n: usize, batches: usize) -> impl Iterator<Item = Range<usize>> {
    (0..batches).map(move |b| (b * n / batches)..((b + 1) * n / batches))
}

fn check_batching(n: usize, batches: usize) -> Result<()> {
    if n < MIN_REPLICATES_FOR_SE {
        return Err(domain!("at least {MIN_REPLICATES_FOR_SE} replicates needed for standard errors, got {n}"));
    }
    if batches < MIN_BATCHES {
        return Err(domain!("at least {MIN_BATCHES} batches required"));
    }
    Ok(())
}

fn spread(values: &[f64]) -> f64 {
    let b = values.len() as f64;
    let mean = neumaier(values.iter().copied()) / b;
    (neumaier(values.iter().map(|v| (v - mean).powi(2))) / (b - 1.0)).sqrt() / b.sqrt()
}

/// A statistic over rows `0..n` and its batch-means standard error: the
/// spread of the statistic over `batches` contiguous blocks, divided by
/// `√batches`.
pub fn batch_mean_se(n: usize, batches: usize, stat: impl Fn(Range<usize>) -> f64 + Sync) -> Result<(f64, f64)> {
    check_batching(n, batches)?;
    let per: Vec<f64> = batch_ranges(n, batches).collect::<Vec<_>>().into_par_iter().map(&stat).collect();
    Ok((stat(0..n), spread(&per)))
}

pub fn k_statistics_of(xs: &[f64], batches: usize) -> Result<KStatistics> {
    check_batching(xs.len(), batches)?;
    let per: Vec<[f64; 4]> =
        batch_ranges(xs.len(), batches).collect::<Vec<_>>().into_par_iter().map(|r| raw_k(&xs[r])).collect();
    let mut se = [0.0; 4];
    for (j, s) in se.iter_mut().enumerate() {
        *s = spread(&per.iter().map(|k| k[j]).collect::<Vec<_>>());
    }
    Ok(KStatistics { n: xs.len(), k: raw_k(xs), se, batches })
}

/// k-statistics of a scalar sample.
pub fn k_statistics(s: &SampleSet) -> Result<KStatistics> {
    if !s.is_scalar() {
        return Err(domain!("k-statistics need a scalar target"));
    }
    k_statistics_of(&s.values, s.config.batches)
}

/// Monte Carlo side of the target's fourth-cumulant comparison:
///
/// * scalar targets: `k₄`;
/// * `coefficient_sum` / `fdd`: `Σ_j k₄(column j)`;
/// * `norm_squared`: `k₂(‖T‖²) − 2‖S‖²_HS`, an unbiased estimate of `4π/ν`.
pub fn cumulant_report(s: &SampleSet) -> Result<CumulantReport> {
    let cfg = &s.config;
    let mut report = analytic_report(cfg.target, cfg.ell, cfg.rate, s.dim)?;
    let n = s.rows();
    let (est, se) = match cfg.target {
        Target::PointValue | Target::Coefficient(_) => {
            let k = k_statistics(s)?;
            (k.k[3], k.se[3])
        }
        Target::NormSquared => {
            let hs2 = 2.0 * norm_moments(cfg.ell, cfg.rate)?.hs_sq;
            batch_mean_se(n, cfg.batches, |r| raw_k(&s.values[r])[1] - hs2)?
        }
        Target::CoefficientSum | Target::Fdd => {
            let cols: Vec<Vec<f64>> = (0..s.dim).map(|j| s.column(j)).collect();
            batch_mean_se(n, cfg.batches, |r| neumaier(cols.iter().map(|c| raw_k(&c[r.clone()])[3])))?
        }
    };
    report.mc_estimate = Some(est);
    report.mc_stderr = Some(se);
    Ok(report)
}

#[inline]
fn phi_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

#[inline]
fn phi_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `∫_{-∞}^x Φ = xΦ(x) + φ(x)`.
#[inline]
fn g(x: f64) -> f64 {
    x * phi_cdf(x) + phi_pdf(x)
}

/// `∫_a^b |p − Φ(x)| dx` with `c = Φ⁻¹(p)`.
fn segment(a: f64, b: f64, p: f64, c: f64) -> f64 {
    let above = |a: f64, b: f64| (g(b) - g(a)) - p * (b - a);
    if c <= a {
        above(a, b)
    } else if c >= b {
        -above(a, b)
    } else {
        -above(a, c) + above(c, b)
    }
}

/// `W₁(F_n, N(0,1)) = ∫ |F_n − Φ|`, integrated exactly piece by piece between
/// order statistics (splitting at `Φ⁻¹(i/n)` where the integrand changes sign).
pub fn w1_to_standard_normal(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() || xs.iter().any(|x| !x.is_finite()) {
        return Err(domain!("W1 needs a nonempty finite sample"));
    }
    let mut v = xs.to_vec();
    v.par_sort_unstable_by(f64::total_cmp);
    let n = v.len();
    let normal = Normal::standard();
    let first = v[0];
    let last = v[n - 1];
    let mut acc = NeumaierSum::new();
    acc.add(g(first));
    acc.add(phi_pdf(last) - last * 0.5 * erfc(last * FRAC_1_SQRT_2));
    let pieces: Vec<f64> = (1..n)
        .into_par_iter()
        .with_min_len(4096)
        .map(|i| {
            let (a, b) = (v[i - 1], v[i]);
            if a == b {
                return 0.0;
            }
            let p = i as f64 / n as f64;
            segment(a, b, p, normal.inverse_cdf(p))
        })
        .collect();
    pieces.iter().for_each(|&x| acc.add(x));
    Ok(acc.value().max(0.0))
}

/// [`w1_to_standard_normal`] for a scalar sample; no rescaling is applied.
pub fn empirical_w1_to_standard_normal(s: &SampleSet) -> Result<f64> {
    if !s.is_scalar() {
        return Err(domain!("W1 is defined here for scalar targets only"));
    }
    w1_to_standard_normal(&s.values)
}

/// Distribution of the W₁ estimator on exact `N(0,1)` samples of size `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloorCalibration {
    pub n: usize,
    pub runs: usize,
    pub seed: u64,
    pub mean: f64,
    pub sd: f64,
    /// `mean + 4 sd`.
    pub floor: f64,
}

/// Calibrates the statistical floor of the W₁ estimator from `runs`
/// synthetic standard normal samples of size `n`.
pub fn calibrate_w1_floor(n: usize, runs: usize, seed: u64) -> Result<FloorCalibration> {
    if n == 0 || runs < 2 {
        return Err(domain!("floor calibration needs n ≥ 1 and at least 2 runs"));
    }
    let w: Vec<f64> = (0..runs)
        .map(|k| {
            let mut rng = super::rng::stream(seed ^ 0x5EED_F100_0000_0000, k as u64);
            let xs: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
            w1_to_standard_normal(&xs)
        })
        .collect::<Result<_>>()?;
    let mean = neumaier(w.iter().copied()) / runs as f64;
    let sd = (neumaier(w.iter().map(|x| (x - mean).powi(2))) / (runs - 1) as f64).sqrt();
    Ok(FloorCalibration { n, runs, seed, mean, sd, floor: mean + 4.0 * sd })
}

/// A centred Gaussian law used as the comparison target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianReference {
    pub dimension: usize,
    /// Row-major `dimension × dimension`.
    pub covariance: Vec<f64>,
}

impl GaussianReference {
    pub fn new(dimension: usize, covariance: Vec<f64>) -> Result<Self> {
        if covariance.len() != dimension * dimension || dimension == 0 {
            return Err(domain!("covariance must be a nonempty square matrix"));
        }
        let r = Self { dimension, covariance };
        r.check_psd()?;
        Ok(r)
    }

    pub fn identity(d: usize) -> Self {
        let mut c = vec![0.0; d * d];
        (0..d).for_each(|i| c[i * d + i] = 1.0);
        Self { dimension: d, covariance: c }
    }

    /// `(4π/(2ℓ+1)) I`, the law of the coefficient vector.
    pub fn harmonic(ell: usize) -> Self {
        let d = 2 * ell + 1;
        let mut r = Self::identity(d);
        r.covariance.iter_mut().for_each(|c| *c *= 4.0 * PI / d as f64);
        r
    }

    /// `Γ_{ij} = P_ℓ(⟨x_i, x_j⟩)`.
    pub fn fdd(ell: usize, points: &[Point]) -> Result<Self> {
        Self::new(points.len(), crate::model::fdd_covariance(ell, points)?)
    }

    /// Symmetry and positive semidefiniteness via an `LDLᵀ` sweep that
    /// tolerates zero pivots.
    fn check_psd(&self) -> Result<()> {
        let d = self.dimension;
        let a = &self.covariance;
        let scale = a.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        let tol = 1e-10 * scale;
        for i in 0..d {
            for j in 0..i {
                if (a[i * d + j] - a[j * d + i]).abs() > tol {
                    return Err(domain!("covariance is not symmetric"));
                }
            }
        }
        let mut l = vec![0.0; d * d];
        let mut diag = vec![0.0; d];
        for j in 0..d {
            let mut dj = a[j * d + j];
            for k in 0..j {
                dj -= l[j * d + k] * l[j * d + k] * diag[k];
            }
            if dj < -tol * d as f64 {
                return Err(domain!("covariance is not positive semidefinite"));
            }
            diag[j] = dj.max(0.0);
            for i in (j + 1)..d {
                let mut v = a[i * d + j];
                for k in 0..j {
                    v -= l[i * d + k] * l[j * d + k] * diag[k];
                }
                l[i * d + j] = if diag[j] > tol { v / diag[j] } else { 0.0 };
            }
        }
        Ok(())
    }
}

/// Sample covariance of a vector target and its entrywise deviation from a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CovarianceCheck {
    pub dimension: usize,
    pub covariance: Vec<f64>,
    /// Standard error of each entry (spread of centred products over `√n`).
    pub stderr: Vec<f64>,
    pub max_abs_deviation: f64,
    /// `max |Ĉ − C| / se` over entries with positive standard error.
    pub max_standardized_deviation: f64,
}

pub fn empirical_covariance(s: &SampleSet, reference: &GaussianReference) -> Result<CovarianceCheck> {
    let d = s.dim;
    if d != reference.dimension {
        return Err(domain!("sample dimension {d} differs from reference dimension {}", reference.dimension));
    }
    let n = s.rows();
    if n < 2 {
        return Err(domain!("covariance needs at least two replicates"));
    }
    let cols: Vec<Vec<f64>> = (0..d).map(|j| s.column(j)).collect();
    let means: Vec<f64> = cols.iter().map(|c| neumaier(c.iter().copied()) / n as f64).collect();
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i..d).map(move |j| (i, j))).collect();
    let entries: Vec<(f64, f64)> = pairs
        .par_iter()
        .map(|&(i, j)| {
            let prod: Vec<f64> = cols[i].iter().zip(&cols[j]).map(|(a, b)| (a - means[i]) * (b - means[j])).collect();
            let sum = neumaier(prod.iter().copied());
            let c = sum / (n - 1) as f64;
            let mean = sum / n as f64;
            let var = neumaier(prod.iter().map(|p| (p - mean).powi(2))) / (n - 1) as f64;
            (c, (var / n as f64).sqrt())
        })
        .collect();
    let mut cov = vec![0.0; d * d];
    let mut se = vec![0.0; d * d];
    let (mut max_abs, mut max_z) = (0.0_f64, 0.0_f64);
    for (&(i, j), &(c, e)) in pairs.iter().zip(&entries) {
        for (a, b) in [(i, j), (j, i)] {
            cov[a * d + b] = c;
            se[a * d + b] = e;
        }
        let dev = (c - reference.covariance[i * d + j]).abs();
        max_abs = max_abs.max(dev);
        if e > 0.0 {
            max_z = max_z.max(dev / e);
        }
    }
    Ok(CovarianceCheck { dimension: d, covariance: cov, stderr: se, max_abs_deviation: max_abs, max_standardized_deviation: max_z })
}

#[cfg(test)]
pub(crate) fn raw_k_for_tests(xs: &[f64]) -> [f64; 4] {
    raw_k(xs)
}
