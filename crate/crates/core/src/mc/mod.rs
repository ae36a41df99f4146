//! Seeded, data-parallel Monte Carlo.
//!
//! Replicate `r` of a configuration draws only from [`rng::stream`]`(seed, r)`
//! and writes only its own output row, so a sample set is bit-identical for
//! any number of workers. Estimators reduce rows in replicate order with
//! compensated summation.

pub mod rng;
mod stats;
mod sweep;

pub use stats::{
    batch_mean_se, calibrate_w1_floor, cumulant_report, empirical_covariance, empirical_w1_to_standard_normal,
    k_statistics, k_statistics_of, w1_to_standard_normal, CovarianceCheck, FloorCalibration, GaussianReference,
    KStatistics, MIN_BATCHES, MIN_REPLICATES_FOR_SE,
};
pub use sweep::{convergence_sweep, SlopeFit, SweepRow, SweepTable, CSV_COLUMNS};

use crate::error::domain;
use crate::model::check_distinct;
use crate::moments::Target;
use crate::sphfn::{assoc_legendre_normalized, legendre_sum, sph_harm_row};
use crate::{Error, NeumaierSum, Point, Result};
use rand::Rng;
use rayon::prelude::*;
use rng::{poisson, stream, uniform_pm1};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Minimum replicate count accepted by [`run`].
pub const MIN_REPLICATES: usize = 100;
/// Upper limit on `replicates × E[points] × (per-point cost)` for one run.
pub const MAX_WORK: f64 = 5e12;
/// Upper limit on stored sample entries.
pub const MAX_ENTRIES: usize = 400_000_000;

fn default_batches() -> usize {
    MIN_BATCHES
}

/// One Monte Carlo experiment, read from a flat JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub ell: usize,
    pub rate: f64,
    pub replicates: usize,
    pub seed: u64,
    pub target: Target,
    /// One point for `point_value`, `d ≥ 1` distinct points for `fdd`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_points: Option<Vec<Point>>,
    /// Worker threads; never affects results.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    /// Batches for batch-means standard errors (at least 20).
    #[serde(default = "default_batches")]
    pub batches: usize,
}

impl ExperimentConfig {
    pub fn new(ell: usize, rate: f64, replicates: usize, seed: u64, target: Target) -> Self {
        let eval_points = matches!(target, Target::PointValue | Target::Fdd).then(|| vec![Point::north_pole()]);
        Self { ell, rate, replicates, seed, target, eval_points, workers: None, batches: MIN_BATCHES }
    }

    pub fn with_points(mut self, points: Vec<Point>) -> Self {
        self.eval_points = Some(points);
        self
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = Some(workers);
        self
    }

    /// Width of one replicate's output row.
    pub fn dimension(&self) -> usize {
        match self.target {
            Target::CoefficientSum => 2 * self.ell + 1,
            Target::Fdd => self.eval_points.as_ref().map_or(0, Vec::len),
            _ => 1,
        }
    }

    /// The same experiment with worker count cleared, i.e. the part that
    /// determines the output.
    pub fn canonical(&self) -> Self {
        Self { workers: None, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(domain!("ℓ = 0 gives a non-centred field"));
        }
        crate::sphfn::check_degree(self.ell)?;
        if !(self.rate.is_finite() && self.rate > 0.0) {
            return Err(domain!("rate must be positive and finite"));
        }
        if self.replicates < MIN_REPLICATES {
            return Err(domain!("at least {MIN_REPLICATES} replicates required"));
        }
        if self.batches < MIN_BATCHES {
            return Err(domain!("at least {MIN_BATCHES} batches required"));
        }
        if self.workers == Some(0) {
            return Err(domain!("workers must be positive"));
        }
        match (&self.target, &self.eval_points) {
            (Target::PointValue, Some(p)) if p.len() == 1 => {}
            (Target::PointValue, _) => return Err(domain!("point_value needs exactly one evaluation point")),
            (Target::Fdd, Some(p)) if !p.is_empty() => check_distinct(p)?,
            (Target::Fdd, _) => return Err(domain!("fdd needs at least one evaluation point")),
            (Target::Coefficient(m), _) if m.unsigned_abs() as usize > self.ell => {
                return Err(domain!("order {m} exceeds degree {}", self.ell))
            }
            _ => {}
        }
        let mean = 4.0 * PI * self.rate;
        if mean > crate::model::MAX_EXPECTED_POINTS {
            return Err(Error::Capacity(format!("rate {} exceeds the sampler limit", self.rate)));
        }
        let per_point = match self.target {
            Target::PointValue | Target::Coefficient(_) => self.ell as f64,
            Target::CoefficientSum | Target::NormSquared => (self.ell * self.ell) as f64,
            Target::Fdd => (self.ell * self.dimension()) as f64,
        };
        let work = self.replicates as f64 * (mean + 1.0) * (per_point + 1.0);
        if work > MAX_WORK {
            return Err(Error::Capacity(format!("estimated work {work:.3e} exceeds {MAX_WORK:.0e}")));
        }
        if self.replicates.saturating_mul(self.dimension()) > MAX_ENTRIES {
            return Err(Error::Capacity("sample would not fit in memory".into()));
        }
        Ok(())
    }
}

/// Replicate outputs, `replicates × dim`, row-major in replicate order.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleSet {
    pub config: ExperimentConfig,
    pub dim: usize,
    pub values: Vec<f64>,
}

impl SampleSet {
    /// Wraps externally produced data (e.g. synthetic oracles).
    pub fn from_values(config: ExperimentConfig, dim: usize, values: Vec<f64>) -> Result<Self> {
        if dim == 0 || !values.len().is_multiple_of(dim) {
            return Err(domain!("sample length {} is not a multiple of {dim}", values.len()));
        }
        Ok(Self { config, dim, values })
    }

    pub fn rows(&self) -> usize {
        self.values.len() / self.dim
    }

    pub fn is_scalar(&self) -> bool {
        self.dim == 1 && !self.config.target.is_vector()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.iter().skip(j).step_by(self.dim).copied().collect()
    }
}

struct Scratch {
    ts: Vec<f64>,
    points: Vec<Point>,
    acc: Vec<NeumaierSum>,
}

fn sample_count<R: Rng>(rate: f64, rng: &mut R) -> usize {
    poisson(4.0 * PI * rate, rng) as usize
}

fn draw_points<R: Rng>(n: usize, rng: &mut R, out: &mut Vec<Point>) {
    out.clear();
    out.extend((0..n).map(|_| rng::uniform_sphere(rng)));
}

/// Fills one output row for replicate `r`.
fn replicate(cfg: &ExperimentConfig, r: u64, out: &mut [f64], s: &mut Scratch) -> Result<()> {
    let mut rng = stream(cfg.seed, r);
    let ell = cfg.ell;
    let nu = cfg.rate;
    let n = sample_count(nu, &mut rng);
    match cfg.target {
        // By rotation invariance only ⟨x, ξ_k⟩ matters, and for uniform ξ_k it
        // is uniform on [-1, 1]: draw it directly in a frame with pole x.
        Target::PointValue | Target::Coefficient(0) => {
            s.ts.clear();
            s.ts.extend((0..n).map(|_| uniform_pm1(&mut rng)));
            let sum = legendre_sum(ell, &s.ts);
            out[0] = if cfg.target == Target::PointValue {
                ((2 * ell + 1) as f64 / (4.0 * PI * nu)).sqrt() * sum
            } else {
                sum / nu.sqrt()
            };
        }
        Target::Coefficient(m) => {
            draw_points(n, &mut rng, &mut s.points);
            let am = m.unsigned_abs() as usize;
            let mut acc = NeumaierSum::new();
            for p in &s.points {
                let plm = assoc_legendre_normalized(ell, am, p.z())?;
                let (sn, cs) = (am as f64 * p.phi()).sin_cos();
                acc.add(plm * if m > 0 { cs } else { sn });
            }
            out[0] = (4.0 * PI / ((2 * ell + 1) as f64 * nu)).sqrt() * std::f64::consts::SQRT_2 * acc.value();
        }
        Target::CoefficientSum | Target::NormSquared => {
            draw_points(n, &mut rng, &mut s.points);
            s.acc.clear();
            s.acc.resize(2 * ell + 1, NeumaierSum::new());
            for p in &s.points {
                for (a, y) in s.acc.iter_mut().zip(sph_harm_row(ell, p)?) {
                    a.add(y);
                }
            }
            let c = (4.0 * PI / ((2 * ell + 1) as f64 * nu)).sqrt();
            if cfg.target == Target::NormSquared {
                out[0] = crate::neumaier(s.acc.iter().map(|a| (c * a.value()).powi(2)));
            } else {
                for (o, a) in out.iter_mut().zip(&s.acc) {
                    *o = c * a.value();
                }
            }
        }
        Target::Fdd => {
            draw_points(n, &mut rng, &mut s.points);
            let c = ((2 * ell + 1) as f64 / (4.0 * PI * nu)).sqrt();
            let xs = cfg.eval_points.as_deref().unwrap_or_default();
            for (o, x) in out.iter_mut().zip(xs) {
                s.ts.clear();
                s.ts.extend(s.points.iter().map(|p| p.dot(x)));
                *o = c * legendre_sum(ell, &s.ts);
            }
        }
    }
    Ok(())
}

/// Runs every replicate of `config` on `config.workers` threads (all
/// available cores when unset).
pub fn run(config: &ExperimentConfig) -> Result<SampleSet> {
    config.validate()?;
    let dim = config.dimension();
    let mut values = vec![0.0; config.replicates * dim];
    let work = |values: &mut Vec<f64>| -> Result<()> {
        values
            .par_chunks_mut(dim)
            .with_min_len(16)
            .enumerate()
            .try_for_each_init(
                || Scratch { ts: Vec::new(), points: Vec::new(), acc: Vec::new() },
                |scratch, (r, row)| replicate(config, r as u64, row, scratch),
            )
    };
    match config.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w)
            .build()
            .map_err(|e| Error::Capacity(format!("cannot start {w} workers: {e}")))?
            .install(|| work(&mut values))?,
        None => work(&mut values)?,
    }
    Ok(SampleSet { config: config.clone(), dim, values })
}


#[cfg(test)]
pub(crate) fn stats_raw_for_tests(xs: &[f64]) -> [f64; 4] {
    stats::raw_k_for_tests(xs)
}
