use super::{cumulant_report, MIN_REPLICATES_FOR_SE, empirical_w1_to_standard_normal, run, ExperimentConfig, SampleSet};
use crate::bounds::{bound_fdd_d3, bound_functional, bound_harmonic_d3, bound_one_dim, SmoothnessBudget};
use crate::error::domain;
use crate::moments::{analytic_report, Target};
use crate::Result;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

pub const CSV_COLUMNS: [&str; 12] = [
    "ell",
    "rate",
    "replicates",
    "seed",
    "target",
    "analytic_cum4",
    "k4",
    "k4_se",
    "w1",
    "bound_wasserstein",
    "bound_d3",
    "bound_functional",
];

/// One grid cell of a sweep. Optional columns are empty where a quantity
/// does not apply to the target (e.g. W₁ for vector targets).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ell: usize,
    pub rate: f64,
    pub replicates: usize,
    pub seed: u64,
    pub target: Target,
    pub analytic_cum4: f64,
    /// Empty below [`MIN_REPLICATES_FOR_SE`] replicates.
    pub k4: Option<f64>,
    pub k4_se: Option<f64>,
    pub w1: Option<f64>,
    pub bound_wasserstein: Option<f64>,
    pub bound_d3: Option<f64>,
    pub bound_functional: f64,
}

/// Least-squares fit of `log W₁` on `log ν` at fixed `ℓ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub ell: usize,
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
    pub slopes: Vec<SlopeFit>,
}

fn cell(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

impl SweepRow {
    pub fn evaluate(cfg: &ExperimentConfig) -> Result<Self> {
        Self::from_sample(&run(cfg)?)
    }

    /// The row for an already simulated sample.
    pub fn from_sample(sample: &SampleSet) -> Result<Self> {
        let cfg = &sample.config;
        let report = if sample.rows() >= MIN_REPLICATES_FOR_SE {
            cumulant_report(sample)?
        } else {
            analytic_report(cfg.target, cfg.ell, cfg.rate, sample.dim)?
        };
        let unit = SmoothnessBudget::<f64>::unit();
        let (ell, rate) = (cfg.ell, cfg.rate);
        let big_enough = ell >= 2;
        let (w1, bound_wasserstein) = match cfg.target {
            Target::PointValue => (
                Some(empirical_w1_to_standard_normal(sample)?),
                big_enough.then(|| bound_one_dim(ell, rate)).transpose()?.map(|b| b.value),
            ),
            _ => (None, None),
        };
        let bound_d3 = if !big_enough {
            None
        } else {
            Some(match cfg.target {
                Target::PointValue => bound_fdd_d3(ell, rate, 1, unit)?.value,
                Target::Fdd => bound_fdd_d3(ell, rate, sample.dim, unit)?.value,
                Target::Coefficient(_) | Target::CoefficientSum => bound_harmonic_d3(ell, rate, unit)?.value,
                Target::NormSquared => bound_functional(rate)?.value,
            })
        };
        Ok(Self {
            ell,
            rate,
            replicates: cfg.replicates,
            seed: cfg.seed,
            target: cfg.target,
            analytic_cum4: report.analytic,
            k4: report.mc_estimate,
            k4_se: report.mc_stderr,
            w1,
            bound_wasserstein,
            bound_d3,
            bound_functional: bound_functional(rate)?.value,
        })
    }

    pub fn csv_line(&self) -> String {
        [
            self.ell.to_string(),
            self.rate.to_string(),
            self.replicates.to_string(),
            self.seed.to_string(),
            self.target.to_string(),
            self.analytic_cum4.to_string(),
            cell(self.k4),
            cell(self.k4_se),
            cell(self.w1),
            cell(self.bound_wasserstein),
            cell(self.bound_d3),
            self.bound_functional.to_string(),
        ]
        .join(",")
    }
}

impl SweepTable {
    /// CSV with an optional leading `# …` comment line, then the header and
    /// one row per cell. Numbers use shortest round-trip notation.
    pub fn to_csv(&self, comment: Option<&str>) -> String {
        let mut out = String::new();
        if let Some(c) = comment {
            let _ = writeln!(out, "# {c}");
        }
        let _ = writeln!(out, "{}", CSV_COLUMNS.join(","));
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.csv_line());
        }
        out
    }
}

fn fit_slopes(rows: &[SweepRow]) -> Vec<SlopeFit> {
    let mut ells: Vec<usize> = rows.iter().map(|r| r.ell).collect();
    ells.sort_unstable();
    ells.dedup();
    ells.into_iter()
        .filter_map(|ell| {
            let pts: Vec<(f64, f64)> = rows
                .iter()
                .filter(|r| r.ell == ell)
                .filter_map(|r| r.w1.filter(|w| *w > 0.0).map(|w| (r.rate.ln(), w.ln())))
                .collect();
            let n = pts.len() as f64;
            let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
            let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
            let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
            if pts.len() < 2 || sxx == 0.0 {
                return None;
            }
            let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
            let slope = sxy / sxx;
            Some(SlopeFit { ell, slope, intercept: my - slope * mx, points: pts.len() })
        })
        .collect()
}

/// Runs `base` at every `(ℓ, ν)` of `grid`, in grid order, and fits the
/// `W₁`-versus-`ν` slope for every `ℓ` with at least two rates.
pub fn convergence_sweep(grid: &[(usize, f64)], base: &ExperimentConfig) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(domain!("sweep grid is empty"));
    }
    let rows = grid
        .iter()
        .map(|&(ell, rate)| SweepRow::evaluate(&ExperimentConfig { ell, rate, ..base.clone() }))
        .collect::<Result<Vec<_>>>()?;
    let slopes = fit_slopes(&rows);
    Ok(SweepTable { rows, slopes })
}
