use crate::args::{BoundArgs, Cli, Command, CumulantArgs, LegendreArgs, SimulateArgs, SweepArgs, VerifyArgs};
use crate::output::{self, Clock};
use crate::verify::{self, Library};
use crate::CliError;
use poisson_waves::bounds::{evaluate, SmoothnessBudget};
use poisson_waves::mc::{self, calibrate_w1_floor, convergence_sweep, cumulant_report, ExperimentConfig, SweepRow, SweepTable};
use poisson_waves::moments::{analytic_report, CumulantReport, Target};
use poisson_waves::sphfn::{assoc_legendre, assoc_legendre_normalized, legendre, legendre_quartic_integral};
use poisson_waves::wigner::exact::{clebsch_gordan_exact, wigner3j_exact};
use poisson_waves::wigner::{clebsch_gordan, wigner3j, Cg, ThreeJ};
use poisson_waves::Point;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Synthetic runs used to calibrate the W₁ floor unless a config says otherwise.
pub const DEFAULT_FLOOR_RUNS: usize = 10;

fn default_floor_runs() -> usize {
    DEFAULT_FLOOR_RUNS
}

fn default_target() -> Target {
    Target::PointValue
}

fn default_batches() -> usize {
    mc::MIN_BATCHES
}

/// A sweep document: the experiment fields of a single run, with `ell` and
/// `rate` replaced by a list of `[ell, rate]` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub grid: Vec<(usize, f64)>,
    pub replicates: usize,
    pub seed: u64,
    #[serde(default = "default_target")]
    pub target: Target,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eval_points: Option<Vec<Point>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default = "default_batches")]
    pub batches: usize,
    /// Synthetic N(0,1) runs for the W₁ floor; 0 skips calibration.
    #[serde(default = "default_floor_runs")]
    pub floor_runs: usize,
}

impl SweepConfig {
    /// The per-cell experiment, with `ell` and `rate` taken from the first cell.
    pub fn base(&self) -> Result<ExperimentConfig, CliError> {
        let &(ell, rate) = self.grid.first().ok_or_else(|| CliError::Usage("sweep grid is empty".into()))?;
        let mut cfg = ExperimentConfig::new(ell, rate, self.replicates, self.seed, self.target);
        if self.eval_points.is_some() {
            cfg.eval_points = self.eval_points.clone();
        }
        cfg.workers = self.workers;
        cfg.batches = self.batches;
        Ok(cfg)
    }

    pub fn canonical(&self) -> Self {
        Self { workers: None, ..self.clone() }
    }
}

/// Executes a parsed command line, writing human-facing output to `out`.
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    let workers = cli.workers;
    if workers == Some(0) {
        return Err(CliError::Usage("--workers must be positive".into()));
    }
    match cli.command {
        Command::Wigner3j { l1, l2, l3, m1, m2, m3, exact } => {
            let v = wigner3j(l1, l2, l3, m1, m2, m3)?;
            let exact = exact.then(|| wigner3j_exact(ThreeJ::new(l1, l2, l3, m1, m2, m3))).transpose()?;
            print_coefficient(out, v, exact.map(|e| e.to_string()))
        }
        Command::Cg { l1, m1, l2, m2, l, m, exact } => {
            let v = clebsch_gordan(l1, m1, l2, m2, l, m)?;
            let exact = exact.then(|| clebsch_gordan_exact(Cg::new(l1, m1, l2, m2, l, m))).transpose()?;
            print_coefficient(out, v, exact.map(|e| e.to_string()))
        }
        Command::Legendre(a) => cmd_legendre(a, out),
        Command::Cumulants(a) => cmd_cumulants(a, workers, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::Simulate(a) => cmd_simulate(a, workers, out),
        Command::Sweep(a) => cmd_sweep(a, workers, out),
        Command::Verify(a) => cmd_verify(a, out),
    }
}

fn say(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(|e| output::io_error(Path::new("<stdout>"), e))
}

fn print_coefficient(out: &mut dyn Write, v: f64, exact: Option<String>) -> Result<(), CliError> {
    let mut s = format!("{v}\n");
    if let Some(e) = exact {
        s.push_str(&format!("{e}\n"));
    }
    say(out, &s)
}

fn cmd_legendre(a: LegendreArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let v = if a.quartic {
        legendre_quartic_integral::<f64>(a.ell)?
    } else {
        let t = a.t.expect("clap requires --t without --quartic");
        match (a.m, a.normalized) {
            (None, false) => legendre(a.ell, t)?,
            (m, true) => assoc_legendre_normalized(a.ell, m.unwrap_or(0), t)?,
            (Some(m), false) => assoc_legendre(a.ell, m, t)?,
        }
    };
    say(out, &format!("{v}\n"))
}

const CUMULANT_COLUMNS: &str = "target,ell,rate,analytic_cum4,mc_k4,mc_se,z_score";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn cumulant_csv(r: &CumulantReport) -> String {
    format!(
        "{CUMULANT_COLUMNS}\n{},{},{},{},{},{},{}\n",
        r.target,
        r.ell,
        r.rate,
        r.analytic,
        opt(r.mc_estimate),
        opt(r.mc_stderr),
        opt(r.z_score())
    )
}

/// `d` distinct, reproducible evaluation points.
fn fdd_points(d: usize, seed: u64) -> Vec<Point> {
    let mut rng = mc::rng::stream(seed, u64::MAX);
    (0..d).map(|_| mc::rng::uniform_sphere(&mut rng)).collect()
}

fn cmd_cumulants(a: CumulantArgs, workers: Option<usize>, out: &mut dyn Write) -> Result<(), CliError> {
    let target = a.m.map(Target::Coefficient).or(a.target).unwrap_or(Target::PointValue);
    let report = match a.replicates {
        None => analytic_report(target, a.ell, a.rate, a.d)?,
        Some(r) => {
            let mut cfg = ExperimentConfig::new(a.ell, a.rate, r, a.seed, target);
            if target == Target::Fdd {
                cfg.eval_points = Some(fdd_points(a.d, a.seed));
            }
            cfg.workers = workers;
            cumulant_report(&mc::run(&cfg)?)?
        }
    };
    let csv = cumulant_csv(&report);
    let json = serde_json::to_string(&report).expect("report serializes");
    say(out, &format!("{csv}{json}\n"))?;
    if let Some(dir) = a.out {
        output::ensure_dir(&dir)?;
        output::write_file(&dir.join("cumulants.csv"), &csv)?;
        output::write_file(&dir.join("cumulants.json"), &format!("{json}\n"))?;
    }
    Ok(())
}

const BOUND_COLUMNS: &str = "theorem,ell,rate,dimension,value,leading_term";

fn cmd_bounds(a: BoundArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let budget = SmoothnessBudget::new(a.m1, a.m2, a.m3)?;
    let r = evaluate(a.theorem, a.ell, a.rate, a.d, budget)?;
    let csv = format!(
        "{BOUND_COLUMNS}\n{},{},{},{},{},{}\n",
        r.theorem,
        r.ell.map(|l| l.to_string()).unwrap_or_default(),
        r.rate,
        r.dimension.map(|d| d.to_string()).unwrap_or_default(),
        r.value,
        opt(r.leading_term)
    );
    let json = serde_json::to_string(&r).expect("report serializes");
    say(out, &format!("{csv}{json}\n"))?;
    if let Some(dir) = a.out {
        output::ensure_dir(&dir)?;
        output::write_file(&dir.join("bounds.csv"), &csv)?;
        output::write_file(&dir.join("bounds.json"), &format!("{json}\n"))?;
    }
    Ok(())
}

fn floor_for(target: Target, replicates: usize, runs: usize, seed: u64) -> Result<Option<mc::FloorCalibration>, CliError> {
    if target != Target::PointValue || runs == 0 {
        return Ok(None);
    }
    Ok(Some(calibrate_w1_floor(replicates, runs, seed)?))
}

fn hash_comment(hash: &str) -> String {
    format!("config_sha256={hash}")
}

fn cmd_simulate(a: SimulateArgs, workers: Option<usize>, out: &mut dyn Write) -> Result<(), CliError> {
    let clock = Clock::start();
    let mut cfg: ExperimentConfig = match &a.config {
        Some(path) => output::read_config(path)?,
        None => ExperimentConfig::new(
            a.ell.expect("required by clap"),
            a.rate.expect("required by clap"),
            a.replicates.expect("required by clap"),
            a.seed.unwrap_or(0),
            a.target.unwrap_or(Target::PointValue),
        ),
    };
    if workers.is_some() {
        cfg.workers = workers;
    }
    cfg.validate()?;
    let canonical = cfg.canonical();
    let hash = output::config_hash(&canonical);
    let sample = mc::run(&cfg)?;
    let table = SweepTable { rows: vec![SweepRow::from_sample(&sample)?], slopes: Vec::new() };
    let csv = table.to_csv(Some(&hash_comment(&hash)));

    output::ensure_dir(&a.out)?;
    let csv_path = a.out.join("simulate.csv");
    output::write_file(&csv_path, &csv)?;
    let mut outputs = vec![csv_path];
    if a.samples {
        let names: Vec<String> = (0..sample.dim).map(|j| format!("v{j}")).collect();
        let mut text = format!("# {}\nreplicate,{}\n", hash_comment(&hash), names.join(","));
        for r in 0..sample.rows() {
            let vals: Vec<String> = sample.row(r).iter().map(f64::to_string).collect();
            text.push_str(&format!("{r},{}\n", vals.join(",")));
        }
        let path = a.out.join("samples.csv");
        output::write_file(&path, &text)?;
        outputs.push(path);
    }
    let mut manifest = clock.manifest("simulate", &canonical, cfg.seed);
    manifest.floor = floor_for(cfg.target, cfg.replicates, DEFAULT_FLOOR_RUNS, cfg.seed)?;
    let json_path = a.out.join("simulate.json");
    outputs.push(json_path.clone());
    manifest.outputs = outputs;
    output::write_file(&json_path, &manifest.to_json())?;
    say(out, &csv)
}

fn cmd_sweep(a: SweepArgs, workers: Option<usize>, out: &mut dyn Write) -> Result<(), CliError> {
    let clock = Clock::start();
    let mut cfg: SweepConfig = output::read_config(&a.config)?;
    if workers.is_some() {
        cfg.workers = workers;
    }
    let base = cfg.base()?;
    base.validate()?;
    let canonical = cfg.canonical();
    let hash = output::config_hash(&canonical);
    let table = convergence_sweep(&cfg.grid, &base)?;
    let csv = table.to_csv(Some(&hash_comment(&hash)));

    output::ensure_dir(&a.out)?;
    let csv_path = a.out.join("sweep.csv");
    output::write_file(&csv_path, &csv)?;
    let mut manifest = clock.manifest("sweep", &canonical, cfg.seed);
    manifest.floor = floor_for(cfg.target, cfg.replicates, cfg.floor_runs, cfg.seed)?;
    manifest.slopes = table.slopes.clone();
    let json_path = a.out.join("sweep.json");
    manifest.outputs = vec![csv_path, json_path.clone()];
    output::write_file(&json_path, &manifest.to_json())?;
    say(out, &csv)
}

#[derive(Serialize)]
struct VerifyConfig {
    level: crate::args::Level,
    seed: u64,
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let manifest = verify::run_suite(a.level, a.seed, &Library);
    let json = manifest.to_json();
    say(out, &format!("{json}\n"))?;
    if let Some(path) = &a.out {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            output::ensure_dir(dir)?;
        }
        output::write_file(path, &format!("{json}\n"))?;
    }
    match manifest.failed_checks() {
        failed if failed.is_empty() => Ok(()),
        failed => Err(CliError::VerifyFailed(failed)),
    }
}

pub(crate) fn verify_config(level: crate::args::Level, seed: u64) -> impl Serialize {
    VerifyConfig { level, seed }
}
