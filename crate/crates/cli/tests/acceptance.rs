//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use poisson_waves::bounds::{bound_functional_at, bound_one_dim};
use poisson_waves::mc::{
    self, batch_mean_se, calibrate_w1_floor, convergence_sweep, cumulant_report, ExperimentConfig,
};
use poisson_waves::moments::{
    cum4_bracket, cum4_coefficient_sum, norm_moments, quartic_integral, QuarticRoute, Target,
};
use poisson_waves::neumaier;
use poisson_waves_cli::verify::{run_suite, Library};
use poisson_waves_cli::Level;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

const SEED: u64 = 20_260_101;

struct Outcome {
    passed: bool,
    summary: String,
}

fn outcome(passed: bool, summary: String) -> Outcome {
    Outcome { passed, summary }
}

fn within(elapsed: Duration, limit_s: u64) -> bool {
    elapsed <= Duration::from_secs(limit_s)
}

fn c1_identity_suite() -> Outcome {
    let t = Instant::now();
    let fast = run_suite(Level::Fast, SEED, &Library);
    let fast_time = t.elapsed();
    let full = run_suite(Level::Full, SEED, &Library);
    let mut failed = fast.failed_checks();
    failed.extend(full.failed_checks().into_iter().map(|n| format!("{n} (full)")));
    outcome(
        failed.is_empty() && within(fast_time, 60),
        format!(
            "{} checks; fast {:.1}s, full {:.1}s; failed: {failed:?}",
            fast.checks.len(),
            fast_time.as_secs_f64(),
            full.wall_seconds
        ),
    )
}

fn c2_quartic_identity() -> Outcome {
    let t = Instant::now();
    let mut worst = (0.0_f64, 0);
    for ell in 0..=50 {
        let q: f64 = quartic_integral(ell, QuarticRoute::Quadrature).unwrap();
        let w: f64 = quartic_integral(ell, QuarticRoute::Wigner).unwrap();
        let rel = ((q - w) / w).abs();
        if rel > worst.0 {
            worst = (rel, ell);
        }
    }
    outcome(
        worst.0 <= 1e-10 && within(t.elapsed(), 120),
        format!("max relative gap {:.2e} at ℓ={} (tol 1e-10), {:.1}s", worst.0, worst.1, t.elapsed().as_secs_f64()),
    )
}

fn c3_asymptotic_constant() -> Outcome {
    let t = Instant::now();
    let target = 3.0 / (2.0 * PI * PI);
    let devs: Vec<(usize, f64, f64)> = [100, 1000, 10_000]
        .into_iter()
        .map(|ell| {
            let i4: f64 = quartic_integral(ell, QuarticRoute::Quadrature).unwrap();
            let scaled = (ell * ell) as f64 * i4 / (ell as f64).ln();
            (ell, scaled, (scaled - target).abs() / target)
        })
        .collect();
    let decreasing = devs.windows(2).all(|w| w[1].2 < w[0].2);
    let last = devs[2].2;
    let mut s = String::new();
    for (ell, v, d) in &devs {
        let _ = write!(s, "ℓ={ell}: {v:.6} (dev {:.1}%); ", 100.0 * d);
    }
    let _ = write!(
        s,
        "strictly decreasing: {decreasing}; ≤20% at ℓ=10⁴: {}; {:.1}s",
        last <= 0.2,
        t.elapsed().as_secs_f64()
    );
    outcome(decreasing && last <= 0.2 && within(t.elapsed(), 300), s)
}

fn mc_cumulant(label: &str, cfg: ExperimentConfig) -> Outcome {
    let t = Instant::now();
    let report = cumulant_report(&mc::run(&cfg).unwrap()).unwrap();
    let z = report.z_score().unwrap();
    outcome(
        z.abs() <= 4.0 && within(t.elapsed(), 300),
        format!(
            "{label}: k4 = {:.6e} ± {:.2e}, exact {:.6e}, z = {z:+.2}, {:.1}s",
            report.mc_estimate.unwrap(),
            report.mc_stderr.unwrap(),
            report.analytic,
            t.elapsed().as_secs_f64()
        ),
    )
}

fn c4_point_cumulant() -> Outcome {
    mc_cumulant("ℓ=10, ν=50, R=2e5", ExperimentConfig::new(10, 50.0, 200_000, SEED, Target::PointValue))
}

fn c5_coefficient_cumulant() -> Outcome {
    mc_cumulant("â_{8,0}, ν=20, R=2e5", ExperimentConfig::new(8, 20.0, 200_000, SEED, Target::Coefficient(0)))
}

fn c6_norm_moments() -> Outcome {
    let (ell, nu) = (5, 10.0);
    let cfg = ExperimentConfig::new(ell, nu, 100_000, SEED, Target::NormSquared);
    let s = mc::run(&cfg).unwrap();
    let v = &s.values;
    let mean_of = |f: fn(f64) -> f64| {
        batch_mean_se(v.len(), cfg.batches, |r| neumaier(v[r.clone()].iter().map(|&x| f(x))) / r.len() as f64).unwrap()
    };
    let (m2, se2) = mean_of(|x| x);
    let (m4, se4) = mean_of(|x| x * x);
    let fp = 4.0 * PI;
    let e2 = fp;
    let e4 = fp / nu + fp * fp + 2.0 * fp * fp / (2 * ell + 1) as f64;
    let (z2, z4) = ((m2 - e2) / se2, (m4 - e4) / se4);
    let nm = norm_moments(ell, nu).unwrap();
    let plain = nm.fourth() - nm.mean_sq * nm.mean_sq - 2.0 * nm.hs_sq;
    let ulp_tol = 4.0 * f64::EPSILON * nm.fourth();
    let exact_ok = (plain - fp / nu).abs() <= ulp_tol && nm.defect() == fp / nu;
    outcome(
        z2.abs() <= 4.0 && z4.abs() <= 4.0 && exact_ok,
        format!(
            "E‖T‖² z = {z2:+.2}, E‖T‖⁴ z = {z4:+.2}; combination − 4π/ν = {:.1e} (tol {ulp_tol:.1e}), compensated exact: {}",
            plain - fp / nu,
            nm.defect() == fp / nu
        ),
    )
}

fn c7_bracket() -> Outcome {
    let mut violations = Vec::new();
    let mut tightest = f64::INFINITY;
    for nu in [1.0, 37.0] {
        for ell in 2..=200 {
            let b = cum4_bracket(ell, nu).unwrap();
            let s: f64 = cum4_coefficient_sum(ell, nu).unwrap();
            if !(b.lower <= s && s <= b.upper) {
                violations.push((ell, nu));
            }
            tightest = tightest.min((b.upper - s) / s);
        }
    }
    outcome(
        violations.is_empty(),
        format!("violations {violations:?}; smallest upper margin {:.1}%", 100.0 * tightest),
    )
}

fn c8_rate_recovery() -> Outcome {
    let t = Instant::now();
    let replicates = 1_000_000;
    let base = ExperimentConfig::new(20, 100.0, replicates, SEED, Target::PointValue);
    let grid = [(20, 1e2), (20, 1e3), (20, 1e4)];
    let table = convergence_sweep(&grid, &base).unwrap();
    let floor = calibrate_w1_floor(replicates, 10, SEED).unwrap();
    let slope = table.slopes[0].slope;
    let slope_ok = (-0.65..=-0.35).contains(&slope);
    let mut dominated = true;
    let mut s = String::new();
    for row in &table.rows {
        let w1 = row.w1.unwrap();
        let bound = bound_one_dim(row.ell, row.rate).unwrap().value;
        dominated &= w1 <= bound + floor.floor;
        let _ = write!(s, "ν={}: W1={w1:.3e} ≤ {bound:.3e}+{:.2e}; ", row.rate, floor.floor);
    }
    let _ = write!(
        s,
        "domination: {dominated}; slope {slope:.3} in [-0.65,-0.35]: {slope_ok}; floor mean {:.2e}; {:.0}s",
        floor.mean,
        t.elapsed().as_secs_f64()
    );
    outcome(slope_ok && dominated && within(t.elapsed(), 1800), s)
}

fn c9_functional_independence() -> Outcome {
    let mut ok = true;
    let mut s = String::new();
    for nu in [0.5, 4.0 * PI, 1e4] {
        let vals: Vec<f64> = [2, 20, 200].iter().map(|&l| bound_functional_at(l, nu).unwrap().value).collect();
        let reference = (0.25 + 4.0 * PI.sqrt()) * (4.0 * PI / nu).sqrt();
        let identical = vals.iter().all(|v| *v == vals[0]);
        let rel = ((vals[0] - reference) / reference).abs();
        ok &= identical && rel <= 4.0 * f64::EPSILON;
        let _ = write!(s, "ν={nu:.4}: {:.12} identical={identical} rel={rel:.1e}; ", vals[0]);
    }
    outcome(ok, s)
}

fn sweep_bytes(config: &str, workers: &str, dir: &std::path::Path, tag: &str) -> Vec<u8> {
    let cfg_path = dir.join(format!("{tag}.json"));
    fs::write(&cfg_path, config).unwrap();
    let out = dir.join(tag);
    let status = Command::new(env!("CARGO_BIN_EXE_poisson-waves"))
        .args(["--workers", workers, "sweep", "--config"])
        .arg(&cfg_path)
        .arg("--out")
        .arg(&out)
        .stdout(Stdio::null())
        .status()
        .unwrap();
    assert!(status.success(), "sweep run failed");
    fs::read(out.join("sweep.csv")).unwrap()
}

fn c10_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("c4", format!(r#"{{"grid":[[10,50.0]],"replicates":200000,"seed":{SEED},"floor_runs":2}}"#)),
        ("c5", format!(r#"{{"grid":[[8,20.0]],"replicates":200000,"seed":{SEED},"target":"coefficient:0"}}"#)),
        ("c6", format!(r#"{{"grid":[[5,10.0]],"replicates":100000,"seed":{SEED},"target":"norm_squared"}}"#)),
    ];
    let mut same = true;
    let mut s = String::new();
    for (tag, cfg) in &configs {
        let a = sweep_bytes(cfg, "1", dir.path(), &format!("{tag}-w1"));
        let b = sweep_bytes(cfg, "3", dir.path(), &format!("{tag}-w3"));
        same &= a == b;
        let _ = write!(s, "{tag}: {} bytes, identical={}; ", a.len(), a == b);
    }
    outcome(same, s)
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 10] = [
        ("C1 identity suite", c1_identity_suite),
        ("C2 quartic-integral identity", c2_quartic_identity),
        ("C3 asymptotic constant", c3_asymptotic_constant),
        ("C4 Monte Carlo cum4 of T(x)", c4_point_cumulant),
        ("C5 Monte Carlo cum4 of a_{l,0}", c5_coefficient_cumulant),
        ("C6 norm moments", c6_norm_moments),
        ("C7 cum4 bracket", c7_bracket),
        ("C8 rate recovery", c8_rate_recovery),
        ("C9 functional bound independence", c9_functional_independence),
        ("C10 determinism across workers", c10_determinism),
    ];
    let only: Option<String> = std::env::args().nth(1).filter(|a| !a.starts_with('-'));
    let mut failures = 0;
    for (name, f) in criteria {
        if let Some(filter) = &only {
            if !name.starts_with(&format!("{filter} ")) {
                continue;
            }
        }
        let o = f();
        failures += usize::from(!o.passed);
        println!("{} {name}: {}", if o.passed { "PASS" } else { "FAIL" }, o.summary);
    }
    if failures > 0 {
        println!("{failures} criterion(s) failed");
        std::process::exit(1);
    }
}
