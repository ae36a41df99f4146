//! The verification suite: special-function identities, angular-momentum
//! algebra, cumulant formulas and bound properties, each recorded as one
//! named check with its worst measured deviation.

use crate::args::Level;
use crate::commands::verify_config;
use crate::output::{CheckResult, Clock, RunManifest};
use poisson_waves::bounds::{bound_functional, bound_functional_at, evaluate, SmoothnessBudget, Theorem};
use poisson_waves::mc::rng::{stream, uniform_sphere};
use poisson_waves::moments::{
    cum4_bracket, cum4_coefficient, cum4_coefficient_sum, cum4_point, norm_moments, quartic_integral, QuarticRoute,
};
use poisson_waves::sphfn::{
    gauss_legendre_rule, legendre, normalized_legendre_column, quadrature_order, sph_harm_row, SphereQuadrature,
};
use poisson_waves::wigner::exact::wigner3j_exact;
use poisson_waves::wigner::{gaunt_quartic, Cg, ThreeJ, Wigner};
use poisson_waves::{neumaier, Point, Result};
use rand::Rng;
use std::f64::consts::PI;

/// Source of 3j and Clebsch–Gordan values under test.
pub trait CoefficientProvider: Sync {
    fn three_j(&self, key: ThreeJ) -> Result<f64>;
    fn cg(&self, key: Cg) -> Result<f64>;
}

/// The library's own evaluator.
pub struct Library;

impl CoefficientProvider for Library {
    fn three_j(&self, key: ThreeJ) -> Result<f64> {
        Wigner::global().three_j(key)
    }

    fn cg(&self, key: Cg) -> Result<f64> {
        Wigner::global().cg(key)
    }
}

/// Degree limits per level.
struct Limits {
    norm: usize,
    addition: usize,
    zero_row: usize,
    central: usize,
    random_l: u32,
    exact_l: u32,
    gaunt: u32,
    quartic: usize,
    bracket: usize,
    stability: usize,
    unitarity_extra: &'static [(u32, u32)],
}

impl Limits {
    fn of(level: Level) -> Self {
        match level {
            Level::Fast => Self {
                norm: 20,
                addition: 20,
                zero_row: 20,
                central: 20,
                random_l: 20,
                exact_l: 12,
                gaunt: 3,
                quartic: 20,
                bracket: 20,
                stability: 500,
                unitarity_extra: &[],
            },
            Level::Full => Self {
                norm: 100,
                addition: 200,
                zero_row: 100,
                central: 100,
                random_l: 200,
                exact_l: 40,
                gaunt: 6,
                quartic: 50,
                bracket: 200,
                stability: 2000,
                unitarity_extra: &[(50, 50), (100, 37), (100, 100)],
            },
        }
    }
}

fn check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<(f64, String)>) -> CheckResult {
    match f() {
        Ok((measured, detail)) => CheckResult {
            name: name.into(),
            passed: measured <= tolerance,
            measured,
            tolerance,
            detail,
        },
        Err(e) => CheckResult {
            name: name.into(),
            passed: false,
            measured: f64::NAN,
            tolerance,
            detail: e.to_string(),
        },
    }
}

/// Tracks the largest deviation and where it occurred.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
}

impl Worst {
    fn see(&mut self, dev: f64, at: impl FnOnce() -> String) {
        // NaN compares false: force it to register.
        if dev.is_nan() || dev > self.value || self.at.is_empty() {
            self.value = if dev.is_nan() { f64::INFINITY } else { dev };
            self.at = at();
        }
    }

    fn done(self) -> Result<(f64, String)> {
        Ok((self.value, format!("worst at {}", self.at)))
    }
}

fn random_points(n: usize, seed: u64, salt: u64) -> Vec<Point> {
    let mut rng = stream(seed, salt);
    (0..n).map(|_| uniform_sphere(&mut rng)).collect()
}

fn random_key<R: Rng>(rng: &mut R, lmax: u32) -> ThreeJ {
    loop {
        let l1 = rng.random_range(0..=lmax);
        let l2 = rng.random_range(0..=lmax);
        let l3 = rng.random_range(l1.abs_diff(l2)..=l1 + l2);
        let m1 = rng.random_range(-(l1 as i32)..=l1 as i32);
        let m2 = rng.random_range(-(l2 as i32)..=l2 as i32);
        let key = ThreeJ::new(l1, l2, l3, m1, m2, -m1 - m2);
        if key.selection_rules_hold() {
            return key;
        }
    }
}

fn parity(n: i64) -> f64 {
    if n.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

fn legendre_endpoints() -> Result<(f64, String)> {
    let mut bad = 0usize;
    for ell in 0..=10_000 {
        bad += usize::from(legendre(ell, 1.0_f64)? != 1.0);
        bad += usize::from(legendre(ell, -1.0_f64)? != parity(ell as i64));
    }
    Ok((bad as f64, "mismatches for ℓ ≤ 10000".into()))
}

fn legendre_norm(lmax: usize) -> Result<(f64, String)> {
    let mut w = Worst::default();
    for ell in 0..=lmax {
        let rule = gauss_legendre_rule::<f64>(quadrature_order(2, ell))?;
        let mut err = None;
        let v = 0.5 * rule.integrate(|t| legendre(ell, t).map(|p| p * p).unwrap_or_else(|e| {
            err = Some(e);
            0.0
        }));
        if let Some(e) = err {
            return Err(e);
        }
        w.see((v - 1.0 / (2 * ell + 1) as f64).abs(), || format!("ℓ={ell}"));
    }
    w.done()
}

fn addition_formula(lmax: usize, seed: u64) -> Result<(f64, String)> {
    let pts = random_points(100, seed, 1);
    let mut w = Worst::default();
    for ell in 0..=lmax {
        let k = (2 * ell + 1) as f64 / (4.0 * PI);
        let rows: Vec<Vec<f64>> = pts.iter().map(|p| sph_harm_row(ell, p)).collect::<Result<_>>()?;
        for (i, row) in rows.iter().enumerate() {
            let diag = neumaier(row.iter().map(|y| y * y));
            w.see((diag - k).abs() / (2 * ell + 1) as f64, || format!("ℓ={ell}, diagonal"));
            let j = (i + 1) % rows.len();
            let cross = neumaier(row.iter().zip(&rows[j]).map(|(a, b)| a * b));
            let expect = k * legendre(ell, pts[i].dot(&pts[j]))?;
            w.see((cross - expect).abs() / (2 * ell + 1) as f64, || format!("ℓ={ell}, pair"));
        }
    }
    w.done()
}

fn duplication_formula(seed: u64) -> Result<(f64, String)> {
    let pts = random_points(6, seed, 2);
    let mut w = Worst::default();
    for ell in 1..=20 {
        let quad = SphereQuadrature::new(ell + 2)?;
        let k = (2 * ell + 1) as f64 / (4.0 * PI);
        for pair in pts.chunks(2) {
            let (x, y) = (&pair[0], &pair[1]);
            let mut failed = None;
            let lhs = quad.integrate(|z| match (legendre(ell, x.dot(z)), legendre(ell, z.dot(y))) {
                (Ok(a), Ok(b)) => k * k * a * b,
                (Err(e), _) | (_, Err(e)) => {
                    failed = Some(e);
                    0.0
                }
            });
            if let Some(e) = failed {
                return Err(e);
            }
            let rhs = k * legendre(ell, x.dot(y))?;
            w.see((lhs - rhs).abs(), || format!("ℓ={ell}"));
        }
    }
    w.done()
}

fn harmonic_orthonormality() -> Result<(f64, String)> {
    const L: usize = 20;
    let quad = SphereQuadrature::new(L + 2)?;
    let nodes: Vec<(Point, f64)> = quad.nodes().collect();
    // values[f][node] for every (ℓ, m) with ℓ ≤ L.
    let mut labels = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    for ell in 0..=L {
        let rows: Vec<Vec<f64>> = nodes.iter().map(|(p, _)| sph_harm_row(ell, p)).collect::<Result<_>>()?;
        for m in 0..=2 * ell {
            labels.push((ell, m as i64 - ell as i64));
            values.push(rows.iter().map(|r| r[m]).collect());
        }
    }
    let mut w = Worst::default();
    for a in 0..values.len() {
        for b in a..values.len() {
            let g = neumaier(nodes.iter().enumerate().map(|(i, (_, wt))| wt * values[a][i] * values[b][i]));
            let target = if a == b { 1.0 } else { 0.0 };
            w.see((g - target).abs(), || format!("{:?} vs {:?}", labels[a], labels[b]));
        }
    }
    w.done()
}

fn harmonic_stability(ell: usize, seed: u64) -> Result<(f64, String)> {
    let mut w = Worst::default();
    for t in [-1.0, -0.999_999, -0.3, 0.0, 0.5, 0.99, 1.0] {
        for m in (0..=ell).step_by(ell.div_ceil(64).max(1)) {
            let col = normalized_legendre_column::<f64>(m, ell, t)?;
            if let Some(bad) = col.iter().position(|v| !v.is_finite()) {
                w.see(f64::INFINITY, || format!("non-finite at ℓ={}, m={m}, t={t}", m + bad));
            }
        }
    }
    let k = (2 * ell + 1) as f64 / (4.0 * PI);
    for p in random_points(4, seed, 3).iter().chain([Point::north_pole()].iter()) {
        let row = sph_harm_row(ell, p)?;
        let s = neumaier(row.iter().map(|y| y * y));
        w.see((s - k).abs() / (2 * ell + 1) as f64, || format!("addition at ℓ={ell}"));
    }
    w.done()
}

fn unitarity(provider: &dyn CoefficientProvider, extra: &[(u32, u32)]) -> Result<(f64, String)> {
    let mut pairs: Vec<(u32, u32)> = (0..=20).flat_map(|a| (0..=20).map(move |b| (a, b))).collect();
    pairs.extend_from_slice(extra);
    let mut w = Worst::default();
    for (l1, l2) in pairs {
        let (i1, i2) = (l1 as i32, l2 as i32);
        for big_m in -(i1 + i2)..=(i1 + i2) {
            let ms: Vec<i32> = ((-i1).max(big_m - i2)..=i1.min(big_m + i2)).collect();
            let ls: Vec<u32> = (l1.abs_diff(l2).max(big_m.unsigned_abs())..=l1 + l2).collect();
            // u[i][j] = C^{ls[j], M}_{l1 ms[i]; l2 M-ms[i]}
            let mut u = vec![vec![0.0; ls.len()]; ms.len()];
            for (i, &m1) in ms.iter().enumerate() {
                for (j, &l) in ls.iter().enumerate() {
                    u[i][j] = provider.cg(Cg::new(l1, m1, l2, big_m - m1, l, big_m))?;
                }
            }
            let n = ms.len();
            for a in 0..n {
                for b in a..n {
                    let target = if a == b { 1.0 } else { 0.0 };
                    let cols = neumaier((0..n).map(|i| u[i][a] * u[i][b]));
                    let rows = neumaier((0..n).map(|j| u[a][j] * u[b][j]));
                    w.see((cols - target).abs(), || format!("ℓ1={l1}, ℓ2={l2}, M={big_m}, L={}/{}", ls[a], ls[b]));
                    w.see((rows - target).abs(), || format!("ℓ1={l1}, ℓ2={l2}, M={big_m}, m1={}/{}", ms[a], ms[b]));
                }
            }
        }
    }
    w.done()
}

fn zero_row(provider: &dyn CoefficientProvider, lmax: u32) -> Result<(f64, String)> {
    let mut w = Worst::default();
    for ell in 0..=lmax {
        let mut sums = vec![0.0; 2 * ell as usize + 1];
        for m in -(ell as i32)..=ell as i32 {
            for (l, s) in sums.iter_mut().enumerate() {
                let c = provider.cg(Cg::new(ell, -m, ell, m, l as u32, 0))?;
                *s += c * c;
            }
        }
        for (l, s) in sums.iter().enumerate() {
            w.see((s - 1.0).abs(), || format!("ℓ={ell}, L={l}"));
        }
    }
    w.done()
}

fn central_value(provider: &dyn CoefficientProvider, lmax: u32) -> Result<(f64, String)> {
    let mut w = Worst::default();
    for ell in 0..=lmax {
        let c = provider.cg(Cg::new(ell, 0, ell, 0, 0, 0))?;
        let expect = 1.0 / f64::from(2 * ell + 1);
        w.see((c * c - expect).abs() / expect, || format!("ℓ={ell}"));
    }
    w.done()
}

fn roundtrip(provider: &dyn CoefficientProvider, lmax: u32, seed: u64) -> Result<(f64, String)> {
    let mut rng = stream(seed, 4);
    let mut w = Worst::default();
    for _ in 0..1000 {
        let key = random_key(&mut rng, lmax);
        let [l1, l2, l3] = key.l;
        let [m1, m2, m3] = key.m;
        let cg = Cg::new(l1, m1, l2, m2, l3, -m3);
        let (back_key, factor) = cg.to_three_j();
        debug_assert_eq!(back_key, key);
        let tj = provider.three_j(key)?;
        let back = provider.cg(cg)? / factor;
        w.see((tj - back).abs(), || format!("{key:?}"));
    }
    w.done()
}

fn exact_oracle(provider: &dyn CoefficientProvider, lmax: u32, seed: u64) -> Result<(f64, String)> {
    let mut rng = stream(seed, 5);
    let mut w = Worst::default();
    for _ in 0..200 {
        let key = random_key(&mut rng, lmax);
        let exact = wigner3j_exact(key)?.to_f64();
        w.see((provider.three_j(key)? - exact).abs(), || format!("{key:?}"));
    }
    w.done()
}

fn symmetry(provider: &dyn CoefficientProvider, lmax: u32, seed: u64) -> Result<(f64, String)> {
    let mut rng = stream(seed, 6);
    let mut w = Worst::default();
    for _ in 0..1000 {
        let key = random_key(&mut rng, lmax);
        let [l1, l2, l3] = key.l;
        let [m1, m2, m3] = key.m;
        let sign = parity(i64::from(l1 + l2 + l3));
        let v = provider.three_j(key)?;
        let swapped = provider.three_j(ThreeJ::new(l2, l1, l3, m2, m1, m3))?;
        let flipped = provider.three_j(ThreeJ::new(l1, l2, l3, -m1, -m2, -m3))?;
        w.see((swapped - sign * v).abs(), || format!("exchange {key:?}"));
        w.see((flipped - sign * v).abs(), || format!("reflection {key:?}"));
    }
    w.done()
}

fn gaunt_vs_quadrature(lmax: u32) -> Result<(f64, String)> {
    let mut w = Worst::default();
    for ell in 0..=lmax {
        let quad = SphereQuadrature::new(2 * ell as usize + 2)?;
        let nodes: Vec<(Point, f64)> = quad.nodes().collect();
        let rows: Vec<Vec<f64>> = nodes.iter().map(|(p, _)| sph_harm_row(ell as usize, p)).collect::<Result<_>>()?;
        let n = 2 * ell as usize + 1;
        let li = ell as i32;
        for a in 0..n {
            for b in a..n {
                for c in b..n {
                    for d in c..n {
                        let q = neumaier(nodes.iter().zip(&rows).map(|((_, wt), r)| wt * r[a] * r[b] * r[c] * r[d]));
                        let m = [a, b, c, d].map(|i| i as i32 - li);
                        let g = gaunt_quartic(ell, m)?;
                        w.see((g - q).abs(), || format!("ℓ={ell}, m={m:?}"));
                    }
                }
            }
        }
    }
    w.done()
}

fn quartic_identity(lmax: usize) -> Result<(f64, String)> {
    let mut w = Worst::default();
    for ell in 0..=lmax {
        let q: f64 = quartic_integral(ell, QuarticRoute::Quadrature)?;
        let g: f64 = quartic_integral(ell, QuarticRoute::Wigner)?;
        w.see((q - g).abs() / g, || format!("ℓ={ell}"));
    }
    w.done()
}

fn cumulants_positive() -> Result<(f64, String)> {
    let mut bad = 0usize;
    for ell in 1..=20 {
        let rate = 3.0;
        bad += usize::from(cum4_point(ell, rate)? <= 0.0);
        bad += usize::from(cum4_coefficient_sum(ell, rate)? <= 0.0);
        bad += usize::from(norm_moments(ell, rate)?.defect() <= 0.0);
        for m in -(ell as i64)..=ell as i64 {
            bad += usize::from(cum4_coefficient(ell, m, rate)? <= 0.0);
            bad += usize::from(cum4_coefficient(ell, m, rate)? != cum4_coefficient(ell, -m, rate)?);
        }
    }
    Ok((bad as f64, "non-positive or m-asymmetric values for ℓ ≤ 20".into()))
}

fn bracket(lmax: usize) -> Result<(f64, String)> {
    let mut bad = Vec::new();
    for ell in 2..=lmax {
        let b = cum4_bracket(ell, 1.0)?;
        if !b.contains(cum4_coefficient_sum(ell, 1.0)?) {
            bad.push(ell);
        }
    }
    Ok((bad.len() as f64, format!("violations for 2 ≤ ℓ ≤ {lmax}: {bad:?}")))
}

fn norm_defect() -> Result<(f64, String)> {
    let mut w = Worst::default();
    for ell in [1, 5, 50] {
        for rate in [0.5, 10.0, 1e4] {
            let expect = 4.0 * PI / rate;
            let d = norm_moments(ell, rate)?.defect();
            w.see((d - expect).abs() / expect, || format!("ℓ={ell}, ν={rate}"));
        }
    }
    w.done()
}

fn functional_independence() -> Result<(f64, String)> {
    let mut w = Worst::default();
    for rate in [0.1, 4.0 * PI, 1e3] {
        let reference = (0.25 + 4.0 * PI.sqrt()) * (4.0 * PI / rate).sqrt();
        let base = bound_functional(rate)?.value;
        w.see((base - reference).abs() / reference, || format!("closed form, ν={rate}"));
        for ell in [2, 20, 200] {
            let v = bound_functional_at(ell, rate)?.value;
            w.see((v - base).abs() / reference, || format!("ℓ={ell}, ν={rate}"));
        }
    }
    w.done()
}

#[allow(clippy::neg_cmp_op_on_partial_ord)] // a NaN bound counts as non-decreasing
fn bounds_decrease() -> Result<(f64, String)> {
    let rates = [1.0, 10.0, 100.0, 1e3];
    let mut bad = Vec::new();
    for theorem in Theorem::ALL {
        let values: Vec<f64> = rates
            .iter()
            .map(|&r| evaluate(theorem, Some(10), r, Some(3), SmoothnessBudget::unit()).map(|b| b.value))
            .collect::<Result<_>>()?;
        if values.windows(2).any(|p| !(p[1] < p[0]) || p[1] < 0.0) {
            bad.push(theorem.name());
        }
    }
    Ok((bad.len() as f64, format!("non-decreasing: {bad:?}")))
}

/// Runs every check of `level` against `provider`; the manifest lists each
/// check once, in a fixed order.
pub fn run_suite(level: Level, seed: u64, provider: &dyn CoefficientProvider) -> RunManifest {
    let clock = Clock::start();
    let lim = Limits::of(level);
    let checks = vec![
        check("legendre_endpoints", 0.0, legendre_endpoints),
        check("legendre_norm", 1e-12, || legendre_norm(lim.norm)),
        check("addition_formula", 1e-10, || addition_formula(lim.addition, seed)),
        check("duplication_formula", 1e-9, || duplication_formula(seed)),
        check("harmonic_orthonormality", 1e-9, harmonic_orthonormality),
        check("harmonic_stability", 1e-10, || harmonic_stability(lim.stability, seed)),
        check("cg_unitarity", 1e-11, || unitarity(provider, lim.unitarity_extra)),
        check("cg_zero_row", 1e-11, || zero_row(provider, lim.zero_row as u32)),
        check("cg_central_value", 1e-13, || central_value(provider, lim.central as u32)),
        check("threej_cg_roundtrip", 1e-13, || roundtrip(provider, lim.random_l, seed)),
        check("threej_exact_oracle", 1e-13, || exact_oracle(provider, lim.exact_l, seed)),
        check("threej_symmetry", 1e-13, || symmetry(provider, lim.random_l, seed)),
        check("gaunt_quadrature", 1e-9, || gaunt_vs_quadrature(lim.gaunt)),
        check("quartic_identity", 1e-10, || quartic_identity(lim.quartic)),
        check("cumulants_positive", 0.0, cumulants_positive),
        check("cum4_bracket", 0.0, || bracket(lim.bracket)),
        check("norm_moment_defect", 1e-15, norm_defect),
        check("functional_independence", 1e-15, functional_independence),
        check("bounds_decrease_in_rate", 0.0, bounds_decrease),
    ];
    clock.manifest("verify", &verify_config(level, seed), seed).with_checks(checks)
}
