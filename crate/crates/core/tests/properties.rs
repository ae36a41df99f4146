use approx::assert_relative_eq;
use poisson_waves::bounds::{bound_harmonic_d3, bound_one_dim, evaluate, SmoothnessBudget, Theorem};
use poisson_waves::mc::{k_statistics_of, rng};
use poisson_waves::model::{field_value, harmonic_coefficients, read_realization, write_realization, Realization};
use poisson_waves::moments::{cum4_coefficient, cum4_point};
use poisson_waves::sphfn::{legendre, legendre_sum, real_sph_harm, sph_harm_row, SphereQuadrature};
use poisson_waves::{neumaier, NeumaierSum, Point};
use proptest::prelude::*;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::PI;

fn point() -> impl Strategy<Value = Point> {
    (-1.0..=1.0_f64, 0.0..(2.0 * PI)).prop_map(|(z, phi)| {
        let s = ((1.0 - z) * (1.0 + z)).sqrt();
        Point::from_vector(s * phi.cos(), s * phi.sin(), z).unwrap()
    })
}

proptest! {
    #[test]
    fn legendre_is_bounded_with_parity(ell in 0usize..400, t in -1.0..=1.0_f64) {
        let p = legendre(ell, t).unwrap();
        let q = legendre(ell, -t).unwrap();
        prop_assert!(p.abs() <= 1.0 + 1e-12);
        let sign = if ell % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((q - sign * p).abs() <= 1e-13);
    }

    #[test]
    fn vector_sum_matches_scalar_legendre(ell in 0usize..60, ts in prop::collection::vec(-1.0..=1.0_f64, 0..700)) {
        let direct = neumaier(ts.iter().map(|&t| legendre(ell, t).unwrap()));
        prop_assert!((legendre_sum(ell, &ts) - direct).abs() <= 1e-12 * (ts.len() as f64).max(1.0));
    }

    #[test]
    fn single_precision_tracks_double(ell in 0usize..30, t in -1.0..=1.0_f64) {
        let p64 = legendre(ell, t).unwrap();
        let p32 = legendre(ell, t as f32).unwrap();
        prop_assert!((f64::from(p32) - p64).abs() <= 2e-5);
    }

    #[test]
    fn addition_formula(ell in 0usize..80, x in point(), y in point()) {
        let (a, b) = (sph_harm_row(ell, &x).unwrap(), sph_harm_row(ell, &y).unwrap());
        let lhs = neumaier(a.iter().zip(&b).map(|(u, v)| u * v));
        let rhs = (2 * ell + 1) as f64 / (4.0 * PI) * legendre(ell, x.dot(&y)).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (2 * ell + 1) as f64);
    }

    #[test]
    fn row_matches_single_harmonics(ell in 0usize..25, x in point()) {
        let row = sph_harm_row(ell, &x).unwrap();
        for m in -(ell as i64)..=ell as i64 {
            let y = real_sph_harm(ell, m, &x).unwrap();
            prop_assert!((row[(m + ell as i64) as usize] - y).abs() <= 1e-12);
        }
    }

    #[test]
    fn harmonics_orthonormal(l1 in 0usize..10, l2 in 0usize..10, i in 0usize..21, j in 0usize..21) {
        let (m1, m2) = ((i % (2 * l1 + 1)) as i64 - l1 as i64, (j % (2 * l2 + 1)) as i64 - l2 as i64);
        let quad = SphereQuadrature::new(12).unwrap();
        let g = quad.integrate(|p| real_sph_harm(l1, m1, p).unwrap() * real_sph_harm(l2, m2, p).unwrap());
        let expect = if (l1, m1) == (l2, m2) { 1.0 } else { 0.0 };
        prop_assert!((g - expect).abs() <= 1e-12);
    }

    #[test]
    fn compensated_sum_is_order_insensitive(mut xs in prop::collection::vec(-1e6..1e6_f64, 1..300), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let a: f64 = xs.iter().copied().collect::<NeumaierSum>().value();
        xs.shuffle(&mut rng::stream(seed, 0));
        let b: f64 = xs.iter().copied().collect::<NeumaierSum>().value();
        let scale: f64 = xs.iter().map(|x| x.abs()).sum();
        prop_assert!((a - b).abs() <= 1e-15 * scale);
    }

    #[test]
    fn cumulants_scale_as_inverse_rate(ell in 1usize..40, nu in 0.01..1e4_f64, m in -3i64..=3) {
        let base: f64 = cum4_point(ell, 1.0).unwrap();
        assert_relative_eq!(cum4_point(ell, nu).unwrap() * nu, base, max_relative = 1e-12);
        if m.unsigned_abs() as usize <= ell {
            let c: f64 = cum4_coefficient(ell, m, 1.0).unwrap();
            assert_relative_eq!(cum4_coefficient(ell, m, nu).unwrap() * nu, c, max_relative = 1e-12);
        }
    }

    #[test]
    fn bounds_scale_and_budget(ell in 2usize..200, nu in 0.1..1e5_f64, c in 0.1..10.0_f64) {
        let b1 = bound_one_dim(ell, nu).unwrap().value;
        assert_relative_eq!(b1 * nu.sqrt(), bound_one_dim(ell, 1.0).unwrap().value, max_relative = 1e-12);
        let unit = SmoothnessBudget::unit();
        let h = bound_harmonic_d3(ell, nu, unit).unwrap().value;
        let hc = bound_harmonic_d3(ell, nu, unit.scaled(c)).unwrap().value;
        assert_relative_eq!(hc, c * h, max_relative = 1e-12);
    }
}

#[test]
fn every_bound_is_positive_and_decreasing() {
    for theorem in Theorem::ALL {
        let mut last = f64::INFINITY;
        for nu in [0.5, 5.0, 50.0, 500.0] {
            let v = evaluate(theorem, Some(7), nu, Some(4), SmoothnessBudget::unit()).unwrap().value;
            assert!(v > 0.0 && v < last, "{theorem} at ν = {nu}");
            last = v;
        }
    }
}

#[test]
fn synthesis_inverts_analysis() {
    for (ell, nu, seed) in [(1, 3.0, 1), (10, 20.0, 2), (60, 10.0, 3), (100, 5.0, 4)] {
        let r = Realization::sample(nu, seed).unwrap();
        let a = harmonic_coefficients(&r, ell).unwrap();
        let tol = 1e-9 * (r.len() as f64 / nu.sqrt()).max(1.0);
        let mut g = rng::stream(seed, 7);
        for _ in 0..50 {
            let x = rng::uniform_sphere(&mut g);
            let t = field_value(&r, ell, &x).unwrap();
            assert!((a.synthesize(&x).unwrap() - t).abs() <= tol, "ℓ = {ell}");
        }
    }
}

#[test]
fn realization_file_round_trip() {
    let r = Realization::sample(2.5, 77).unwrap();
    let mut buf = Vec::new();
    write_realization(&r, &mut buf).unwrap();
    let back = read_realization(buf.as_slice()).unwrap();
    assert_eq!(back, r);
    assert!(read_realization(&b"{\"rate\":1.0,\"seed\":0,\"count\":2}\n0 0 1\n"[..]).is_err());
    assert!(read_realization(&b"not json\n"[..]).is_err());
}

/// On exactly Gaussian data every k-statistic comparison should pass at 4 SE
/// almost always.
#[test]
fn estimator_sanity_on_gaussian_data() {
    let mut passes = 0;
    let mut total = 0;
    for seed in 0..50 {
        let mut g = rng::stream(1000 + seed, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| StandardNormal.sample(&mut g)).collect();
        let k = k_statistics_of(&xs, 20).unwrap();
        for (j, target) in [(1, 1.0), (2, 0.0), (3, 0.0)] {
            total += 1;
            passes += usize::from((k.k[j] - target).abs() <= 4.0 * k.se[j]);
        }
    }
    assert!(passes as f64 >= 0.99 * total as f64, "{passes}/{total}");
}
