use super::exact::{clebsch_gordan_exact, wigner3j_exact};
use super::*;
use crate::sphfn::{real_sph_harm, SphereQuadrature};
use proptest::prelude::*;

fn all_keys(lmax: u32) -> Vec<ThreeJ> {
    let mut out = Vec::new();
    for l1 in 0..=lmax {
        for l2 in 0..=lmax {
            for l3 in l1.abs_diff(l2)..=(l1 + l2).min(lmax) {
                for m1 in -(l1 as i32)..=l1 as i32 {
                    for m2 in -(l2 as i32)..=l2 as i32 {
                        let m3 = -m1 - m2;
                        if m3.unsigned_abs() <= l3 {
                            out.push(ThreeJ::new(l1, l2, l3, m1, m2, m3));
                        }
                    }
                }
            }
        }
    }
    out
}

#[test]
fn recursion_matches_exact_for_small_degrees() {
    let w = Wigner::default();
    let mut worst = 0.0_f64;
    for key in all_keys(9) {
        let exact = wigner3j_exact(key).unwrap().to_f64();
        let got = w.three_j(key).unwrap();
        let err = (got - exact).abs();
        worst = worst.max(err);
        assert!(err <= 1e-14, "{key:?}: {got} vs {exact}");
    }
    assert!(worst < 1e-14);
}

#[test]
fn recursion_matches_exact_at_moderate_degrees() {
    let w = Wigner::default();
    for &(l1, l2, m1, m2) in &[(30, 25, 7, -3), (40, 40, 0, 0), (40, 40, 20, -20), (60, 17, -15, 9), (50, 50, 49, -1)] {
        let fam = w.family(l1, l2, m1, m2).unwrap();
        for (l3, v) in fam.iter() {
            let exact = wigner3j_exact(ThreeJ::new(l1, l2, l3, m1, m2, -m1 - m2)).unwrap().to_f64();
            assert!((v - exact).abs() <= 1e-13 * exact.abs().max(1e-3), "({l1} {l2} {l3}; {m1} {m2}): {v} vs {exact}");
        }
    }
}

#[test]
fn known_values() {
    assert!((wigner3j(1, 1, 2, 0, 0, 0).unwrap() - 0.365_148_371_670_110_7).abs() < 1e-15);
    assert!((clebsch_gordan(1, 0, 1, 0, 0, 0).unwrap() + 1.0 / 3.0_f64.sqrt()).abs() < 1e-15);
    assert_eq!(wigner3j(1, 1, 3, 0, 0, 0).unwrap(), 0.0);
    assert_eq!(wigner3j(2, 2, 2, 1, 1, 1).unwrap(), 0.0);
    assert_eq!(wigner3j(1, 1, 1, 0, 0, 0).unwrap(), 0.0);
}

#[test]
fn capacity_is_enforced() {
    assert!(matches!(wigner3j(5001, 5000, 1, 0, 0, 0), Err(crate::Error::Capacity(_))));
    assert!(wigner3j_exact(ThreeJ::new(401, 1, 401, 0, 0, 0)).is_err());
}

#[test]
fn stable_at_high_degree() {
    let ell = 2000;
    let fam = wigner3j_family::<f64>(ell, ell, 37, -37).unwrap();
    assert!(fam.values.iter().all(|v| v.is_finite()));
    // Orthogonality: Σ_{ℓ3} (2ℓ3+1) (3j)² = 1 for any fixed (m1, m2).
    let s = crate::neumaier(fam.iter().map(|(l, v)| (2 * l + 1) as f64 * v * v));
    assert!((s - 1.0).abs() < 1e-12);
    let row = central_row::<f64>(ell).unwrap();
    for l in (0..=2 * ell).step_by(250) {
        let v = fam.get(l);
        assert!(v.is_finite());
        let z = row[l as usize];
        assert!(z.is_finite() && (l % 2 == 1 || z != 0.0));
    }
    let zero_fam = wigner3j_family::<f64>(ell, ell, 0, 0).unwrap();
    for l in (0..=2 * ell).step_by(97) {
        assert!((zero_fam.get(l) - row[l as usize]).abs() < 1e-12, "L={l}");
    }
}

#[test]
fn cg_exact_and_float_agree() {
    for key in all_keys(5) {
        let cg = Cg::new(key.l[0], key.m[0], key.l[1], key.m[1], key.l[2], -key.m[2]);
        let e = clebsch_gordan_exact(cg).unwrap().to_f64();
        assert!((clebsch_gordan(cg.l1, cg.m1, cg.l2, cg.m2, cg.l, cg.m).unwrap() - e).abs() < 1e-14);
    }
}

#[test]
fn quartic_integral_identity() {
    for ell in [0, 1, 2, 5, 20, 75, 300] {
        let q: f64 = crate::sphfn::legendre_quartic_integral(ell as usize).unwrap();
        let w = quartic_integral_via_wigner(ell).unwrap();
        assert!((q - w).abs() <= 1e-12 * q, "ell={ell}: {q} vs {w}");
    }
}

#[test]
fn gaunt_matches_quadrature() {
    let q = SphereQuadrature::new(12).unwrap();
    for ell in [1_u32, 2, 3, 4] {
        let l = ell as i32;
        for ms in [[0, 0, 0, 0], [1, 1, 1, 1], [-1, -1, 1, 1], [l, -l, 0, 0], [1, -1, 1, -1], [l, l, -l, -l], [1, 0, -1, 0], [-l, 1, -1, 0]] {
            if ms.iter().any(|m| m.unsigned_abs() > ell) {
                continue;
            }
            let quad = q.integrate(|p| {
                ms.iter().map(|&m| real_sph_harm(ell as usize, m as i64, p).unwrap()).product()
            });
            let g = gaunt_quartic(ell, ms).unwrap();
            assert!((g - quad).abs() < 1e-13, "ell={ell} m={ms:?}: {g} vs {quad}");
        }
    }
}

#[test]
fn zero_row_parity_and_table() {
    // (2 2 L; 0 0 0)² = 1/5, 2/35, 2/35 for L = 0, 2, 4.
    let r = central_row::<f64>(2).unwrap();
    assert!((r[0] * r[0] - 0.2).abs() < 1e-16);
    assert!((r[2] * r[2] - 2.0 / 35.0).abs() < 1e-16);
    assert!((r[4] * r[4] - 2.0 / 35.0).abs() < 1e-16);
    assert_eq!(r[1], 0.0);
    assert_eq!(r[3], 0.0);
}

fn key_strategy() -> impl Strategy<Value = ThreeJ> {
    (0_u32..25, 0_u32..25).prop_flat_map(|(l1, l2)| {
        let l3 = l1.abs_diff(l2)..=(l1 + l2);
        (Just(l1), Just(l2), l3, -(l1 as i32)..=l1 as i32, -(l2 as i32)..=l2 as i32)
            .prop_filter_map("m3 out of range", |(l1, l2, l3, m1, m2)| {
                let m3 = -m1 - m2;
                (m3.unsigned_abs() <= l3).then(|| ThreeJ::new(l1, l2, l3, m1, m2, m3))
            })
    })
}

proptest! {
    #[test]
    fn column_permutation_symmetry(key in key_strategy()) {
        let [l1, l2, l3] = key.l;
        let [m1, m2, m3] = key.m;
        let v = wigner3j(l1, l2, l3, m1, m2, m3).unwrap();
        let odd = if (l1 + l2 + l3) % 2 == 0 { 1.0 } else { -1.0 };
        prop_assert!((wigner3j(l2, l3, l1, m2, m3, m1).unwrap() - v).abs() < 1e-13);
        prop_assert!((wigner3j(l2, l1, l3, m2, m1, m3).unwrap() - odd * v).abs() < 1e-13);
        prop_assert!((wigner3j(l1, l2, l3, -m1, -m2, -m3).unwrap() - odd * v).abs() < 1e-13);
    }

    #[test]
    fn cg_round_trip(key in key_strategy()) {
        let [l1, l2, l3] = key.l;
        let [m1, m2, m3] = key.m;
        let cg = clebsch_gordan(l1, m1, l2, m2, l3, -m3).unwrap();
        let sign = if (i64::from(l1) - i64::from(l2) - i64::from(m3)).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        let back = sign * cg / f64::from(2 * l3 + 1).sqrt();
        prop_assert!((back - wigner3j(l1, l2, l3, m1, m2, m3).unwrap()).abs() < 1e-13);
    }

    #[test]
    fn cg_column_unitarity(l1 in 0_u32..12, l2 in 0_u32..12, m_seed in any::<i32>()) {
        // Σ_{m1} (C^{L M}_{ℓ1 m1; ℓ2 M-m1})² = 1, for each admissible L.
        let lmax = l1 + l2;
        for l in l1.abs_diff(l2)..=lmax {
            let m = m_seed.rem_euclid(2 * l as i32 + 1) - l as i32;
            let s: f64 = (-(l1 as i32)..=l1 as i32)
                .map(|m1| clebsch_gordan(l1, m1, l2, m - m1, l, m).unwrap().powi(2))
                .sum();
            prop_assert!((s - 1.0).abs() < 1e-13);
        }
    }
}

fn wide_key_strategy() -> impl Strategy<Value = ThreeJ> {
    (0_u32..60, 0_u32..60).prop_flat_map(|(l1, l2)| {
        let l3 = l1.abs_diff(l2)..=(l1 + l2);
        (Just(l1), Just(l2), l3, -(l1 as i32)..=l1 as i32, -(l2 as i32)..=l2 as i32)
            .prop_filter_map("m3 out of range", |(l1, l2, l3, m1, m2)| {
                let m3 = -m1 - m2;
                (m3.unsigned_abs() <= l3).then(|| ThreeJ::new(l1, l2, l3, m1, m2, m3))
            })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]
    #[test]
    fn float_path_tracks_exact_oracle(key in wide_key_strategy()) {
        let exact = wigner3j_exact(key).unwrap().to_f64();
        let got = Wigner::global().three_j(key).unwrap();
        let max_in_family = 1.0 / f64::from(2 * key.l[2] + 1).sqrt();
        prop_assert!((got - exact).abs() <= 1e-14 * max_in_family.max(exact.abs()) + 1e-300,
            "{:?}: {} vs {}", key, got, exact);
    }
}
