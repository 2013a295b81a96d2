use flowlab::audit::{audit_geometry, audit_speed, random_cone_point, random_inverse_point};
use flowlab::geometry::CylinderGraph;
use flowlab::io::{read_csv, write_csv};
use flowlab::spectral::{build_basis, cutoff_chi, decompose, HermiteBasis};
use flowlab::SpeedFunction;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::sync::OnceLock;

fn speeds() -> Vec<SpeedFunction> {
    vec![
        SpeedFunction::sum(3).unwrap(),
        SpeedFunction::sum(5).unwrap(),
        SpeedFunction::brendle_huisken(3).unwrap(),
        SpeedFunction::brendle_huisken(4).unwrap(),
        SpeedFunction::sigma_ratio(4, 2).unwrap(),
        SpeedFunction::sigma_ratio(5, 3).unwrap(),
    ]
}

fn speed_index() -> impl Strategy<Value = usize> {
    0..speeds().len()
}

fn basis() -> &'static HermiteBasis {
    static B: OnceLock<HermiteBasis> = OnceLock::new();
    B.get_or_init(|| build_basis(0.4, 16, 60).unwrap())
}

#[test]
fn audits_pass_on_100_samples() {
    for sp in speeds() {
        let a = audit_speed(&sp, 100, 7).unwrap();
        assert!(a.passed(), "{a:?}");
    }
}

#[test]
fn geometry_ratios_stable_over_five_halvings() {
    for sp in speeds() {
        let g = audit_geometry(&sp, sp.cylinder_radius(), 0.01, 5).unwrap();
        assert!(g.passed(0.2), "{g:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn homogeneity(i in speed_index(), seed in any::<u64>(), t in 0.1f64..20.0) {
        let sp = &speeds()[i];
        let l = random_cone_point(sp, &mut ChaCha8Rng::seed_from_u64(seed));
        let tl: Vec<f64> = l.iter().map(|x| t * x).collect();
        let lhs = sp.eval_slice(&tl).unwrap();
        let rhs = t * sp.eval_slice(&l).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs());
    }

    #[test]
    fn symmetry_under_swaps(i in speed_index(), seed in any::<u64>(), p in 0usize..5, q in 0usize..5) {
        let sp = &speeds()[i];
        let l = random_cone_point(sp, &mut ChaCha8Rng::seed_from_u64(seed));
        let mut m = l.clone();
        m.swap(p % l.len(), q % l.len());
        let (a, b) = (sp.eval_slice(&l).unwrap(), sp.eval_slice(&m).unwrap());
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }

    #[test]
    fn gradient_positive_and_matches_differences(i in speed_index(), seed in any::<u64>()) {
        let sp = &speeds()[i];
        let l = random_cone_point(sp, &mut ChaCha8Rng::seed_from_u64(seed));
        let g = sp.gradient_slice(&l).unwrap();
        let h = 1e-6;
        for j in 0..l.len() {
            prop_assert!(g[j] > 0.0);
            let (mut lp, mut lm) = (l.clone(), l.clone());
            lp[j] += h;
            lm[j] -= h;
            if sp.contains_slice(&lm) {
                let fd = (sp.eval_slice(&lp).unwrap() - sp.eval_slice(&lm).unwrap()) / (2.0 * h);
                prop_assert!((fd - g[j]).abs() <= 1e-6 * g[j].abs().max(1.0), "{fd} vs {}", g[j]);
            }
        }
    }

    #[test]
    fn inverse_round_trip_and_scaling(i in speed_index(), seed in any::<u64>(), t in 0.2f64..5.0) {
        let sp = &speeds()[i];
        let (y, z) = random_inverse_point(sp, &mut ChaCha8Rng::seed_from_u64(seed));
        let inv = sp.inverse();
        let x = inv.invert(y, z).unwrap();
        let back = sp.restriction(x, y).unwrap();
        prop_assert!((back - z).abs() <= 1e-12 * z.abs());
        let xt = inv.invert(t * y, t * z).unwrap();
        prop_assert!((xt - t * x).abs() <= 1e-10 * (t * x).abs().max(1e-300));
    }

    #[test]
    fn inverse_monotone_in_z(i in speed_index(), seed in any::<u64>()) {
        let sp = &speeds()[i];
        let (y, z) = random_inverse_point(sp, &mut ChaCha8Rng::seed_from_u64(seed));
        let inv = sp.inverse();
        let z2 = z * 1.001;
        if inv.in_domain(y, z2) {
            prop_assert!(inv.invert(y, z2).unwrap() > inv.invert(y, z).unwrap());
        }
    }

    #[test]
    fn midpoint_concavity(i in speed_index(), s1 in any::<u64>(), s2 in any::<u64>()) {
        let sp = &speeds()[i];
        let l = random_cone_point(sp, &mut ChaCha8Rng::seed_from_u64(s1));
        let m = random_cone_point(sp, &mut ChaCha8Rng::seed_from_u64(s2));
        let mid: Vec<f64> = l.iter().zip(&m).map(|(a, b)| 0.5 * (a + b)).collect();
        let lhs = sp.eval_slice(&mid).unwrap();
        let rhs = 0.5 * (sp.eval_slice(&l).unwrap() + sp.eval_slice(&m).unwrap());
        if sp.is_linear() {
            prop_assert!((lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0));
        } else {
            prop_assert!(lhs >= rhs - 1e-12 * lhs.abs().max(1.0));
        }
    }

    #[test]
    fn band_limited_round_trip(c in prop::collection::vec(-1.0f64..1.0, 15)) {
        let b = basis();
        let u = |z: f64| c.iter().enumerate().map(|(k, ck)| ck * b.mode(k, z)).sum::<f64>();
        let d = decompose(b, u, 3).unwrap();
        for (k, ck) in c.iter().enumerate() {
            prop_assert!((d.coefficients[k] - ck).abs() <= 1e-10);
        }
        prop_assert!(d.residual_norm(b, u) <= 1e-10);
        // Parseval
        prop_assert!((d.total_norm2 - d.retained_norm2()).abs() <= 1e-10 * d.total_norm2.max(1.0));
        prop_assert!(!d.truncation_warning);
    }

    #[test]
    fn cutoff_is_even_bounded_and_non_increasing(s in 0.0f64..1.5, ds in 0.0f64..0.5) {
        let (a, b) = (cutoff_chi(s), cutoff_chi(s + ds));
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert!(b <= a);
        prop_assert_eq!(cutoff_chi(-s), a);
    }

    #[test]
    fn graph_smallness_scales_linearly(amp in 0.001f64..0.05, s in 0.1f64..1.0) {
        let z: Vec<f64> = (0..=100).map(|i| -2.0 + 0.04 * i as f64).collect();
        let g = CylinderGraph::from_fn(2.0, &z, |z| {
            let e = (-z * z).exp();
            (amp * e, -2.0 * z * amp * e, (4.0 * z * z - 2.0) * amp * e)
        }).unwrap();
        let h = g.scaled(s);
        prop_assert!((h.smallness() - s * g.smallness()).abs() <= 1e-12);
        prop_assert!((h.quadratic_scale() - s * s * g.quadratic_scale()).abs() <= 1e-12 * g.quadratic_scale().max(1e-300));
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 1..20)) {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, "test/1", &["a", "b", "c"], &rows).unwrap();
        let t = read_csv(&p).unwrap();
        prop_assert_eq!(t.schema.as_str(), "test/1");
        prop_assert_eq!(t.rows, rows);
    }
}
