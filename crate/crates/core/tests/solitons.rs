use approx::assert_relative_eq;
use flowlab::soliton::{
    neck_constant_k, shrinker_lower_bound_check, shrinker_to_bowl_convergence, shrinker_upper_bound_check,
    shrinker_w_diagnostic, solve_bowl, solve_shrinker_with, ShrinkerOptions,
};
use flowlab::SpeedFunction;

fn all_speeds() -> Vec<SpeedFunction> {
    let mut v = Vec::new();
    for n in [3, 4] {
        v.push(SpeedFunction::sum(n).unwrap());
        v.push(SpeedFunction::brendle_huisken(n).unwrap());
        v.push(SpeedFunction::sigma_ratio(n, 2).unwrap());
    }
    v
}

#[test]
fn bowl_tip_curvature_all_speeds() {
    for sp in all_speeds() {
        let b = solve_bowl(&sp, 20.0, 1e-10).unwrap();
        let target = 1.0 / (2.0 * sp.f11());
        assert_relative_eq!(b.tip_curvature, target, max_relative = 1e-6);
        assert!(b.is_convex_increasing(), "{}", sp.kind());
        assert!(b.max_node_residual < 1e-7, "{} {}", sp.kind(), b.max_node_residual);
    }
}

#[test]
fn bowl_slope_approaches_linear_growth() {
    // ζ_ρ/ρ → 1/(2F(0,1))
    for sp in all_speeds() {
        let b = solve_bowl(&sp, 400.0, 1e-10).unwrap();
        let theta = b.slope_at(400.0).unwrap() / 400.0;
        assert_relative_eq!(theta, 1.0 / (2.0 * sp.f01()), max_relative = 1e-3);
    }
}

#[test]
fn sum_shrinker_tip_matches_bowl() {
    let sp = SpeedFunction::sum(3).unwrap();
    for a in [20.0, 40.0] {
        let p = solve_shrinker_with(&sp, a, &ShrinkerOptions::default()).unwrap();
        assert_relative_eq!(p.tip_curvature, 1.0 / 6.0, max_relative = 1e-6);
        assert!(p.inversion_error <= 1e-10);
        assert!(p.monitor.identity_residual <= 1e-8);
        assert!(p.monitor.upper_bound_held && p.monitor.lower_bound_held);
    }
}

#[test]
fn shrinker_profile_invariants() {
    for sp in [SpeedFunction::sum(3).unwrap(), SpeedFunction::brendle_huisken(3).unwrap()] {
        let a = 25.0;
        let p = solve_shrinker_with(&sp, a, &ShrinkerOptions::default()).unwrap();
        let f01 = sp.f01();
        // v(a) = 0 closes the cap
        assert_eq!(p.v_at(a), Some(0.0));
        for w in p.z_nodes.windows(2) {
            assert!(w[1].z > w[0].z);
            assert!(w[1].v <= w[0].v);
        }
        for n in p.interior_z_nodes() {
            assert!(n.v * n.v < 2.0 * f01);
            assert!(n.v_zz < 0.0);
        }
        // ρψ_ρ − ψ ≥ 0 and the lower barrier
        for r in &p.psi_rows {
            assert!(r[0] * r[2] - r[1] >= -1e-12);
            assert!(r[1] >= p.theta * r[0] * r[0] / (4.0 * sp.f11()) * (1.0 - 1e-9));
        }
        assert!(p.limit_error_estimate < 1e-6);
    }
}

#[test]
fn lower_bound_without_violations() {
    let sp = SpeedFunction::sum(3).unwrap();
    for a in [25.0, 50.0] {
        let p = solve_shrinker_with(&sp, a, &ShrinkerOptions::default()).unwrap();
        let rep = shrinker_lower_bound_check(&p);
        assert!(rep.nodes > 100);
        assert_eq!(rep.violations, 0, "a = {a}, margin {}", rep.min_margin);
        let up = shrinker_upper_bound_check(&p, 0.5 * a).unwrap();
        assert!(up.c_fit.is_finite() && up.c_fit >= 0.0);
        assert!(shrinker_upper_bound_check(&p, a).is_err());
    }
}

#[test]
fn neck_quantity_above_two_with_tip_limit() {
    let sp = SpeedFunction::sum(3).unwrap();
    let p = solve_shrinker_with(&sp, 25.0, &ShrinkerOptions::default()).unwrap();
    let w = shrinker_w_diagnostic(&p, 10.0);
    assert!(w.above_two, "min w = {}", w.min_w);
    assert_eq!(w.tip_target, 3.0);
    assert!(w.tip_rel_error < 0.02, "{}", w.tip_extrapolated);
    assert_relative_eq!(w.k_const, neck_constant_k(&sp));
}

#[test]
fn shrinkers_converge_to_bowl() {
    let sp = SpeedFunction::sum(3).unwrap();
    let rows = shrinker_to_bowl_convergence(&sp, &[20.0, 40.0, 80.0], 10.0, &ShrinkerOptions::default()).unwrap();
    assert!(rows[0].sup_gap > rows[1].sup_gap && rows[1].sup_gap > rows[2].sup_gap);
    assert!(rows[2].sup_gap < 0.25 * rows[0].sup_gap);
    assert!(shrinker_to_bowl_convergence(&sp, &[40.0, 20.0], 10.0, &ShrinkerOptions::default()).is_err());
}
