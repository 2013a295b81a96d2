use approx::assert_relative_eq;
use flowlab::asymptotics::shrinker_stationarity;
use flowlab::flow::{
    bowl_tail_run, bowl_translation, cylinder_regression, extinction_map, heat_barrier_derivatives,
    heat_barrier_limit_probes, heat_barrier_psi, linearize_rescaled_at_cylinder, tip_neck_diagnostics, Boundary,
    Grid, RadialFlowState, Representation, Scheme,
};
use flowlab::flow::linear::BumpDirection;
use flowlab::soliton::{solve_shrinker_with, ShrinkerOptions};
use flowlab::{FlowError, SpeedFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn cylinder_regression_second_order() {
    let sp = SpeedFunction::sum(3).unwrap();
    let rep = cylinder_regression(&sp, 2.0, 5.0, 0.25, &[0.2, 0.1, 0.05]).unwrap();
    assert_relative_eq!(rep.exact, 3f64.sqrt(), max_relative = 1e-15);
    // the spatially constant solution is resolved exactly up to time stepping error
    assert!(rep.rows.last().unwrap().max_error <= 1e-6, "{:?}", rep.rows);
    assert!(rep.ratios.iter().all(|r| *r >= 3.5), "{:?}", rep.ratios);
    assert!(cylinder_regression(&sp, 1.0, 5.0, 0.25, &[0.1]).is_err());
}

#[test]
fn rescaled_cylinder_is_fixed() {
    for sp in [SpeedFunction::brendle_huisken(3).unwrap(), SpeedFunction::sigma_ratio(4, 2).unwrap()] {
        let sigma = sp.cylinder_radius();
        let g = Grid::new(-3.0, 3.0, 0.1).unwrap();
        let st = RadialFlowState::from_fn(Representation::Rescaled, &sp, g, |_| sigma, 0.0, Boundary::Extrapolate, Boundary::Extrapolate).unwrap();
        assert!(st.max_interior_rate().unwrap() < 1e-14);
    }
}

#[test]
fn bowl_translates_at_one_half() {
    let sp = SpeedFunction::sum(3).unwrap();
    let rep = bowl_translation(&sp, 2.0, 12.0, 0.05, 1.0, 7.0).unwrap();
    assert!((rep.measured_speed - 0.5).abs() <= 1e-3, "{rep:?}");
}

#[test]
fn rr_z_tail_limit_on_the_bowl() {
    let sp = SpeedFunction::sum(3).unwrap();
    let h = bowl_tail_run(&sp, 200.0, 400.0, 0.5, 2.0, 10).unwrap();
    let d = tip_neck_diagnostics(&h, &sp).unwrap();
    assert!((d.tail_limit - 4.0).abs() <= 0.08, "{}", d.tail_limit);
    assert!((d.tip_speed - 0.5).abs() < 1e-2, "{}", d.tip_speed);
    assert!(d.bound_held);
}

#[test]
fn shrinking_cylinder_saturates_extinction_bound() {
    let sp = SpeedFunction::brendle_huisken(3).unwrap();
    let r0 = 2.0;
    let f01 = sp.f01();
    let g = Grid::new(-2.0, 2.0, 0.1).unwrap();
    let bc = Boundary::dirichlet(move |_, t| (r0 * r0 - 2.0 * f01 * t).sqrt());
    let st = RadialFlowState::from_fn(Representation::Radial, &sp, g, |_| r0, 0.0, bc.clone(), bc).unwrap();
    let (_, h) = st.run(2.0, Scheme::Heun, None, 20).unwrap();
    let e = extinction_map(&h, &sp).unwrap();
    let t_ext = r0 * r0 / (2.0 * f01);
    for te in &e.extinction {
        assert_relative_eq!(*te, t_ext, max_relative = 1e-5);
    }
    assert!(e.min_slack >= -1e-8, "{}", e.min_slack);
}

#[test]
fn pinch_floor_stops_the_run() {
    let sp = SpeedFunction::sum(3).unwrap();
    let g = Grid::new(-1.0, 1.0, 0.1).unwrap();
    let st = RadialFlowState::from_fn(Representation::Radial, &sp, g, |_| 0.2, 0.0, Boundary::Extrapolate, Boundary::Extrapolate).unwrap();
    assert!(matches!(st.run(1.0, Scheme::Heun, None, 1), Err(FlowError::Pinch { .. })));
}

#[test]
fn linearization_matches_operator() {
    for sp in [SpeedFunction::sum(3).unwrap(), SpeedFunction::brendle_huisken(3).unwrap()] {
        let rep = linearize_rescaled_at_cylinder(&sp, 0.05, 8.0, 20, 11).unwrap();
        assert_eq!(rep.deviations.len(), 20);
        assert!(rep.passed, "{} {}", rep.max_deviation, rep.tolerance);
    }
}

#[test]
fn shrinker_is_stationary_to_second_order() {
    let sp = SpeedFunction::sum(3).unwrap();
    let p = solve_shrinker_with(&sp, 25.0, &ShrinkerOptions::default()).unwrap();
    let coarse = shrinker_stationarity(&p, 3.0, 20.0, 0.1).unwrap();
    let fine = shrinker_stationarity(&p, 3.0, 20.0, 0.05).unwrap();
    assert!(coarse < 1e-4);
    assert!(coarse / fine > 3.0, "{coarse} {fine}");
}

#[test]
fn semi_implicit_preserves_order() {
    let sp = SpeedFunction::sum(3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let d = BumpDirection::random(&mut rng, 4.0, 3);
        let amp = rng.gen_range(0.005..0.05);
        let gap = rng.gen_range(1e-3..5e-2);
        let g = Grid::new(-4.0, 4.0, 0.1).unwrap();
        let lower = move |z: f64| 2.0 + amp * d.eval(z).0;
        let bump = |z: f64| (std::f64::consts::PI * (z + 4.0) / 8.0).sin();
        // both ends follow the shrinking cylinder of radius 2
        let bc_l = Boundary::dirichlet(|_, t| (4.0 - 4.0 * t).sqrt());
        let s1 = RadialFlowState::from_fn(Representation::Radial, &sp, g, lower.clone(), 0.0, bc_l.clone(), bc_l.clone()).unwrap();
        let s2 = RadialFlowState::from_fn(Representation::Radial, &sp, g, |z| lower(z) + gap * bump(z), 0.0, bc_l.clone(), bc_l).unwrap();
        let dt = 4.0 * s1.stable_dt().unwrap().min(s2.stable_dt().unwrap());
        let (mut a, mut b) = (s1, s2);
        for _ in 0..20 {
            a = a.step(dt, Scheme::SemiImplicit).unwrap();
            b = b.step(dt, Scheme::SemiImplicit).unwrap();
            for i in 1..g.n - 1 {
                assert!(a.values[i] < b.values[i]);
            }
        }
    }
}

#[test]
fn heat_barrier_values_and_limits() {
    assert_relative_eq!(heat_barrier_psi(2.0, 1.0).unwrap(), 0.842_700_792_949_714_9, max_relative = 1e-12);
    for p in heat_barrier_limit_probes().unwrap() {
        assert!(p.error() <= 1e-6, "{} {}", p.label, p.value);
    }
    assert!(heat_barrier_psi(0.0, 1.0).is_err());
    assert!(heat_barrier_psi(1.0, -1.0).is_err());
    for z in [0.3, 1.0, 4.0] {
        let (_, pzz) = heat_barrier_derivatives(z, 0.7).unwrap();
        assert!(pzz < 0.0);
    }
}
