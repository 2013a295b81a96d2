use flowlab::asymptotics::{
    bowl_reductions, fit_bowl_expansion, fit_bowl_expansion_with, fit_shrinker_neck, measure_rescaled_decay,
};
use flowlab::flow::{Boundary, Grid, RadialFlowState, Representation, Scheme};
use flowlab::soliton::{solve_bowl, solve_shrinker_with, ShrinkerOptions};
use flowlab::spectral::{bowl_rescaled_run, rescaled_mode_run, ModeRunOptions};
use flowlab::{FlowError, SpeedFunction};
use rayon::prelude::*;

#[test]
fn bowl_expansion_coefficient() {
    for (sp, target) in [(SpeedFunction::sum(3).unwrap(), -2.0), (SpeedFunction::brendle_huisken(3).unwrap(), -0.64)] {
        let b = solve_bowl(&sp, 1000.0, 1e-10).unwrap();
        let fit = fit_bowl_expansion(&b, [100.0, 1000.0]).unwrap();
        let c2 = fit.coefficients[0];
        assert!((c2 / target - 1.0).abs() < 0.05, "{} c2 = {c2}", sp.kind());
        assert!(fit.residual_ok(), "{}", fit.relative_residual);
        // doubling the sample count leaves the coefficient in place
        let fine = fit_bowl_expansion_with(&b, [100.0, 1000.0], 400).unwrap();
        assert!((fine.coefficients[0] / c2 - 1.0).abs() < 0.01);
        let red = bowl_reductions(&b, &[1000.0]).unwrap()[0];
        assert!((red.theta * 2.0 * sp.f01() - 1.0).abs() < 1e-4);
        assert!(red.xi.abs() < 0.01);
        assert!((red.lambda / target - 1.0).abs() < 0.05);
    }
}

#[test]
fn narrow_windows_are_rejected() {
    let b = solve_bowl(&SpeedFunction::sum(3).unwrap(), 300.0, 1e-9).unwrap();
    assert!(matches!(fit_bowl_expansion(&b, [100.0, 200.0]), Err(FlowError::WindowTooNarrow(_))));
}

#[test]
fn neck_sweep_bounds() {
    let sp = SpeedFunction::sum(3).unwrap();
    let profiles: Vec<_> = [25.0, 50.0, 100.0, 200.0]
        .par_iter()
        .map(|&a| solve_shrinker_with(&sp, a, &ShrinkerOptions::default()).unwrap())
        .collect();
    let sweep = fit_shrinker_neck(&profiles, 20.0).unwrap();
    assert!(sweep.lower_held);
    assert!(sweep.c_max.is_finite());
    assert!(sweep.top_spread < 2.0, "{:?}", sweep.c_fit);
    assert!(fit_shrinker_neck(&profiles[..3], 20.0).is_err());
}

#[test]
fn linear_mode_grows_at_one_half() {
    let sp = SpeedFunction::sum(3).unwrap();
    let opts = ModeRunOptions { duration: 6.0, ..Default::default() };
    let run = rescaled_mode_run(&sp, 3, 1, &opts).unwrap();
    let fit = measure_rescaled_decay(&run.history, run.sigma, 2.0).unwrap();
    let slope = fit.slope.unwrap();
    assert!((slope - 0.5).abs() < 0.01, "{slope}");
    let short = rescaled_mode_run(&sp, 3, 1, &ModeRunOptions::default()).unwrap();
    assert!(matches!(measure_rescaled_decay(&short.history, short.sigma, 2.0), Err(FlowError::WindowTooShort { .. })));
}

#[test]
fn cylinder_seed_is_a_fixed_point() {
    let sp = SpeedFunction::sum(3).unwrap();
    let sigma = sp.cylinder_radius();
    let g = Grid::new(-5.0, 5.0, 0.1).unwrap();
    let bc = Boundary::dirichlet(move |_, _| sigma);
    let st = RadialFlowState::from_fn(Representation::Rescaled, &sp, g, |_| sigma, 0.0, bc.clone(), bc).unwrap();
    let (_, h) = st.run(6.0, Scheme::Heun, None, 200).unwrap();
    let fit = measure_rescaled_decay(&h, sigma, 10.0).unwrap();
    assert!(fit.fixed_point && fit.slope.is_none());
}

#[test]
fn bowl_side_growth_rate() {
    let sp = SpeedFunction::sum(3).unwrap();
    let (h, _, sigma) = bowl_rescaled_run(&sp, -7.0, 8, &ModeRunOptions::default()).unwrap();
    let fit = measure_rescaled_decay(&h, sigma, 2.0).unwrap();
    assert!((fit.slope.unwrap() - 0.5).abs() < 0.05, "{fit:?}");
}
