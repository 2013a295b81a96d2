use approx::assert_relative_eq;
use flowlab::geometry::{
    bowl_curvature_self_check, expansion_error_a, expansion_error_g, scale_sweep, trace_gamma, trace_gamma_cylinder,
    trace_gamma_matrix_fd, CylinderGraph, FrameTensor,
};
use flowlab::soliton::solve_bowl;
use flowlab::SpeedFunction;

fn zs() -> Vec<f64> {
    (0..=300).map(|i| -3.0 + 0.02 * i as f64).collect()
}

#[test]
fn cylinder_trace_is_weighted_sum() {
    for sp in [SpeedFunction::brendle_huisken(3).unwrap(), SpeedFunction::sigma_ratio(5, 3).unwrap()] {
        let r = sp.cylinder_radius();
        let g = CylinderGraph::from_fn(r, &[0.0], |_| (0.0, 0.0, 0.0)).unwrap();
        let s = FrameTensor::diagonal(0.9, -0.35);
        let grad = sp.gradient_slice(&{
            let mut l = vec![1.0 / r; sp.n()];
            l[0] = 0.0;
            l
        })
        .unwrap();
        let expected = grad[0] * 0.9 + grad[1..].iter().map(|d| d * -0.35).sum::<f64>();
        let t = trace_gamma(&g, &sp, &[s]).unwrap()[0];
        assert_relative_eq!(t, expected, max_relative = 1e-12);
        assert_relative_eq!(trace_gamma_cylinder(&sp, &s), expected, max_relative = 1e-12);
        let fd = trace_gamma_matrix_fd(0.0, 1.0 / r, &sp, &s, 1e-5).unwrap();
        assert_relative_eq!(fd, expected, epsilon = 1e-7);
    }
}

#[test]
fn expansion_constants_are_scale_stable() {
    let graph = CylinderGraph::from_fn(2.0, &zs(), |z| {
        let e = (-z * z).exp();
        (0.01 * e * z, 0.01 * e * (1.0 - 2.0 * z * z), 0.01 * e * (4.0 * z * z * z - 6.0 * z))
    })
    .unwrap();
    let a = scale_sweep(&graph, 5, |g| expansion_error_a(g).map(|r| r.principal)).unwrap();
    assert_eq!(a.rows.len(), 6);
    assert!(a.is_stable(0.2), "{a:?}");
    for sp in [SpeedFunction::brendle_huisken(4).unwrap(), SpeedFunction::sigma_ratio(4, 2).unwrap()] {
        let s = scale_sweep(&graph, 5, |g| expansion_error_g(g, &sp)).unwrap();
        assert!(s.is_stable(0.2), "{s:?}");
    }
}

#[test]
fn tensor_form_error_is_quadratic() {
    let graph = CylinderGraph::from_fn(2.0, &zs(), |z| (0.01 * (-z * z).exp(), -0.02 * z * (-z * z).exp(), 0.01 * (4.0 * z * z - 2.0) * (-z * z).exp())).unwrap();
    let big = expansion_error_a(&graph).unwrap();
    let small = expansion_error_a(&graph.scaled(0.5)).unwrap();
    assert!(big.tensor.sup_error / small.tensor.sup_error > 3.5);
}

#[test]
fn bowl_curvatures_self_check() {
    for sp in [SpeedFunction::sum(4).unwrap(), SpeedFunction::brendle_huisken(3).unwrap()] {
        let b = solve_bowl(&sp, 30.0, 1e-10).unwrap();
        let err = bowl_curvature_self_check(&b, &[0.3, 2.0, 10.0, 40.0]).unwrap();
        assert!(err < 1e-8, "{} {err}", sp.kind());
    }
}
