//! Rotationally symmetric solitons: the translating bowl and the
//! self-shrinking caps `Ψ_a`, with their barrier and ellipticity diagnostics.

pub mod bowl;
pub mod diagnostics;
pub mod shrinker;

pub use bowl::{solve_bowl, solve_bowl_with, BowlOptions, BowlProfile};
pub use diagnostics::{
    shrinker_lower_bound_check, LowerBoundReport,
    shrinker_to_bowl_convergence, shrinker_upper_bound_check, shrinker_w_diagnostic, GapRow,
    UpperBoundReport, WDiagnostic,
};
pub use shrinker::{solve_shrinker, solve_shrinker_with, EllipticityMonitor, ShrinkerOptions, ShrinkerProfile, ZNode};

use crate::error::Result;
use crate::fit::fit_basis;

/// Extrapolates `β(ρ) = ψ_ρ/ρ` to `ρ = 0` with a quadratic in `ρ²`.
pub(crate) fn extrapolate_tip(rho: &[f64], beta: &[f64]) -> Result<f64> {
    let fit = fit_basis(rho, beta, None, 3, |j, r| (r * r).powi(j as i32))?;
    Ok(fit.coefficients[0])
}

/// `c = inf_{x ≥ 0} 1/∂_xF(x, 1)`, sampled on a logarithmic grid.
pub fn ellipticity_constant_c(speed: &crate::SpeedFunction) -> f64 {
    let mut best = f64::INFINITY;
    let mut probe = |x: f64| {
        if let Ok((_, fx, _)) = speed.restriction_with_partials(x, 1.0) {
            best = best.min(1.0 / fx);
        }
    };
    probe(0.0);
    for i in 0..=2400 {
        probe(10f64.powf(-6.0 + 18.0 * i as f64 / 2400.0));
    }
    best
}

/// `K = max{1, 6F(0,1), 17/c}` from the neck comparison argument.
pub fn neck_constant_k(speed: &crate::SpeedFunction) -> f64 {
    let c = ellipticity_constant_c(speed);
    1f64.max(6.0 * speed.f01()).max(17.0 / c)
}
