//! Seeded perturbations of the cylinder in the rescaled flow.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::flow::{bowl_for_heights, Boundary, FlowHistory, Grid, RadialFlowState, Representation, Scheme};
use crate::speed::SpeedFunction;

use super::basis::{build_basis, HermiteBasis};
use super::decompose::decompose_samples;
use super::eigen::eigenvalue;
use super::quadrature::hermite_h;
use super::trace::{gamma_trace_from_run, GammaTrace, TraceOptions};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRunOptions {
    pub epsilon: f64,
    /// Grid half-width in units of `√a`.
    pub half_width: f64,
    /// Target spacing; adjusted down so the grid closes exactly.
    pub dx: f64,
    pub duration: f64,
    /// Snapshot stride in steps.
    pub stride: usize,
    pub k_max: usize,
    pub quad_order: usize,
}

impl Default for ModeRunOptions {
    fn default() -> Self {
        ModeRunOptions {
            epsilon: 1e-4,
            half_width: 12.0,
            dx: 0.05,
            duration: 1.0,
            stride: 50,
            k_max: 24,
            quad_order: 120,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeRateReport {
    pub k: usize,
    pub mu: f64,
    /// `⟨u, H_k⟩/‖H_k‖²` at the start and the end.
    pub alpha_start: f64,
    pub alpha_end: f64,
    pub duration: f64,
    /// `α(T)/α(0)` against `e^{μT}`.
    pub measured_factor: f64,
    pub expected_factor: f64,
    pub rel_error: f64,
    /// `α(T) − α(0)`, the relevant number for the stationary mode.
    pub drift: f64,
}

/// A finished seeded run with the basis used to read it.
pub struct ModeRun {
    pub sigma: f64,
    pub basis: HermiteBasis,
    pub history: FlowHistory,
    pub report: ModeRateReport,
}

fn symmetric_grid(half: f64, dx: f64) -> Result<Grid> {
    let cells = (2.0 * half / dx).ceil();
    Grid::new(-half, half, 2.0 * half / cells)
}

/// Evolves `σ + εH_k(z/(2√a))` and measures the growth of its `H_k` amplitude.
pub fn rescaled_mode_run(speed: &SpeedFunction, n: usize, k: usize, opts: &ModeRunOptions) -> Result<ModeRun> {
    if k > opts.k_max {
        return Err(FlowError::InvalidParameter(format!("mode {k} above the basis degree {}", opts.k_max)));
    }
    let a = speed.a_lin();
    let sigma = speed.cylinder_radius();
    let s = 2.0 * a.sqrt();
    let grid = symmetric_grid(opts.half_width * a.sqrt(), opts.dx)?;
    let basis = build_basis(a, opts.k_max, opts.quad_order)?;
    let mu = eigenvalue(k, 0, n);
    let eps = opts.epsilon;
    let linear = move |z: f64, tau: f64| sigma + eps * (mu * tau).exp() * hermite_h(k, z / s);
    let bc = Boundary::dirichlet(linear);
    let st = RadialFlowState::from_fn(Representation::Rescaled, speed, grid, |z| linear(z, 0.0), 0.0, bc.clone(), bc)?;
    let (_, history) = st.run(opts.duration, Scheme::Heun, None, opts.stride)?;
    let amplitude = |vals: &[f64]| -> Result<f64> {
        let u: Vec<f64> = vals.iter().map(|v| v - sigma).collect();
        let d = decompose_samples(&basis, &grid, &u, n)?;
        Ok(d.coefficients[k] / basis.hermite_norm(k))
    };
    let alpha_start = amplitude(&history.snapshots[0])?;
    let alpha_end = amplitude(history.snapshots.last().expect("run keeps the final state"))?;
    let measured_factor = alpha_end / alpha_start;
    let expected_factor = (mu * opts.duration).exp();
    let report = ModeRateReport {
        k,
        mu,
        alpha_start,
        alpha_end,
        duration: opts.duration,
        measured_factor,
        expected_factor,
        rel_error: (measured_factor / expected_factor - 1.0).abs(),
        drift: alpha_end - alpha_start,
    };
    Ok(ModeRun {
        sigma,
        basis,
        history,
        report,
    })
}

/// Window-to-window factor of `Γ⁺` along a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayLawReport {
    /// `Γ⁺_{k+1}/Γ⁺_k`.
    pub ratios: Vec<f64>,
    /// `exp` of the least-squares slope of `log Γ⁺_k`.
    pub fitted_factor: f64,
    pub target: f64,
    pub rel_error: f64,
    /// Whether `Γ⁺_{k+1} ≤ e^{−1}Γ⁺_k (1 + slack)` at every step.
    pub bound_held: bool,
}

pub fn decay_law(trace: &GammaTrace, slack: f64) -> Result<DecayLawReport> {
    let p = &trace.big_plus;
    if p.len() < 2 || p.iter().any(|v| !(*v > 0.0)) {
        return Err(FlowError::WindowTooShort { got: p.len(), needed: 2 });
    }
    let ratios: Vec<f64> = p.windows(2).map(|w| w[1] / w[0]).collect();
    let ks: Vec<f64> = (0..p.len()).map(|k| k as f64).collect();
    let logs: Vec<f64> = p.iter().map(|v| v.ln()).collect();
    let (slope, _) = crate::fit::line(&ks, &logs)?;
    let target = (-1.0f64).exp();
    let fitted_factor = slope.exp();
    Ok(DecayLawReport {
        bound_held: ratios.iter().all(|r| *r <= target * (1.0 + slack)),
        ratios,
        fitted_factor,
        target,
        rel_error: (fitted_factor / target - 1.0).abs(),
    })
}

/// Rescaled run of a `k`-seed over `windows` unit windows together with its trace.
pub fn seeded_trace(speed: &SpeedFunction, n: usize, k: usize, windows: usize, opts: &ModeRunOptions) -> Result<(ModeRun, GammaTrace)> {
    let o = ModeRunOptions {
        duration: windows as f64,
        ..*opts
    };
    let run = rescaled_mode_run(speed, n, k, &o)?;
    let trace = gamma_trace_from_run(&run.history, &run.basis, n, run.sigma, &TraceOptions::default())?;
    Ok((run, trace))
}

/// Rescaled flow started from the bowl at `τ₀ = τ_end − windows` with the
/// exact rescaled bowl as boundary data: `v(z,τ) = e^{τ/2} ζ⁻¹(e^{−τ/2}z + e^{−τ}/2)`.
pub fn bowl_rescaled_run(speed: &SpeedFunction, tau_end: f64, windows: usize, opts: &ModeRunOptions) -> Result<(FlowHistory, HermiteBasis, f64)> {
    let a = speed.a_lin();
    let half = opts.half_width * a.sqrt();
    let tau0 = tau_end - windows as f64;
    let top = (-0.5 * tau0).exp() * half + 0.5 * (-tau0).exp();
    let bowl = Arc::new(bowl_for_heights(speed, top)?);
    let exact = {
        let bowl = bowl.clone();
        move |z: f64, tau: f64| {
            let h = (-0.5 * tau).exp() * z + 0.5 * (-tau).exp();
            bowl.radius_at_height(h).map(|r| (0.5 * tau).exp() * r).unwrap_or(f64::NAN)
        }
    };
    let grid = symmetric_grid(half, opts.dx)?;
    let bc = Boundary::dirichlet(exact.clone());
    let st = RadialFlowState::from_fn(Representation::Rescaled, speed, grid, |z| exact(z, tau0), tau0, bc.clone(), bc)?;
    let (_, history) = st.run(tau_end, Scheme::Heun, None, opts.stride)?;
    let basis = build_basis(a, opts.k_max, opts.quad_order)?;
    Ok((history, basis, speed.cylinder_radius()))
}
