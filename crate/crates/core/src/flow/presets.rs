//! Reference runs with known answers: the shrinking cylinder and the
//! translating bowl.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::soliton::{solve_bowl, BowlProfile};
use crate::speed::SpeedFunction;

use super::state::{Boundary, FlowHistory, Grid, RadialFlowState, Representation, Scheme};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CylinderRow {
    pub dx: f64,
    pub dt: f64,
    pub steps: usize,
    pub max_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderRegression {
    pub r0: f64,
    pub t_end: f64,
    pub exact: f64,
    pub rows: Vec<CylinderRow>,
    /// Error ratios between successive refinements.
    pub ratios: Vec<f64>,
}

/// Shrinking cylinder `r² = r₀² − 2F(0,1)t` on `[−L, L]` with exact Dirichlet ends,
/// one run per spacing in `dxs` (time step at the stability limit).
pub fn cylinder_regression(
    speed: &SpeedFunction,
    r0: f64,
    half_length: f64,
    t_end: f64,
    dxs: &[f64],
) -> Result<CylinderRegression> {
    let f01 = speed.f01();
    if !(r0 * r0 > 2.0 * f01 * t_end) {
        return Err(FlowError::InvalidParameter(format!(
            "the cylinder of radius {r0} becomes extinct before t = {t_end}"
        )));
    }
    let exact = move |t: f64| (r0 * r0 - 2.0 * f01 * t).sqrt();
    let mut rows = Vec::with_capacity(dxs.len());
    for &dx in dxs {
        let grid = Grid::new(-half_length, half_length, dx)?;
        let bc = Boundary::dirichlet(move |_, t| exact(t));
        let mut st = RadialFlowState::from_fn(Representation::Radial, speed, grid, |_| r0, 0.0, bc.clone(), bc)?;
        let dt_max = st.stable_dt()?;
        let steps = st.advance_to(t_end, Scheme::Heun, Some(dt_max))?;
        let e = exact(t_end);
        let max_error = st.values.iter().fold(0.0f64, |m, v| m.max((v - e).abs()));
        rows.push(CylinderRow {
            dx,
            dt: t_end / steps as f64,
            steps,
            max_error,
        });
    }
    let ratios = rows.windows(2).map(|w| w[0].max_error / w[1].max_error).collect();
    Ok(CylinderRegression {
        r0,
        t_end,
        exact: exact(t_end),
        rows,
        ratios,
    })
}

/// Bowl solved far enough to cover heights up to `z_top`.
pub fn bowl_for_heights(speed: &SpeedFunction, z_top: f64) -> Result<BowlProfile> {
    let mut rho_max = (4.0 * speed.f01() * (z_top + 2.0)).sqrt() + 5.0;
    for _ in 0..8 {
        let b = solve_bowl(speed, rho_max, 1e-11)?;
        if b.height_range().1 > z_top + 1.0 {
            return Ok(b);
        }
        rho_max *= 1.5;
    }
    Err(FlowError::InvalidParameter(format!("bowl does not reach height {z_top}")))
}

/// The bowl as a radial graph `r(z) = ζ⁻¹(z − t/2)` on `[z_lo, z_hi]` with exact ends.
pub fn bowl_state(speed: &SpeedFunction, bowl: Arc<BowlProfile>, z_lo: f64, z_hi: f64, dx: f64) -> Result<RadialFlowState> {
    if !(z_lo > 0.0) {
        return Err(FlowError::InvalidParameter("the window must stay above the tip".into()));
    }
    let grid = Grid::new(z_lo, z_hi, dx)?;
    let b2 = bowl.clone();
    let bc = Boundary::dirichlet(move |z, t| b2.radius_at_height(z - 0.5 * t).unwrap_or(f64::NAN));
    let values = grid
        .nodes()
        .into_iter()
        .map(|z| bowl.radius_at_height(z).ok_or(FlowError::OutOfRange { lo: 0.0, hi: bowl.height_range().1, node: z }))
        .collect::<Result<Vec<_>>>()?;
    RadialFlowState::new(Representation::Radial, speed, grid, values, 0.0, bc.clone(), bc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TranslationReport {
    pub z_lo: f64,
    pub z_hi: f64,
    pub dx: f64,
    pub duration: f64,
    pub steps: usize,
    /// Radius whose level set is tracked.
    pub level_radius: f64,
    pub z_start: f64,
    pub z_end: f64,
    pub measured_speed: f64,
    /// `sup |r(z,T) − ζ⁻¹(z − T/2)|`.
    pub max_profile_error: f64,
}

/// Evolves a bowl window and measures how fast the level set `r = ζ⁻¹(z_level)` rises.
pub fn bowl_translation(speed: &SpeedFunction, z_lo: f64, z_hi: f64, dx: f64, duration: f64, z_level: f64) -> Result<TranslationReport> {
    let bowl = Arc::new(bowl_for_heights(speed, z_hi)?);
    let mut st = bowl_state(speed, bowl.clone(), z_lo, z_hi, dx)?;
    let level_radius = bowl.radius_at_height(z_level).ok_or(FlowError::OutOfRange {
        lo: z_lo,
        hi: z_hi,
        node: z_level,
    })?;
    let z_start = st.level_crossing(level_radius).ok_or(FlowError::OutOfRange {
        lo: z_lo,
        hi: z_hi,
        node: z_level,
    })?;
    let steps = st.advance_to(duration, Scheme::Heun, None)?;
    let z_end = st.level_crossing(level_radius).ok_or(FlowError::OutOfRange {
        lo: z_lo,
        hi: z_hi,
        node: z_level,
    })?;
    let mut max_profile_error: f64 = 0.0;
    for (i, v) in st.values.iter().enumerate() {
        let z = st.grid.x(i);
        if let Some(r) = bowl.radius_at_height(z - 0.5 * duration) {
            max_profile_error = max_profile_error.max((v - r).abs());
        }
    }
    Ok(TranslationReport {
        z_lo,
        z_hi,
        dx,
        duration,
        steps,
        level_radius,
        z_start,
        z_end,
        measured_speed: (z_end - z_start) / duration,
        max_profile_error,
    })
}

/// Bowl run on a high window for the neck diagnostics.
pub fn bowl_tail_run(speed: &SpeedFunction, z_lo: f64, z_hi: f64, dx: f64, duration: f64, stride: usize) -> Result<FlowHistory> {
    let bowl = Arc::new(bowl_for_heights(speed, z_hi)?);
    let st = bowl_state(speed, bowl, z_lo, z_hi, dx)?;
    Ok(st.run(duration, Scheme::Heun, None, stride)?.1)
}
