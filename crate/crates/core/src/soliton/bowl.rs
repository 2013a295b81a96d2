//! The bowl soliton `ζ`, translating with speed ½:
//! `ζ_ρρ = (1 + ζ_ρ²) f(ζ_ρ/ρ, ½)` with `ζ(0) = ζ_ρ(0) = 0`.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::interp::{hermite, HermiteTable};
use crate::ode::{integrate, Control, Dopri5Options, StepStats};
use crate::speed::SpeedFunction;

use super::extrapolate_tip;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowlOptions {
    pub tol: f64,
    /// Regularized start; the series `ζ = ρ²/(4F(1,1))` is used below it.
    pub rho_start: f64,
    /// Radius of the finely resolved tip segment used for the curvature fit.
    pub tip_region: f64,
    pub tip_step: f64,
}

impl Default for BowlOptions {
    fn default() -> Self {
        BowlOptions {
            tol: 1e-10,
            rho_start: 1e-4,
            tip_region: 0.1,
            tip_step: 0.004,
        }
    }
}

/// Solved bowl profile on `0 = ρ₀ < ρ₁ < … < ρ_N`.
#[derive(Debug, Clone)]
pub struct BowlProfile {
    speed: SpeedFunction,
    pub tol: f64,
    pub rho: Vec<f64>,
    pub zeta: Vec<f64>,
    pub zeta_rho: Vec<f64>,
    pub zeta_rhorho: Vec<f64>,
    /// Extrapolated `ζ_ρρ(0)`.
    pub tip_curvature: f64,
    /// Smallest `C` with `C⁻¹ρ ≤ ζ_ρ ≤ Cρ` on the grid.
    pub slope_constant: f64,
    /// Largest ODE residual at accepted nodes, scaled by `1 + |ζ_ρρ|`.
    pub max_node_residual: f64,
    /// Largest residual of the cubic interpolant at segment midpoints.
    pub max_midpoint_defect: f64,
    pub stats: StepStats,
    zeta_table: HermiteTable,
    slope_table: HermiteTable,
}

fn bowl_rhs(speed: &SpeedFunction, rho: f64, p: f64) -> Result<f64> {
    if !(p > 0.0) || !(rho > 0.0) {
        return Err(FlowError::ConeExit {
            location: "rho",
            value: rho,
        });
    }
    let x = speed.inverse().invert_extended(p / rho, 0.5)?;
    Ok((1.0 + p * p) * x)
}

pub fn solve_bowl(speed: &SpeedFunction, rho_max: f64, tol: f64) -> Result<BowlProfile> {
    solve_bowl_with(
        speed,
        rho_max,
        &BowlOptions {
            tol,
            ..BowlOptions::default()
        },
    )
}

pub fn solve_bowl_with(speed: &SpeedFunction, rho_max: f64, opts: &BowlOptions) -> Result<BowlProfile> {
    if !(rho_max > opts.rho_start) {
        return Err(FlowError::InvalidParameter(format!(
            "rho_max = {rho_max} must exceed the start radius {}",
            opts.rho_start
        )));
    }
    if !(opts.tol > 0.0) {
        return Err(FlowError::InvalidParameter("tolerance must be positive".into()));
    }
    let sp = *speed;
    let f01 = sp.f01();
    let r0 = opts.rho_start;
    let y0 = [r0 * r0 / (4.0 * sp.f11()), r0 / (2.0 * sp.f11())];
    let rhs = |rho: f64, y: &[f64; 2]| -> Result<[f64; 2]> { Ok([y[1], bowl_rhs(&sp, rho, y[1])?]) };
    let observer = |rho: f64, y: &[f64; 2], _: &[f64; 2]| -> Result<Control> {
        // accepted nodes must sit strictly inside U
        if !(y[1] > 0.0) || !(0.5 * rho / y[1] > f01) {
            return Err(FlowError::ConeExit {
                location: "rho",
                value: rho,
            });
        }
        Ok(Control::Continue)
    };
    let tip_end = opts.tip_region.min(rho_max);
    let o1 = Dopri5Options {
        h_max: opts.tip_step,
        ..Dopri5Options::with_tol(opts.tol)
    };
    let t1 = integrate(rhs, r0, y0, tip_end, &o1, observer)?;
    let mut rho = vec![0.0];
    let mut zeta = vec![0.0];
    let mut zr = vec![0.0];
    let mut zrr = vec![f64::NAN];
    for i in 0..t1.len() {
        rho.push(t1.t[i]);
        zeta.push(t1.y[i][0]);
        zr.push(t1.y[i][1]);
        zrr.push(t1.dy[i][1]);
    }
    let mut stats = t1.stats;
    if tip_end < rho_max {
        let (t_last, y_last) = t1.last();
        let o2 = Dopri5Options::with_tol(opts.tol);
        let t2 = integrate(rhs, t_last, y_last, rho_max, &o2, observer)?;
        for i in 1..t2.len() {
            rho.push(t2.t[i]);
            zeta.push(t2.y[i][0]);
            zr.push(t2.y[i][1]);
            zrr.push(t2.dy[i][1]);
        }
        stats.accepted += t2.stats.accepted;
        stats.rejected += t2.stats.rejected;
        stats.failed_stages += t2.stats.failed_stages;
        stats.rhs_evals += t2.stats.rhs_evals;
    }

    let (fr, fb): (Vec<f64>, Vec<f64>) = rho
        .iter()
        .zip(&zr)
        .filter(|(r, _)| **r >= 0.1 * opts.tip_region && **r <= opts.tip_region)
        .map(|(r, p)| (*r, p / r))
        .unzip();
    let tip_curvature = if fr.len() >= 3 {
        extrapolate_tip(&fr, &fb)?
    } else {
        zr[1] / rho[1]
    };
    zrr[0] = tip_curvature;

    let mut slope_constant: f64 = 1.0;
    let mut max_node_residual: f64 = 0.0;
    for i in 1..rho.len() {
        let b = zr[i] / rho[i];
        slope_constant = slope_constant.max(b).max(1.0 / b);
        let r = (zrr[i] - bowl_rhs(&sp, rho[i], zr[i])?).abs() / (1.0 + zrr[i].abs());
        max_node_residual = max_node_residual.max(r);
    }
    let mut max_midpoint_defect: f64 = 0.0;
    for i in 1..rho.len() - 1 {
        let m = 0.5 * (rho[i] + rho[i + 1]);
        let (p, dp) = hermite(rho[i], rho[i + 1], zr[i], zr[i + 1], zrr[i], zrr[i + 1], m);
        let r = (dp - bowl_rhs(&sp, m, p)?).abs() / (1.0 + dp.abs());
        max_midpoint_defect = max_midpoint_defect.max(r);
    }

    let zeta_table = HermiteTable::new(rho.clone(), zeta.clone(), zr.clone())?;
    let slope_table = HermiteTable::new(rho.clone(), zr.clone(), zrr.clone())?;
    Ok(BowlProfile {
        speed: sp,
        tol: opts.tol,
        rho,
        zeta,
        zeta_rho: zr,
        zeta_rhorho: zrr,
        tip_curvature,
        slope_constant,
        max_node_residual,
        max_midpoint_defect,
        stats,
        zeta_table,
        slope_table,
    })
}

impl BowlProfile {
    pub fn speed(&self) -> &SpeedFunction {
        &self.speed
    }

    pub fn rho_max(&self) -> f64 {
        self.rho[self.rho.len() - 1]
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rho.is_empty()
    }

    /// `ζ(ρ)` by cubic Hermite interpolation.
    pub fn zeta_at(&self, rho: f64) -> Option<f64> {
        self.zeta_table.eval(rho).map(|v| v.0)
    }

    /// `ζ_ρ(ρ)` by cubic Hermite interpolation.
    pub fn slope_at(&self, rho: f64) -> Option<f64> {
        self.slope_table.eval(rho).map(|v| v.0)
    }

    /// `ζ_ρρ(ρ)` from the slope interpolant.
    pub fn curvature_at(&self, rho: f64) -> Option<f64> {
        self.slope_table.eval(rho).map(|v| v.1)
    }

    /// Radius where the bowl reaches height `z`, the radial graph `r(z)`.
    pub fn radius_at_height(&self, z: f64) -> Option<f64> {
        self.zeta_table.invert_increasing(z)
    }

    pub fn height_range(&self) -> (f64, f64) {
        (0.0, self.zeta[self.zeta.len() - 1])
    }

    /// Resamples `(ρ, ζ, ζ_ρ)` on `count` geometrically spaced radii.
    pub fn sample_geometric(&self, rho_min: f64, count: usize) -> Vec<[f64; 3]> {
        let rho_max = self.rho_max();
        let ratio = (rho_max / rho_min).ln();
        (0..count)
            .map(|i| {
                let r = if i + 1 == count {
                    rho_max
                } else {
                    rho_min * (ratio * i as f64 / (count - 1).max(1) as f64).exp()
                };
                [r, self.zeta_at(r).unwrap_or(f64::NAN), self.slope_at(r).unwrap_or(f64::NAN)]
            })
            .collect()
    }

    /// Whether `ζ` is strictly increasing and strictly convex on the grid.
    pub fn is_convex_increasing(&self) -> bool {
        (1..self.rho.len()).all(|i| {
            self.zeta[i] > self.zeta[i - 1] && self.zeta_rho[i] > self.zeta_rho[i - 1] && self.zeta_rhorho[i] > 0.0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn sum_tip_curvature() {
        let s = SpeedFunction::sum(3).unwrap();
        let b = solve_bowl(&s, 5.0, 1e-11).unwrap();
        assert_relative_eq!(b.tip_curvature, 1.0 / 6.0, max_relative = 1e-7);
        assert!(b.is_convex_increasing());
        assert!(b.max_node_residual < 1e-12);
        assert!(b.max_midpoint_defect < 1e-4);
    }

    #[test]
    fn bh_tip_curvature() {
        let s = SpeedFunction::brendle_huisken(3).unwrap();
        let b = solve_bowl(&s, 3.0, 1e-11).unwrap();
        assert_relative_eq!(b.tip_curvature, 0.75, max_relative = 1e-7);
    }

    #[test]
    fn n2_sum_bowl_is_the_grim_reaper_like_profile() {
        // for n = 2 (curves rotated once) the bowl still starts umbilically
        let s = SpeedFunction::sum(2).unwrap();
        let b = solve_bowl(&s, 2.0, 1e-10).unwrap();
        assert_relative_eq!(b.tip_curvature, 0.25, max_relative = 1e-7);
    }

    #[test]
    fn interpolation_and_inversion() {
        let s = SpeedFunction::sum(3).unwrap();
        let b = solve_bowl(&s, 20.0, 1e-10).unwrap();
        for &r in &[0.05, 1.0, 7.3, 19.0] {
            let z = b.zeta_at(r).unwrap();
            let back = b.radius_at_height(z).unwrap();
            assert!((back - r).abs() < 1e-10 * r.max(1.0));
        }
        assert!(b.zeta_at(25.0).is_none());
        let g = b.sample_geometric(0.01, 30);
        assert_eq!(g.len(), 30);
        assert!(g.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] > w[0][1]));
    }

    #[test]
    fn tolerance_study_agrees_to_six_digits() {
        let s = SpeedFunction::sum(3).unwrap();
        let a = solve_bowl(&s, 12.0, 1e-10).unwrap().zeta_at(10.0).unwrap();
        let b = solve_bowl(&s, 12.0, 1e-8).unwrap().zeta_at(10.0).unwrap();
        assert!((a - b).abs() < 1e-6 * a.abs());
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = SpeedFunction::sum(3).unwrap();
        assert!(solve_bowl(&s, 0.0, 1e-8).is_err());
        assert!(solve_bowl(&s, 1.0, -1.0).is_err());
    }
}
