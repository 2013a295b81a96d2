//! Self-shrinking caps.
//!
//! The profile `ψ = ψ_a(ρ)` solves
//! `ψ_ρρ = (1 + ψ_ρ²) f(ψ_ρ/ρ, ½ + (ρψ_ρ − ψ)/(2a²))` on `[0, √(2F(0,1))·a)`.
//! Near the neck `ψ_ρ` blows up, so each initial value problem is integrated
//! in arc length `s` for the curve `(ρ, ψ)` with tangent angle `φ`:
//!
//! ```text
//! ρ' = cos φ,   ψ' = sin φ,   φ' = f(sin φ/ρ, ½cos φ + (ρ sin φ − ψ cos φ)/(2a²))
//! ```
//!
//! which is the same equation after dividing by `(1 + ψ_ρ²)^{3/2}` and using
//! the homogeneity of `f`. Starting data `ψ(ρ_k) = w(ρ_k)`, `ψ_ρ(ρ_k) = w_ρ(ρ_k)`
//! with `w = θρ²/(4F(1,1))` is pushed to `ρ_k → 0` until successive solutions
//! agree.

use std::f64::consts::FRAC_PI_2;

use log::debug;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::interp::HermiteTable;
use crate::ode::{integrate, Control, Dopri5Options, StepStats};
use crate::speed::SpeedFunction;

use super::{extrapolate_tip, neck_constant_k};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShrinkerOptions {
    /// Lower barrier slope, must lie in `(F(1,1)/Q, 1)`.
    pub theta: f64,
    /// Upper barrier slope; defaults to `2F(1,1)/F(0,1)`.
    pub big_theta: Option<f64>,
    /// Decreasing start radii.
    pub rho_k: Vec<f64>,
    pub tol: f64,
    /// Tolerance on the extrapolated distance to the `ρ_k → 0` limit.
    pub conv_tol: f64,
    /// Left end of the `z`-window; defaults to `√K + 1`.
    pub l0: Option<f64>,
    /// Integration stops once `z = a − ψ/a` drops below this fraction of `L₀`.
    pub z_stop_fraction: f64,
    /// Spacing of the `z`-grid; defaults to `min(0.01a, 0.05)`.
    pub z_spacing: Option<f64>,
    pub tip_region: f64,
    pub tip_step: f64,
}

impl Default for ShrinkerOptions {
    fn default() -> Self {
        ShrinkerOptions {
            theta: 0.9,
            big_theta: None,
            rho_k: (4..=14).map(|k| 0.5f64.powi(k)).collect(),
            tol: 1e-10,
            conv_tol: 1e-8,
            l0: None,
            z_stop_fraction: 0.5,
            z_spacing: None,
            tip_region: 0.1,
            tip_step: 0.004,
        }
    }
}

/// One node of the `z`-representation `v = Ψ_a(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZNode {
    pub z: f64,
    pub v: f64,
    pub v_z: f64,
    pub v_zz: f64,
    pub w: f64,
}

/// Running extremes of `Λ = ρψ_ρρ/(ψ_ρ(1+ψ_ρ²))` and `B`, with the a-priori bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticityMonitor {
    pub lambda_max: f64,
    pub lambda_min: f64,
    pub b_max: f64,
    pub b_min: f64,
    /// Constant of the upper bound `Λ ≤ max{C, Λ(ρ₀)}`.
    pub c_upper: f64,
    pub upper_bound_held: bool,
    /// `Λ ≥ min{(1 + ψ_ρ²)⁻¹, Λ(ρ₀)}` along the solve.
    pub lower_bound_held: bool,
    /// `max |Λ − f(1, B)|`.
    pub identity_residual: f64,
}

/// Arc-length solution of one initial value problem.
#[derive(Debug, Clone)]
pub(crate) struct ArcSolution {
    pub s: Vec<f64>,
    pub rho: Vec<f64>,
    pub psi: Vec<f64>,
    pub phi: Vec<f64>,
    pub kappa: Vec<f64>,
    pub stats: StepStats,
    rho_t: HermiteTable,
    psi_t: HermiteTable,
    phi_t: HermiteTable,
    inv_rho: HermiteTable,
}

impl ArcSolution {
    fn new(s: Vec<f64>, rho: Vec<f64>, psi: Vec<f64>, phi: Vec<f64>, kappa: Vec<f64>, stats: StepStats) -> Result<Self> {
        let cos: Vec<f64> = phi.iter().map(|p| p.cos()).collect();
        let sin: Vec<f64> = phi.iter().map(|p| p.sin()).collect();
        let rho_t = HermiteTable::new(s.clone(), rho.clone(), cos.clone())?;
        let psi_t = HermiteTable::new(s.clone(), psi.clone(), sin)?;
        let phi_t = HermiteTable::new(s.clone(), phi.clone(), kappa.clone())?;
        // s as a function of ρ, ds/dρ = 1/cos φ
        let inv_rho = HermiteTable::new(rho.clone(), s.clone(), cos.iter().map(|c| 1.0 / c).collect())?;
        Ok(ArcSolution {
            s,
            rho,
            psi,
            phi,
            kappa,
            stats,
            rho_t,
            psi_t,
            phi_t,
            inv_rho,
        })
    }

    fn state(&self, s: f64) -> Option<(f64, f64, f64, f64)> {
        let (rho, _) = self.rho_t.eval(s)?;
        let (psi, _) = self.psi_t.eval(s)?;
        let (phi, kappa) = self.phi_t.eval(s)?;
        Some((rho, psi, phi, kappa))
    }

    /// `(s, ρ, φ, κ)` where `ψ(s) = psi`.
    pub fn at_psi(&self, psi: f64) -> Option<(f64, f64, f64, f64)> {
        let s = self.psi_t.invert_increasing(psi)?;
        let (rho, _, phi, kappa) = self.state(s)?;
        Some((s, rho, phi, kappa))
    }

    /// `(s, ψ, φ)` where `ρ(s) = rho`.
    pub fn at_rho(&self, rho: f64) -> Option<(f64, f64, f64)> {
        let s = self.rho_t.invert_increasing(rho).or_else(|| self.inv_rho.eval(rho).map(|v| v.0))?;
        let (_, psi, phi, _) = self.state(s)?;
        Some((s, psi, phi))
    }

    pub fn rho_range(&self) -> (f64, f64) {
        (self.rho[0], self.rho[self.rho.len() - 1])
    }
}

/// Solved shrinker cap with its `ψ`- and `z`-representations.
#[derive(Debug, Clone)]
pub struct ShrinkerProfile {
    speed: SpeedFunction,
    pub a: f64,
    pub theta: f64,
    pub big_theta: f64,
    pub tol: f64,
    /// Start radius of the accepted initial value problem.
    pub rho_k: f64,
    /// Cauchy differences between successive start radii.
    pub convergence_history: Vec<f64>,
    /// Richardson estimate of the distance from the accepted solve to the limit profile.
    pub limit_error_estimate: f64,
    /// Rows `(ρ, ψ, ψ_ρ, Λ, B)` starting with the tip `ρ = 0`.
    pub psi_rows: Vec<[f64; 5]>,
    pub tip_curvature: f64,
    pub l0: f64,
    pub k_const: f64,
    pub z_nodes: Vec<ZNode>,
    pub monitor: EllipticityMonitor,
    /// `max |h(v(z)) − z|` over the `z`-grid.
    pub inversion_error: f64,
    pub stats: StepStats,
    pub(crate) arc: ArcSolution,
}

impl ShrinkerProfile {
    pub fn speed(&self) -> &SpeedFunction {
        &self.speed
    }

    /// `ψ(ρ)` for `ρ` in the solved range (the tip below `ρ_k` uses the fitted curvature).
    pub fn psi_at(&self, rho: f64) -> Option<f64> {
        let (r0, _) = self.arc.rho_range();
        if rho < r0 {
            return (rho >= 0.0).then(|| 0.5 * self.tip_curvature * rho * rho);
        }
        self.arc.at_rho(rho).map(|v| v.1)
    }

    /// `ψ_ρ(ρ)`.
    pub fn slope_at(&self, rho: f64) -> Option<f64> {
        let (r0, _) = self.arc.rho_range();
        if rho < r0 {
            return (rho >= 0.0).then(|| self.tip_curvature * rho);
        }
        self.arc.at_rho(rho).map(|v| v.2.tan())
    }

    /// `Ψ_a(z) = v(z)` for `z` in `[z_stop, a]`.
    pub fn v_at(&self, z: f64) -> Option<f64> {
        if z == self.a {
            return Some(0.0);
        }
        let target = self.a * (self.a - z);
        self.arc.at_psi(target).map(|v| v.1 / self.a)
    }

    /// `h(r) = a − ψ(ar)/a`, the inverse of `v`.
    pub fn h_at(&self, r: f64) -> Option<f64> {
        self.psi_at(self.a * r).map(|psi| self.a - psi / self.a)
    }

    /// Largest radius reached by the solve.
    pub fn rho_max(&self) -> f64 {
        self.arc.rho_range().1
    }

    pub fn z_min(&self) -> f64 {
        self.a - self.arc.psi[self.arc.psi.len() - 1] / self.a
    }

    /// `z`-nodes strictly below the tip.
    pub fn interior_z_nodes(&self) -> impl Iterator<Item = &ZNode> {
        let a = self.a;
        self.z_nodes.iter().filter(move |n| n.z < a)
    }
}

fn stop_below(a: f64, l0: f64, frac: f64) -> f64 {
    (frac * l0).min(a)
}

/// Integrates one initial value problem from `ρ_k`.
fn solve_from(
    sp: &SpeedFunction,
    a: f64,
    rho_k: f64,
    theta: f64,
    big_theta: f64,
    z_stop: f64,
    opts: &ShrinkerOptions,
) -> Result<ArcSolution> {
    let f01 = sp.f01();
    let f11 = sp.f11();
    let q = sp.q();
    let inv = sp.inverse();
    let a2 = a * a;
    let upper_valid = 2.0 * a2 * (f01 - f11 / big_theta);
    let y0 = [
        rho_k,
        theta * rho_k * rho_k / (4.0 * f11),
        (theta * rho_k / (2.0 * f11)).atan(),
    ];
    let args = move |y: &[f64; 3]| {
        let (sn, cs) = y[2].sin_cos();
        (sn / y[0], 0.5 * cs + (y[0] * sn - y[1] * cs) / (2.0 * a2))
    };
    let rhs = move |_s: f64, y: &[f64; 3]| -> Result<[f64; 3]> {
        if !(y[0] > 0.0) {
            return Err(FlowError::ConeExit {
                location: "rho",
                value: y[0],
            });
        }
        let (yy, zz) = args(y);
        let (sn, cs) = y[2].sin_cos();
        Ok([cs, sn, inv.invert_extended(yy, zz)?])
    };
    let tip_region = opts.tip_region;
    let make_observer = |phase_one: bool| {
        move |_s: f64, y: &[f64; 3], _dy: &[f64; 3]| -> Result<Control> {
            let (rho, psi, phi) = (y[0], y[1], y[2]);
            if !(phi > 0.0 && phi < FRAC_PI_2) {
                return Err(FlowError::ConeExit {
                    location: "rho",
                    value: rho,
                });
            }
            let (yy, zz) = args(y);
            let ratio = zz / yy;
            if !(ratio > f01 && ratio < q) {
                return Err(FlowError::ConeExit {
                    location: "rho",
                    value: rho,
                });
            }
            let lower = theta * rho * rho / (4.0 * f11);
            if psi < lower * (1.0 - 1e-9) - 1e-15 {
                return Err(FlowError::BarrierViolation {
                    rho,
                    psi,
                    barrier: lower,
                });
            }
            if rho * rho < upper_valid {
                let upper = big_theta * rho * rho / (4.0 * f11);
                if psi > upper * (1.0 + 1e-9) + 1e-15 {
                    return Err(FlowError::BarrierViolation {
                        rho,
                        psi,
                        barrier: upper,
                    });
                }
            }
            if phase_one && rho >= tip_region {
                return Ok(Control::Stop);
            }
            if a - psi / a <= z_stop {
                return Ok(Control::Stop);
            }
            Ok(Control::Continue)
        }
    };
    let s_end = 10.0 * a2 + 1e3;
    let map_err = |e: FlowError, at: f64| match e {
        FlowError::DomainViolation { .. } | FlowError::ConeViolation(_) => FlowError::ConeExit {
            location: "rho",
            value: at,
        },
        other => other,
    };
    let o1 = Dopri5Options {
        h_max: opts.tip_step,
        ..Dopri5Options::with_tol(opts.tol)
    };
    let t1 = integrate(rhs, 0.0, y0, s_end, &o1, make_observer(true)).map_err(|e| map_err(e, rho_k))?;
    let (s1, y1) = t1.last();
    let mut s = t1.t.clone();
    let mut ys = t1.y.clone();
    let mut dys = t1.dy.clone();
    let mut stats = t1.stats;
    if a - y1[1] / a > z_stop {
        let o2 = Dopri5Options::with_tol(opts.tol);
        let t2 = integrate(rhs, s1, y1, s_end, &o2, make_observer(false)).map_err(|e| map_err(e, y1[0]))?;
        s.extend_from_slice(&t2.t[1..]);
        ys.extend_from_slice(&t2.y[1..]);
        dys.extend_from_slice(&t2.dy[1..]);
        stats.accepted += t2.stats.accepted;
        stats.rejected += t2.stats.rejected;
        stats.failed_stages += t2.stats.failed_stages;
        stats.rhs_evals += t2.stats.rhs_evals;
    }
    let last_psi = ys[ys.len() - 1][1];
    if a - last_psi / a > z_stop {
        return Err(FlowError::ToleranceFailure {
            t: s[s.len() - 1],
            h: 0.0,
        });
    }
    ArcSolution::new(
        s,
        ys.iter().map(|y| y[0]).collect(),
        ys.iter().map(|y| y[1]).collect(),
        ys.iter().map(|y| y[2]).collect(),
        dys.iter().map(|d| d[2]).collect(),
        stats,
    )
}

fn z_grid(a: f64, l0: f64, spacing: f64) -> Vec<f64> {
    let n = ((a - l0) / spacing).ceil().max(1.0) as usize;
    let dz = (a - l0) / n as f64;
    (0..=n).map(|j| if j == n { a } else { l0 + j as f64 * dz }).collect()
}

fn sample_v(arc: &ArcSolution, a: f64, grid: &[f64]) -> Result<Vec<f64>> {
    grid.iter()
        .map(|&z| {
            if z >= a {
                Ok(0.0)
            } else {
                arc.at_psi(a * (a - z)).map(|v| v.1 / a).ok_or(FlowError::OutOfRange {
                    lo: a - arc.psi[arc.psi.len() - 1] / a,
                    hi: a,
                    node: z,
                })
            }
        })
        .collect()
}

fn tip_probe(arc: &ArcSolution, tip_region: f64) -> Vec<f64> {
    [0.2, 0.5, 1.0]
        .iter()
        .map(|f| {
            let r = f * tip_region;
            arc.at_rho(r).map(|v| v.2.tan() / r).unwrap_or(f64::NAN)
        })
        .collect()
}

/// Solves for `Ψ_a` with explicit options.
pub fn solve_shrinker_with(speed: &SpeedFunction, a: f64, opts: &ShrinkerOptions) -> Result<ShrinkerProfile> {
    let sp = *speed;
    let f01 = sp.f01();
    let f11 = sp.f11();
    let q = sp.q();
    if !(opts.theta > f11 / q && opts.theta < 1.0) {
        return Err(FlowError::InvalidParameter(format!(
            "theta = {} must lie in ({}, 1)",
            opts.theta,
            f11 / q
        )));
    }
    let big_theta = opts.big_theta.unwrap_or(2.0 * f11 / f01);
    if !(big_theta > f11 / f01) {
        return Err(FlowError::InvalidParameter(format!(
            "Theta = {big_theta} must exceed F(1,1)/F(0,1) = {}",
            f11 / f01
        )));
    }
    if opts.rho_k.is_empty() || opts.rho_k.windows(2).any(|w| !(w[1] < w[0])) || opts.rho_k.iter().any(|r| !(*r > 0.0)) {
        return Err(FlowError::InvalidParameter(
            "start radii must be positive and strictly decreasing".into(),
        ));
    }
    let k_const = neck_constant_k(&sp);
    let l0 = opts.l0.unwrap_or(k_const.sqrt() + 1.0);
    if !(a > l0 + 1.0) {
        return Err(FlowError::InvalidParameter(format!(
            "a = {a} leaves an empty barrier window above L0 = {l0:.4}"
        )));
    }
    let spacing = opts.z_spacing.unwrap_or((0.01 * a).min(0.05));
    let grid = z_grid(a, l0, spacing);
    let z_stop = stop_below(a, l0, opts.z_stop_fraction);

    let mut history = Vec::new();
    let mut prev: Option<(ArcSolution, Vec<f64>, Vec<f64>)> = None;
    let mut accepted: Option<(ArcSolution, f64, f64)> = None;
    for &rk in &opts.rho_k {
        let arc = solve_from(&sp, a, rk, opts.theta, big_theta, z_stop, opts)?;
        let v = sample_v(&arc, a, &grid)?;
        let tip = tip_probe(&arc, opts.tip_region);
        if let Some((_, pv, pt)) = &prev {
            let dv = v.iter().zip(pv).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let dt = tip.iter().zip(pt).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
            let d = dv.max(dt);
            debug!("shrinker a={a} rho_k={rk:e}: cauchy difference {d:e}");
            history.push(d);
            // differences shrink geometrically; the tail sum bounds the distance to the limit
            let est = match history.len() {
                1 => f64::INFINITY,
                m => {
                    let ratio = (history[m - 2] / d).clamp(1.0, 1e3);
                    if ratio > 1.5 {
                        d / (ratio - 1.0)
                    } else {
                        f64::INFINITY
                    }
                }
            };
            if est < opts.conv_tol {
                accepted = Some((arc, rk, est));
                break;
            }
        }
        prev = Some((arc, v, tip));
    }
    let (arc, rho_k, limit_error_estimate) = accepted.ok_or(FlowError::NonConvergence {
        last_diff: history.last().copied().unwrap_or(f64::INFINITY),
        tol: opts.conv_tol,
    })?;

    let inv = sp.inverse();
    // ψ-representation and monitor
    let eps0 = if q.is_finite() { 0.5 * (1.0 - f01 / q) } else { 0.5 };
    let c_upper = inv
        .invert(1.0, f01 / (1.0 - eps0))?
        .max(inv.invert(1.0, sp.restriction(1.0 / eps0, 1.0)?)?);
    let mut rows = vec![[0.0, 0.0, 0.0, 1.0, f11]];
    let mut monitor = EllipticityMonitor {
        lambda_max: f64::NEG_INFINITY,
        lambda_min: f64::INFINITY,
        b_max: f64::NEG_INFINITY,
        b_min: f64::INFINITY,
        c_upper,
        upper_bound_held: true,
        lower_bound_held: true,
        identity_residual: 0.0,
    };
    let mut lambda0 = f64::NAN;
    for i in 0..arc.s.len() {
        let (rho, psi, phi, kappa) = (arc.rho[i], arc.psi[i], arc.phi[i], arc.kappa[i]);
        let (sn, cs) = phi.sin_cos();
        let lambda = rho * kappa / sn;
        let b = rho / sn * (0.5 * cs + (rho * sn - psi * cs) / (2.0 * a * a));
        if i == 0 {
            lambda0 = lambda;
        }
        let fb = inv.invert(1.0, b)?;
        monitor.identity_residual = monitor.identity_residual.max((lambda - fb).abs());
        monitor.lambda_max = monitor.lambda_max.max(lambda);
        monitor.lambda_min = monitor.lambda_min.min(lambda);
        monitor.b_max = monitor.b_max.max(b);
        monitor.b_min = monitor.b_min.min(b);
        if lambda > c_upper.max(lambda0) * (1.0 + 1e-9) {
            monitor.upper_bound_held = false;
        }
        if lambda < (cs * cs).min(lambda0) * (1.0 - 1e-9) {
            monitor.lower_bound_held = false;
        }
        rows.push([rho, psi, phi.tan(), lambda, b]);
    }

    let (fr, fb): (Vec<f64>, Vec<f64>) = arc
        .rho
        .iter()
        .zip(&arc.phi)
        .filter(|(r, _)| **r >= 0.1 * opts.tip_region && **r <= opts.tip_region * 1.5)
        .map(|(r, p)| (*r, p.tan() / r))
        .unzip();
    let tip_curvature = extrapolate_tip(&fr, &fb)?;

    // z-representation
    let mut z_nodes = Vec::with_capacity(grid.len());
    let mut inversion_error: f64 = 0.0;
    for &z in &grid {
        if z >= a {
            z_nodes.push(ZNode {
                z: a,
                v: 0.0,
                v_z: f64::NEG_INFINITY,
                v_zz: f64::NEG_INFINITY,
                w: 1.0 / (f01 * tip_curvature),
            });
            continue;
        }
        let (_, rho, phi, kappa) = arc.at_psi(a * (a - z)).ok_or(FlowError::OutOfRange {
            lo: z_stop,
            hi: a,
            node: z,
        })?;
        let (sn, cs) = phi.sin_cos();
        let v = rho / a;
        let v_z = -cs / sn;
        let v_zz = -a * kappa / (sn * sn * sn);
        let w = -2.0 * z * v * v_z / (2.0 * f01 - v * v);
        if let Some((_, psi_back, _)) = arc.at_rho(rho) {
            inversion_error = inversion_error.max((a - psi_back / a - z).abs());
        } else {
            inversion_error = f64::INFINITY;
        }
        z_nodes.push(ZNode { z, v, v_z, v_zz, w });
    }

    let stats = arc.stats;
    Ok(ShrinkerProfile {
        speed: sp,
        a,
        theta: opts.theta,
        big_theta,
        tol: opts.tol,
        rho_k,
        convergence_history: history,
        limit_error_estimate,
        psi_rows: rows,
        tip_curvature,
        l0,
        k_const,
        z_nodes,
        monitor,
        inversion_error,
        stats,
        arc,
    })
}

/// Solves for `Ψ_a` with default options except for `θ`, the start radii and the tolerance.
pub fn solve_shrinker(speed: &SpeedFunction, a: f64, theta: f64, rho_k: &[f64], tol: f64) -> Result<ShrinkerProfile> {
    let opts = ShrinkerOptions {
        theta,
        rho_k: rho_k.to_vec(),
        tol,
        ..ShrinkerOptions::default()
    };
    solve_shrinker_with(speed, a, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn sum3() -> SpeedFunction {
        SpeedFunction::sum(3).unwrap()
    }

    #[test]
    fn tip_data_and_closure() {
        let p = solve_shrinker_with(&sum3(), 25.0, &ShrinkerOptions::default()).unwrap();
        assert_relative_eq!(p.tip_curvature, 1.0 / 6.0, max_relative = 1e-6);
        assert_eq!(p.v_at(25.0), Some(0.0));
        let last = p.z_nodes.last().unwrap();
        assert_eq!(last.z, 25.0);
        assert_eq!(last.v, 0.0);
        assert!(p.inversion_error < 1e-10, "{}", p.inversion_error);
        assert!(p.monitor.identity_residual < 1e-8);
        assert!(p.monitor.upper_bound_held && p.monitor.lower_bound_held);
    }

    #[test]
    fn profile_shape() {
        let p = solve_shrinker_with(&sum3(), 25.0, &ShrinkerOptions::default()).unwrap();
        let nodes: Vec<&ZNode> = p.interior_z_nodes().collect();
        for w in nodes.windows(2) {
            assert!(w[1].v < w[0].v, "v must decrease");
        }
        for n in &nodes {
            assert!(n.v_zz < 0.0, "v must be concave");
            assert!(n.v * n.v < 2.0 * p.speed().f01());
        }
        for r in &p.psi_rows[1..] {
            // ρψ_ρ − ψ ≥ 0 and the lower barrier
            assert!(r[0] * r[2] - r[1] >= -1e-12);
            assert!(r[1] >= p.theta * r[0] * r[0] / 12.0 * (1.0 - 1e-9));
        }
    }

    #[test]
    fn rejects_bad_theta_and_small_a() {
        let b = SpeedFunction::brendle_huisken(3).unwrap();
        // F(1,1)/Q = 1/3 for this speed
        let opts = ShrinkerOptions {
            theta: 0.2,
            ..ShrinkerOptions::default()
        };
        assert!(matches!(solve_shrinker_with(&b, 30.0, &opts), Err(FlowError::InvalidParameter(_))));
        assert!(solve_shrinker_with(&sum3(), 3.0, &ShrinkerOptions::default()).is_err());
    }

    #[test]
    fn single_start_radius_cannot_converge() {
        let opts = ShrinkerOptions {
            rho_k: vec![0.0625],
            ..ShrinkerOptions::default()
        };
        assert!(matches!(
            solve_shrinker_with(&sum3(), 20.0, &opts),
            Err(FlowError::NonConvergence { .. })
        ));
    }
}
