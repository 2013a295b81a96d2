//! Post-processing of solved shrinkers: the neck quantity `w`, the
//! two-sided bounds on `Ψ_a²` and the comparison with the bowl.

use log::info;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::fit::line;
use crate::speed::SpeedFunction;

use super::bowl::solve_bowl;
use super::shrinker::{solve_shrinker_with, ShrinkerOptions, ShrinkerProfile};
use super::ellipticity_constant_c;

/// `w(z) = −2zvv_z/(2F(0,1) − v²)` on the `z`-grid with its bound flags.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WDiagnostic {
    pub z: Vec<f64>,
    pub w: Vec<f64>,
    /// `w̄(z) = 2 + K(1/z² + 1/(a² − z²))`, `None` outside `(√K, z_{M,a})`.
    pub w_bar: Vec<Option<f64>>,
    pub min_w: f64,
    pub above_two: bool,
    pub upper_held: bool,
    pub upper_violations: usize,
    /// `2F(1,1)/F(0,1)`.
    pub tip_target: f64,
    pub tip_extrapolated: f64,
    pub tip_rel_error: f64,
    pub k_const: f64,
    pub c_const: f64,
    pub m: f64,
    /// `a − ψ(M)/a`, `None` when `M` lies beyond the solved profile.
    pub z_m: Option<f64>,
    /// Whether `w(z_{M,a}) < w̄(z_{M,a})`; `None` when not applicable.
    pub boundary_held: Option<bool>,
}

/// Computes the `w` diagnostic with the boundary radius `M`.
pub fn shrinker_w_diagnostic(profile: &ShrinkerProfile, m: f64) -> WDiagnostic {
    let sp = profile.speed();
    let f01 = sp.f01();
    let a = profile.a;
    let k = profile.k_const;
    let c = ellipticity_constant_c(sp);
    let w_of = |z: f64, v: f64, v_z: f64| -2.0 * z * v * v_z / (2.0 * f01 - v * v);
    let w_bar = |z: f64| 2.0 + k * (1.0 / (z * z) + 1.0 / (a * a - z * z));

    let z_m = if m <= profile.rho_max() {
        profile.psi_at(m).map(|psi| a - psi / a)
    } else {
        None
    };

    // tip limit from the arc nodes next to ρ = 0, linear in a − z
    let arc = &profile.arc;
    let (mut xs, mut ws) = (Vec::new(), Vec::new());
    // the start transient near ρ_k is excluded
    for i in 0..arc.rho.len() {
        if arc.rho[i] < 0.01 {
            continue;
        }
        if arc.rho[i] > 0.1 {
            break;
        }
        let z = a - arc.psi[i] / a;
        let v = arc.rho[i] / a;
        let v_z = -1.0 / arc.phi[i].tan();
        xs.push(a - z);
        ws.push(w_of(z, v, v_z));
    }
    let tip_target = 2.0 * sp.f11() / f01;
    let tip_extrapolated = if xs.len() >= 2 {
        line(&xs, &ws).map(|(_, b)| b).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };

    let mut out = WDiagnostic {
        z: Vec::new(),
        w: Vec::new(),
        w_bar: Vec::new(),
        min_w: f64::INFINITY,
        above_two: true,
        upper_held: true,
        upper_violations: 0,
        tip_target,
        tip_extrapolated,
        tip_rel_error: (tip_extrapolated - tip_target).abs() / tip_target,
        k_const: k,
        c_const: c,
        m,
        z_m,
        boundary_held: None,
    };
    for node in &profile.z_nodes {
        let w = if node.z < a {
            w_of(node.z, node.v, node.v_z)
        } else {
            tip_extrapolated
        };
        out.min_w = out.min_w.min(w);
        if !(w > 2.0) {
            out.above_two = false;
        }
        let bar = match z_m {
            Some(zm) if node.z > k.sqrt() && node.z < zm => Some(w_bar(node.z)),
            _ => None,
        };
        if let Some(b) = bar {
            if w > b {
                out.upper_held = false;
                out.upper_violations += 1;
            }
        }
        out.z.push(node.z);
        out.w.push(w);
        out.w_bar.push(bar);
    }
    if let Some(zm) = z_m {
        if let (Some(v), Some(slope)) = (profile.v_at(zm), profile.slope_at(m)) {
            let held = w_of(zm, v, -1.0 / slope) < w_bar(zm);
            info!("w boundary condition at z_M = {zm:.4} (M = {m}): {}", if held { "held" } else { "failed" });
            out.boundary_held = Some(held);
        }
    } else {
        info!("w boundary condition: M = {m} lies beyond the profile, not applicable");
    }
    out
}

/// Pointwise check of `Ψ_a(z)² ≥ 2F(0,1)(1 − z²/a²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundReport {
    pub a: f64,
    pub nodes: usize,
    pub violations: usize,
    /// `min (v² − 2F(0,1)(1 − z²/a²))` over the nodes.
    pub min_margin: f64,
}

pub fn shrinker_lower_bound_check(profile: &ShrinkerProfile) -> LowerBoundReport {
    let f01 = profile.speed().f01();
    let a = profile.a;
    let mut rep = LowerBoundReport {
        a,
        nodes: 0,
        violations: 0,
        min_margin: f64::INFINITY,
    };
    for n in &profile.z_nodes {
        let margin = n.v * n.v - 2.0 * f01 * (1.0 - (n.z / a) * (n.z / a));
        rep.nodes += 1;
        rep.min_margin = rep.min_margin.min(margin);
        if margin < 0.0 {
            rep.violations += 1;
        }
    }
    rep
}

/// Smallest constant in the upper bound
/// `Ψ_a² ≤ 2F(0,1)(1 − (1 − C log a/a²)(z² − C)/a²)` on `[L₀, L]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UpperBoundReport {
    pub a: f64,
    pub l0: f64,
    pub l: f64,
    pub c_fit: f64,
    /// Node where `C_fit` is attained.
    pub z_argmax: f64,
    /// Slack of the bound at `z = L₀` with `C = C_fit`.
    pub margin_at_l0: f64,
    pub lower: LowerBoundReport,
}

fn c_needed(a: f64, f01: f64, z: f64, v: f64) -> f64 {
    let ell = a.ln() / (a * a);
    let d = a * a * (1.0 - v * v / (2.0 * f01));
    let g0 = z * z - d;
    if g0 <= 0.0 {
        return 0.0;
    }
    let b = 1.0 + ell * z * z;
    let disc = b * b - 4.0 * ell * g0;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    2.0 * g0 / (b + disc.sqrt())
}

pub fn shrinker_upper_bound_check(profile: &ShrinkerProfile, l: f64) -> Result<UpperBoundReport> {
    let a = profile.a;
    let l0 = profile.l0;
    if !(l >= l0 && l < a) {
        return Err(FlowError::InvalidParameter(format!(
            "L = {l} must lie in [L0, a) = [{l0}, {a})"
        )));
    }
    let f01 = profile.speed().f01();
    let mut c_fit: f64 = 0.0;
    let mut z_argmax = l0;
    for n in profile.interior_z_nodes().filter(|n| n.z <= l + 1e-12) {
        let c = c_needed(a, f01, n.z, n.v);
        if c > c_fit {
            c_fit = c;
            z_argmax = n.z;
        }
    }
    let first = profile.z_nodes[0];
    let ell = a.ln() / (a * a);
    let rhs = 2.0 * f01 * (1.0 - (1.0 - c_fit * ell) * (first.z * first.z - c_fit) / (a * a));
    Ok(UpperBoundReport {
        a,
        l0,
        l,
        c_fit,
        z_argmax,
        margin_at_l0: rhs - first.v * first.v,
        lower: shrinker_lower_bound_check(profile),
    })
}

/// Gap between `ψ_a` and the bowl on `[0, M]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub a: f64,
    pub sup_gap: f64,
    pub sup_slope_gap: f64,
}

/// `sup_{ρ≤M} |ψ_a − ζ|` and `sup_{ρ≤M} |ψ_a,ρ − ζ_ρ|` for each `a`, solved in parallel.
pub fn shrinker_to_bowl_convergence(
    speed: &SpeedFunction,
    a_list: &[f64],
    m: f64,
    opts: &ShrinkerOptions,
) -> Result<Vec<GapRow>> {
    if a_list.windows(2).any(|w| !(w[1] > w[0])) || a_list.is_empty() {
        return Err(FlowError::InvalidParameter("a-list must be increasing".into()));
    }
    let limit = a_list[0] * (2.0 * speed.f01()).sqrt();
    if !(m > 0.0 && m < limit) {
        return Err(FlowError::InvalidParameter(format!(
            "M = {m} must lie in (0, {limit})"
        )));
    }
    let bowl = solve_bowl(speed, m * 1.01, opts.tol)?;
    let samples: Vec<f64> = (1..=2000).map(|i| m * i as f64 / 2000.0).collect();
    a_list
        .par_iter()
        .map(|&a| {
            let p = solve_shrinker_with(speed, a, opts)?;
            let mut row = GapRow {
                a,
                sup_gap: 0.0,
                sup_slope_gap: 0.0,
            };
            for &r in &samples {
                let (psi, dpsi) = p.psi_at(r).zip(p.slope_at(r)).ok_or(FlowError::OutOfRange {
                    lo: 0.0,
                    hi: p.rho_max(),
                    node: r,
                })?;
                let zeta = bowl.zeta_at(r).unwrap_or(f64::NAN);
                let dzeta = bowl.slope_at(r).unwrap_or(f64::NAN);
                row.sup_gap = row.sup_gap.max((psi - zeta).abs());
                row.sup_slope_gap = row.sup_slope_gap.max((dpsi - dzeta).abs());
            }
            Ok(row)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c_needed_zero_on_lower_bound_and_monotone() {
        // equality in the lower bound gives D = z²
        let a: f64 = 50.0;
        let z: f64 = 7.0;
        let v = (4.0 * (1.0 - z * z / (a * a))).sqrt();
        assert!(c_needed(a, 2.0, z, v) < 1e-9);
        assert_eq!(c_needed(a, 2.0, z, 0.99 * v), 0.0);
        let near = c_needed(a, 2.0, z, 1.001 * v);
        let far = c_needed(a, 2.0, z, 1.01 * v);
        assert!(far > near && near > 0.0);
    }
}
