//! Tip and neck diagnostics of radial-graph runs.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::speed::SpeedFunction;

use super::state::{central_derivative, FlowHistory};

/// Neck quantities along the last snapshot of a bowl-type run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TipDiagnostics {
    pub z: Vec<f64>,
    pub rr_z: Vec<f64>,
    /// Average of `rr_z` over the window.
    pub tail_limit: f64,
    pub tail_spread: f64,
    /// Vertical speed of the tracked level set.
    pub tip_speed: f64,
    /// `F(0,1)/𝒢`.
    pub target: f64,
    pub rel_error: f64,
    /// Neck closeness `sup(|r_z| + r|r_zz|)`.
    pub eps0: f64,
    /// Smallest `C₀ ≥ 0` with `rr_z ≤ 4(F(0,1) + C₀ε₀)/𝒢` on the window.
    pub c0: f64,
    pub bound_held: bool,
}

fn level_height(z: &[f64], r: &[f64], level: f64) -> Option<f64> {
    let i = (0..r.len() - 1).find(|&i| r[i] <= level && level <= r[i + 1])?;
    let s = (level - r[i]) / (r[i + 1] - r[i]);
    Some(z[i] + s * (z[i + 1] - z[i]))
}

/// Measures `lim rr_z` and the tip speed from a radial run with `r` increasing in `z`.
pub fn tip_neck_diagnostics(history: &FlowHistory, speed: &SpeedFunction) -> Result<TipDiagnostics> {
    let g = history.grid;
    if g.n < 16 {
        return Err(FlowError::InsufficientTail { nodes: g.n, needed: 16 });
    }
    if history.len() < 2 {
        return Err(FlowError::WindowTooShort {
            got: history.len(),
            needed: 2,
        });
    }
    let z = g.nodes();
    let first = &history.snapshots[0];
    let last = &history.snapshots[history.len() - 1];
    let level = first[g.n / 2];
    let z0 = level_height(&z, first, level);
    let z1 = level_height(&z, last, level);
    let (z0, z1) = z0.zip(z1).ok_or(FlowError::InsufficientTail { nodes: g.n, needed: 16 })?;
    let dt = history.times[history.len() - 1] - history.times[0];
    let tip_speed = (z1 - z0) / dt;

    let rz = central_derivative(last, g.dx);
    let rr_z: Vec<f64> = last.iter().zip(&rz).map(|(r, d)| r * d).collect();
    let inner = &rr_z[2..g.n - 2];
    let tail_limit = inner.iter().sum::<f64>() / inner.len() as f64;
    let (lo, hi) = inner.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(*v), b.max(*v)));
    let f01 = speed.f01();
    let target = f01 / tip_speed;
    let mut eps0: f64 = 0.0;
    for i in 1..g.n - 1 {
        let rzz = (last[i + 1] - 2.0 * last[i] + last[i - 1]) / (g.dx * g.dx);
        eps0 = eps0.max(rz[i].abs() + last[i] * rzz.abs());
    }
    let c0 = if eps0 > 0.0 { ((tip_speed * hi / 4.0 - f01) / eps0).max(0.0) } else { 0.0 };
    Ok(TipDiagnostics {
        z,
        rr_z: rr_z.clone(),
        tail_limit,
        tail_spread: hi - lo,
        tip_speed,
        target,
        rel_error: (tail_limit - target).abs() / target,
        eps0,
        c0,
        bound_held: hi <= 4.0 * (f01 + c0 * eps0) / tip_speed * (1.0 + 1e-12),
    })
}

/// Extinction-time estimates `𝒯(z)` from the last two snapshots of a
/// shrinking run, with the slack of `2F(0,1)(𝒯(z) − t) ≤ r(z,t)²`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtinctionReport {
    pub z: Vec<f64>,
    pub extinction: Vec<f64>,
    /// `min (r² − 2F(0,1)(𝒯 − t))` over snapshots and nodes.
    pub min_slack: f64,
}

pub fn extinction_map(history: &FlowHistory, speed: &SpeedFunction) -> Result<ExtinctionReport> {
    let m = history.len();
    if m < 2 {
        return Err(FlowError::WindowTooShort { got: m, needed: 2 });
    }
    let (ta, tb) = (history.times[m - 2], history.times[m - 1]);
    let (ra, rb) = (&history.snapshots[m - 2], &history.snapshots[m - 1]);
    let extinction: Vec<f64> = ra
        .iter()
        .zip(rb)
        .map(|(a, b)| {
            let drop = a * a - b * b;
            if drop > 0.0 {
                tb + b * b * (tb - ta) / drop
            } else {
                f64::INFINITY
            }
        })
        .collect();
    let f01 = speed.f01();
    let mut min_slack = f64::INFINITY;
    for (t, snap) in history.times.iter().zip(&history.snapshots) {
        for (r, te) in snap.iter().zip(&extinction) {
            if te.is_finite() {
                min_slack = min_slack.min(r * r - 2.0 * f01 * (te - t));
            }
        }
    }
    Ok(ExtinctionReport {
        z: history.grid.nodes(),
        extinction,
        min_slack,
    })
}
