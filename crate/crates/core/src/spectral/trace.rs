//! Windowed mode norms of a rescaled run and the mode-dominance test.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::fit::line;
use crate::flow::FlowHistory;

use super::basis::{fd_operator, HermiteBasis};
use super::decompose::decompose_samples;

/// Smooth even bump: `1` on `|s| ≤ 1/2`, `0` on `|s| ≥ 1`, a degree-7
/// smoothstep in between (non-increasing in `|s|`).
pub fn cutoff_chi(s: f64) -> f64 {
    let s = s.abs();
    if s <= 0.5 {
        return 1.0;
    }
    if s >= 1.0 {
        return 0.0;
    }
    let x = 2.0 * (s - 0.5);
    let x4 = x * x * x * x;
    1.0 - x4 * (35.0 - 84.0 * x + 70.0 * x * x - 20.0 * x * x * x)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceOptions {
    /// Exponent in `χ(δ_j^r z / L_cut)`.
    pub r: f64,
    /// Cutoff radius; defaults to the smaller grid half-extent (at least `2√a`).
    pub l_cut: Option<f64>,
    /// Half-width of the window defining `δ_j`.
    pub delta_l: f64,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            r: 1e-4,
            l_cut: None,
            delta_l: 10.0,
        }
    }
}

/// Per-window suprema `γ_j` and tail suprema `Γ_k = sup_{j≥k} γ_j`; window
/// `j` is `[τ_end − j − 1, τ_end − j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaTrace {
    pub r: f64,
    pub l_cut: f64,
    pub tau_end: f64,
    pub delta: Vec<f64>,
    pub gamma: Vec<f64>,
    pub gamma_plus: Vec<f64>,
    pub gamma_zero: Vec<f64>,
    pub gamma_minus: Vec<f64>,
    pub big: Vec<f64>,
    pub big_plus: Vec<f64>,
    pub big_zero: Vec<f64>,
    pub big_minus: Vec<f64>,
    /// `sup ∫_{|z|≤δ^{-r}L_cut} e^{−z²/4a}|u_τ − 𝓛u|²` per window, from the snapshots.
    pub epsilon: Vec<f64>,
    /// Smallest `C` with `C⁻¹Γ_k ≤ Γ_k⁺ + Γ_k⁰ + Γ_k⁻ ≤ CΓ_k`.
    pub c_equiv: f64,
}

impl GammaTrace {
    pub fn windows(&self) -> usize {
        self.gamma.len()
    }

    /// Trace from given window values (tail suprema are formed here).
    pub fn from_windows(gamma_plus: Vec<f64>, gamma_zero: Vec<f64>, gamma_minus: Vec<f64>) -> Self {
        let gamma: Vec<f64> = (0..gamma_plus.len()).map(|j| gamma_plus[j] + gamma_zero[j] + gamma_minus[j]).collect();
        let m = gamma.len();
        let mut t = GammaTrace {
            r: 0.0,
            l_cut: f64::INFINITY,
            tau_end: 0.0,
            delta: vec![f64::NAN; m],
            epsilon: vec![f64::NAN; m],
            big: tail_sup(&gamma),
            big_plus: tail_sup(&gamma_plus),
            big_zero: tail_sup(&gamma_zero),
            big_minus: tail_sup(&gamma_minus),
            gamma,
            gamma_plus,
            gamma_zero,
            gamma_minus,
            c_equiv: 1.0,
        };
        t.c_equiv = equivalence_constant(&t);
        t
    }
}

fn tail_sup(g: &[f64]) -> Vec<f64> {
    let mut out = g.to_vec();
    for k in (0..out.len().saturating_sub(1)).rev() {
        out[k] = out[k].max(out[k + 1]);
    }
    out
}

fn equivalence_constant(t: &GammaTrace) -> f64 {
    let mut c: f64 = 1.0;
    for k in 0..t.big.len() {
        let s = t.big_plus[k] + t.big_zero[k] + t.big_minus[k];
        if t.big[k] > 0.0 && s > 0.0 {
            c = c.max(s / t.big[k]).max(t.big[k] / s);
        }
    }
    c
}

/// Builds the trace of `u = v − σ` from a rescaled run.
pub fn gamma_trace_from_run(
    history: &FlowHistory,
    basis: &HermiteBasis,
    n: usize,
    sigma: f64,
    opts: &TraceOptions,
) -> Result<GammaTrace> {
    let m = history.len();
    if m < 2 {
        return Err(FlowError::WindowTooShort { got: 0, needed: 1 });
    }
    let tau0 = history.times[0];
    let tau_end = history.times[m - 1];
    let windows = (tau_end - tau0 + 1e-9).floor() as usize;
    if windows == 0 {
        return Err(FlowError::WindowTooShort { got: 0, needed: 1 });
    }
    let a = basis.a;
    let grid = history.grid;
    let l_cut = opts
        .l_cut
        .unwrap_or_else(|| grid.x0.abs().min(grid.x1().abs()).max(2.0 * a.sqrt()));
    let nodes = grid.nodes();
    let us: Vec<Vec<f64>> = history.snapshots.iter().map(|s| s.iter().map(|v| v - sigma).collect()).collect();
    let sup_near: Vec<f64> = us
        .iter()
        .map(|u| {
            u.iter()
                .zip(&nodes)
                .filter(|(_, z)| z.abs() <= opts.delta_l)
                .fold(0.0f64, |acc, (u, _)| acc.max(u.abs()))
        })
        .collect();
    let in_window = |tau: f64, j: usize| {
        let hi = tau_end - j as f64;
        tau >= hi - 1.0 - 1e-9 && tau <= hi + 1e-9
    };
    let mut out = GammaTrace {
        r: opts.r,
        l_cut,
        tau_end,
        delta: Vec::with_capacity(windows),
        gamma: vec![0.0; windows],
        gamma_plus: vec![0.0; windows],
        gamma_zero: vec![0.0; windows],
        gamma_minus: vec![0.0; windows],
        big: Vec::new(),
        big_plus: Vec::new(),
        big_zero: Vec::new(),
        big_minus: Vec::new(),
        epsilon: vec![0.0; windows],
        c_equiv: 1.0,
    };
    for j in 0..windows {
        let hi = tau_end - j as f64;
        let delta = history
            .times
            .iter()
            .zip(&sup_near)
            .filter(|(t, _)| **t <= hi + 1e-9)
            .fold(0.0f64, |acc, (_, s)| acc.max(*s));
        out.delta.push(delta);
        let scale = if delta > 0.0 { delta.powf(opts.r) } else { 1.0 };
        let radius = l_cut / scale;
        for (i, &tau) in history.times.iter().enumerate() {
            if !in_window(tau, j) {
                continue;
            }
            let cut: Vec<f64> = us[i].iter().zip(&nodes).map(|(u, z)| u * cutoff_chi(z / radius)).collect();
            let d = decompose_samples(basis, &grid, &cut, n)?;
            out.gamma[j] = out.gamma[j].max(d.total_norm2);
            out.gamma_plus[j] = out.gamma_plus[j].max(d.plus_norm2);
            out.gamma_zero[j] = out.gamma_zero[j].max(d.zero_norm2);
            out.gamma_minus[j] = out.gamma_minus[j].max(d.minus_norm2);
            if i + 1 < m {
                let dt = history.times[i + 1] - tau;
                let lu = fd_operator(a, grid.x0, grid.dx, &us[i]);
                let mut acc = 0.0;
                for (k, (z, l)) in lu.iter().enumerate() {
                    if z.abs() <= radius {
                        let ut = (us[i + 1][k + 1] - us[i][k + 1]) / dt;
                        acc += (-z * z / (4.0 * a)).exp() * (ut - l) * (ut - l) * grid.dx;
                    }
                }
                out.epsilon[j] = out.epsilon[j].max(acc);
            }
        }
    }
    out.big = tail_sup(&out.gamma);
    out.big_plus = tail_sup(&out.gamma_plus);
    out.big_zero = tail_sup(&out.gamma_zero);
    out.big_minus = tail_sup(&out.gamma_minus);
    out.c_equiv = equivalence_constant(&out);
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    PositiveDominated,
    NeutralDominated,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Classification {
    pub verdict: Verdict,
    /// Slope per window of `log((Γ⁰+Γ⁻)/Γ⁺)` over the last half.
    pub slope_positive: f64,
    /// Slope per window of `log((Γ⁺+Γ⁻)/Γ⁰)` over the last half.
    pub slope_neutral: f64,
    pub max_ratio_positive: f64,
    pub max_ratio_neutral: f64,
}

/// Ratios at or below this level count as already negligible.
pub const RATIO_FLOOR: f64 = 1e-6;
/// A ratio trends to zero when its log falls faster than this per window.
pub const SLOPE_THRESHOLD: f64 = -0.1;

fn ratio_stats(num: &[f64], den: &[f64]) -> (f64, f64) {
    let mut ks = Vec::new();
    let mut logs = Vec::new();
    let mut worst: f64 = 0.0;
    for k in 0..num.len() {
        let r = if den[k] > 0.0 {
            num[k] / den[k]
        } else if num[k] > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        worst = worst.max(r);
        if r > 0.0 && r.is_finite() {
            ks.push(k as f64);
            logs.push(r.ln());
        }
    }
    let slope = if ks.len() >= 2 && worst.is_finite() {
        line(&ks, &logs).map(|(s, _)| s).unwrap_or(f64::NAN)
    } else {
        f64::NAN
    };
    (slope, worst)
}

/// Decides which eigenspace dominates along the tail `k → ∞` of the trace.
pub fn merle_zaag_classifier(trace: &GammaTrace) -> Classification {
    let m = trace.windows();
    let mut out = Classification {
        verdict: Verdict::Inconclusive,
        slope_positive: f64::NAN,
        slope_neutral: f64::NAN,
        max_ratio_positive: f64::NAN,
        max_ratio_neutral: f64::NAN,
    };
    if m < 8 {
        return out;
    }
    let from = m / 2;
    let p = &trace.big_plus[from..];
    let z = &trace.big_zero[from..];
    let mi = &trace.big_minus[from..];
    let non_pos: Vec<f64> = z.iter().zip(mi).map(|(a, b)| a + b).collect();
    let non_zero: Vec<f64> = p.iter().zip(mi).map(|(a, b)| a + b).collect();
    let (sp, wp) = ratio_stats(&non_pos, p);
    let (sn, wn) = ratio_stats(&non_zero, z);
    out.slope_positive = sp;
    out.slope_neutral = sn;
    out.max_ratio_positive = wp;
    out.max_ratio_neutral = wn;
    let positive = wp <= RATIO_FLOOR || sp < SLOPE_THRESHOLD;
    let neutral = wn <= RATIO_FLOOR || sn < SLOPE_THRESHOLD;
    out.verdict = match (positive, neutral) {
        (true, false) => Verdict::PositiveDominated,
        (false, true) => Verdict::NeutralDominated,
        _ => Verdict::Inconclusive,
    };
    out
}
