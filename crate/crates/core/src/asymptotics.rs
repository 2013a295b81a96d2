//! Fits of the asymptotic statements: the bowl expansion at infinity, the
//! shrinker neck bounds across an `a`-sweep and growth rates of rescaled runs.

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::fit::{fit_basis, line};
use crate::flow::{Boundary, FlowHistory, Grid, RadialFlowState, Representation};
use crate::soliton::{shrinker_upper_bound_check, BowlProfile, LowerBoundReport, ShrinkerProfile};

/// A fitted model with its window, residual and target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticFit {
    pub model: String,
    pub window: [f64; 2],
    pub coefficients: Vec<f64>,
    /// Largest residual relative to the smallest retained term at the same sample.
    pub relative_residual: f64,
    pub target: Option<f64>,
    pub rel_error: Option<f64>,
}

impl AsymptoticFit {
    /// Whether the residual is within 1% of the retained terms.
    pub fn residual_ok(&self) -> bool {
        self.relative_residual <= 0.01
    }
}

/// Number of log-spaced samples in the bowl fit.
pub const BOWL_FIT_SAMPLES: usize = 200;

/// Fits `ζ_ρ − ρ/(2F(0,1)) ≈ c₂/ρ` on `[ρ_lo, ρ_hi]` with log-spaced samples;
/// the target for `c₂` is `−2γ̇¹(0,1,…,1)`.
pub fn fit_bowl_expansion(bowl: &BowlProfile, window: [f64; 2]) -> Result<AsymptoticFit> {
    fit_bowl_expansion_with(bowl, window, BOWL_FIT_SAMPLES)
}

pub fn fit_bowl_expansion_with(bowl: &BowlProfile, window: [f64; 2], samples: usize) -> Result<AsymptoticFit> {
    let [lo, hi] = window;
    if !(lo >= 100.0 && hi >= 10.0 * lo) {
        return Err(FlowError::WindowTooNarrow(format!(
            "[{lo}, {hi}] needs rho_hi >= 10 rho_lo >= 100"
        )));
    }
    if hi > bowl.rho_max() {
        return Err(FlowError::OutOfRange {
            lo: 0.0,
            hi: bowl.rho_max(),
            node: hi,
        });
    }
    let sp = bowl.speed();
    let slope0 = 1.0 / (2.0 * sp.f01());
    let samples = samples.max(2);
    let rho: Vec<f64> = (0..samples)
        .map(|i| lo * (hi / lo).powf(i as f64 / (samples - 1) as f64))
        .collect();
    let xi = rho
        .iter()
        .map(|&r| {
            bowl.slope_at(r)
                .map(|p| p - slope0 * r)
                .ok_or(FlowError::OutOfRange { lo: 0.0, hi: bowl.rho_max(), node: r })
        })
        .collect::<Result<Vec<f64>>>()?;
    // weights make the residual relative to the retained term
    let weights: Vec<f64> = rho.iter().map(|r| r * r).collect();
    let fit = fit_basis(&rho, &xi, Some(&weights), 1, |_, r| 1.0 / r)?;
    let c2 = fit.coefficients[0];
    let relative_residual = rho
        .iter()
        .zip(&xi)
        .map(|(r, x)| (x - c2 / r).abs() / (c2 / r).abs())
        .fold(0.0, f64::max);
    let target = -2.0 * sp.a_lin();
    Ok(AsymptoticFit {
        model: "zeta_rho - rho/(2F(0,1)) = c2/rho".into(),
        window,
        coefficients: vec![c2],
        relative_residual,
        target: Some(target),
        rel_error: Some(((c2 - target) / target).abs()),
    })
}

/// `ϑ = ζ_ρ/ρ`, `ξ = ζ_ρ − ρ/(2F(0,1))` and `λ = ρξ` at one radius; the limits
/// are `1/(2F(0,1))`, `0` and `−2γ̇¹(0,1,…,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BowlReduction {
    pub rho: f64,
    pub theta: f64,
    pub xi: f64,
    pub lambda: f64,
}

pub fn bowl_reductions(bowl: &BowlProfile, rho: &[f64]) -> Result<Vec<BowlReduction>> {
    let slope0 = 1.0 / (2.0 * bowl.speed().f01());
    rho.iter()
        .map(|&r| {
            let p = bowl.slope_at(r).ok_or(FlowError::OutOfRange { lo: 0.0, hi: bowl.rho_max(), node: r })?;
            let xi = p - slope0 * r;
            Ok(BowlReduction {
                rho: r,
                theta: p / r,
                xi,
                lambda: r * xi,
            })
        })
        .collect()
}

/// The lower bound at every node and the upper-bound constant per `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NeckSweep {
    pub a: Vec<f64>,
    pub lower: Vec<LowerBoundReport>,
    pub c_fit: Vec<f64>,
    pub lower_held: bool,
    /// `max/min` of `C` over the three largest `a`.
    pub top_spread: f64,
    pub c_max: f64,
}

/// Runs the neck bounds over a sweep of profiles; `L` is the upper end of
/// the interval on which the upper-bound constant is fitted.
pub fn fit_shrinker_neck(profiles: &[ShrinkerProfile], l: f64) -> Result<NeckSweep> {
    if profiles.len() < 4 {
        return Err(FlowError::InvalidParameter(format!("{} profiles, at least 4 needed", profiles.len())));
    }
    let mut ps: Vec<&ShrinkerProfile> = profiles.iter().collect();
    ps.sort_by(|x, y| x.a.total_cmp(&y.a));
    let (amin, amax) = (ps[0].a, ps[ps.len() - 1].a);
    if amax < 8.0 * amin {
        return Err(FlowError::InvalidParameter(format!("a spans [{amin}, {amax}], a factor 8 is needed")));
    }
    let mut out = NeckSweep {
        a: Vec::new(),
        lower: Vec::new(),
        c_fit: Vec::new(),
        lower_held: true,
        top_spread: 1.0,
        c_max: 0.0,
    };
    for p in ps {
        let rep = shrinker_upper_bound_check(p, l.min(p.a * 0.999).max(p.l0))?;
        out.lower_held &= rep.lower.violations == 0;
        out.a.push(p.a);
        out.lower.push(rep.lower);
        out.c_fit.push(rep.c_fit);
        out.c_max = out.c_max.max(rep.c_fit);
    }
    let top = &out.c_fit[out.c_fit.len() - 3..];
    let (mx, mn) = top.iter().fold((f64::MIN, f64::MAX), |(x, y), c| (x.max(*c), y.min(*c)));
    out.top_spread = mx / mn;
    Ok(out)
}

/// Growth of `sup_{|z|≤L}|u|` along a rescaled run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub l: f64,
    pub tau: [f64; 2],
    /// `None` for an exact fixed point.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    pub max_residual: f64,
    pub fixed_point: bool,
}

/// Fits `log sup_{|z|≤L}|v − σ|` against `τ`; needs at least 6 units of `τ`.
pub fn measure_rescaled_decay(history: &FlowHistory, sigma: f64, l: f64) -> Result<DecayFit> {
    let m = history.len();
    let span = if m > 0 { history.times[m - 1] - history.times[0] } else { 0.0 };
    if span < 6.0 - 1e-9 {
        return Err(FlowError::WindowTooShort {
            got: span.max(0.0) as usize,
            needed: 6,
        });
    }
    let nodes = history.grid.nodes();
    let sups: Vec<f64> = history
        .snapshots
        .iter()
        .map(|s| {
            s.iter()
                .zip(&nodes)
                .filter(|(_, z)| z.abs() <= l)
                .fold(0.0f64, |acc, (v, _)| acc.max((v - sigma).abs()))
        })
        .collect();
    let tau = [history.times[0], history.times[m - 1]];
    if sups.iter().all(|s| *s == 0.0) {
        return Ok(DecayFit {
            l,
            tau,
            slope: None,
            intercept: None,
            max_residual: 0.0,
            fixed_point: true,
        });
    }
    let (ts, logs): (Vec<f64>, Vec<f64>) = history
        .times
        .iter()
        .zip(&sups)
        .filter(|(_, s)| **s > 0.0)
        .map(|(t, s)| (*t, s.ln()))
        .unzip();
    let (slope, intercept) = line(&ts, &logs)?;
    let max_residual = ts
        .iter()
        .zip(&logs)
        .map(|(t, y)| (y - slope * t - intercept).abs())
        .fold(0.0, f64::max);
    Ok(DecayFit {
        l,
        tau,
        slope: Some(slope),
        intercept: Some(intercept),
        max_residual,
        fixed_point: false,
    })
}

/// The shrinker `v(z)` on `[z_lo, z_hi]` as a rescaled state with its own
/// values as boundary data.
pub fn shrinker_rescaled_state(profile: &ShrinkerProfile, z_lo: f64, z_hi: f64, dx: f64) -> Result<RadialFlowState> {
    if !(z_lo >= profile.z_min() && z_hi < profile.a) {
        return Err(FlowError::OutOfRange {
            lo: profile.z_min(),
            hi: profile.a,
            node: if z_lo < profile.z_min() { z_lo } else { z_hi },
        });
    }
    let grid = Grid::new(z_lo, z_hi, dx)?;
    let values = grid
        .nodes()
        .into_iter()
        .map(|z| profile.v_at(z).ok_or(FlowError::OutOfRange { lo: z_lo, hi: z_hi, node: z }))
        .collect::<Result<Vec<f64>>>()?;
    let (vl, vr) = (values[0], values[grid.n - 1]);
    RadialFlowState::new(
        Representation::Rescaled,
        profile.speed(),
        grid,
        values,
        0.0,
        Boundary::dirichlet(move |_, _| vl),
        Boundary::dirichlet(move |_, _| vr),
    )
}

/// Largest `|v_τ|` of the discretized rescaled flow at the shrinker profile;
/// `O(Δ²)` when the profile is stationary.
pub fn shrinker_stationarity(profile: &ShrinkerProfile, z_lo: f64, z_hi: f64, dx: f64) -> Result<f64> {
    shrinker_rescaled_state(profile, z_lo, z_hi, dx)?.max_interior_rate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::solve_bowl;
    use crate::SpeedFunction;

    #[test]
    fn window_preconditions() {
        let sp = SpeedFunction::sum(3).unwrap();
        let b = solve_bowl(&sp, 200.0, 1e-9).unwrap();
        assert!(matches!(fit_bowl_expansion(&b, [50.0, 1000.0]), Err(FlowError::WindowTooNarrow(_))));
        assert!(matches!(fit_bowl_expansion(&b, [100.0, 900.0]), Err(FlowError::WindowTooNarrow(_))));
        assert!(matches!(fit_bowl_expansion(&b, [100.0, 1000.0]), Err(FlowError::OutOfRange { .. })));
    }

    #[test]
    fn sum_bowl_coefficient() {
        let sp = SpeedFunction::sum(3).unwrap();
        let b = solve_bowl(&sp, 1000.5, 1e-10).unwrap();
        let f = fit_bowl_expansion(&b, [100.0, 1000.0]).unwrap();
        assert!(f.rel_error.unwrap() < 0.05, "{f:?}");
        assert!(f.residual_ok(), "{f:?}");
        let fine = fit_bowl_expansion_with(&b, [100.0, 1000.0], 2 * BOWL_FIT_SAMPLES).unwrap();
        assert!((fine.coefficients[0] / f.coefficients[0] - 1.0).abs() < 0.01);
        let r = bowl_reductions(&b, &[1000.0]).unwrap()[0];
        assert!((r.theta - 0.25).abs() < 1e-5 && r.xi.abs() < 3e-3 && (r.lambda + 2.0).abs() < 1e-3);
    }
}
