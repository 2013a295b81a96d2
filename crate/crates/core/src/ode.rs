//! Embedded Dormand–Prince 5(4) integrator with absolute/relative error control.
//!
//! Stage evaluations may fail (for instance when a trial stage leaves the
//! ellipticity region); such steps are rejected and retried with a smaller
//! step. A failure that persists down to the minimal step is reported.

use crate::error::{FlowError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dopri5Options {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen automatically when `None`.
    pub h_init: Option<f64>,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for Dopri5Options {
    fn default() -> Self {
        Dopri5Options {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: None,
            h_max: f64::INFINITY,
            max_steps: 2_000_000,
        }
    }
}

impl Dopri5Options {
    pub fn with_tol(tol: f64) -> Self {
        Dopri5Options {
            rtol: tol,
            atol: tol * 1e-2,
            ..Default::default()
        }
    }
}

/// Whether integration should continue after an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub failed_stages: usize,
    pub rhs_evals: usize,
}

/// Accepted nodes with the derivative at each node, enough for cubic Hermite
/// dense output.
#[derive(Debug, Clone)]
pub struct Trajectory<const N: usize> {
    pub t: Vec<f64>,
    pub y: Vec<[f64; N]>,
    pub dy: Vec<[f64; N]>,
    pub stats: StepStats,
    /// Largest accepted local error estimate, in units of the tolerance.
    pub max_error_ratio: f64,
}

impl<const N: usize> Trajectory<N> {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn last(&self) -> (f64, [f64; N]) {
        let i = self.t.len() - 1;
        (self.t[i], self.y[i])
    }
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const B: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

fn combine<const N: usize>(y: &[f64; N], h: f64, coeffs: &[f64], ks: &[[f64; N]]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks) {
        if *c != 0.0 {
            for i in 0..N {
                out[i] += h * c * k[i];
            }
        }
    }
    out
}

/// Integrates `y' = rhs(t, y)` from `t0` towards `t_end` (either direction).
///
/// `observer` sees every accepted node including the initial one and can stop
/// the integration early or abort it with an error.
pub fn integrate<const N: usize, R, O>(
    mut rhs: R,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    opts: &Dopri5Options,
    mut observer: O,
) -> Result<Trajectory<N>>
where
    R: FnMut(f64, &[f64; N]) -> Result<[f64; N]>,
    O: FnMut(f64, &[f64; N], &[f64; N]) -> Result<Control>,
{
    if !(opts.rtol > 0.0) || !(opts.atol > 0.0) {
        return Err(FlowError::InvalidParameter(
            "integrator tolerances must be positive".into(),
        ));
    }
    let dir = if t_end >= t0 { 1.0 } else { -1.0 };
    let mut stats = StepStats::default();
    let mut t = t0;
    let mut y = y0;
    let mut f = rhs(t, &y)?;
    stats.rhs_evals += 1;

    let mut traj = Trajectory {
        t: vec![t],
        y: vec![y],
        dy: vec![f],
        stats,
        max_error_ratio: 0.0,
    };
    if observer(t, &y, &f)? == Control::Stop || t == t_end {
        return Ok(traj);
    }

    let scale = |a: &[f64; N], b: &[f64; N], i: usize| {
        opts.atol + opts.rtol * a[i].abs().max(b[i].abs())
    };
    let mut h = match opts.h_init {
        Some(h) => h.abs(),
        None => {
            let d0 = (0..N)
                .map(|i| (y[i] / scale(&y, &y, i)).powi(2))
                .sum::<f64>()
                .sqrt();
            let d1 = (0..N)
                .map(|i| (f[i] / scale(&y, &y, i)).powi(2))
                .sum::<f64>()
                .sqrt();
            if d0 < 1e-5 || d1 < 1e-5 {
                1e-6
            } else {
                0.01 * d0 / d1
            }
        }
    }
    .min(opts.h_max)
    .min((t_end - t0).abs());
    let mut last_stage_error: Option<FlowError> = None;
    let mut just_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= opts.max_steps {
            return Err(FlowError::ToleranceFailure { t, h });
        }
        let h_floor = 1e-14 * t.abs().max(1.0);
        if h < h_floor {
            return Err(last_stage_error.unwrap_or(FlowError::ToleranceFailure { t, h }));
        }
        let remaining = (t_end - t).abs();
        let mut hs = h.min(remaining);
        if remaining - hs < 1e-12 * remaining.max(1.0) {
            hs = remaining;
        }
        let step = dir * hs;

        let stages = (|| -> Result<([[f64; N]; 7], [f64; N])> {
            let mut k = [[0.0; N]; 7];
            k[0] = f;
            let y2 = combine(&y, step, &A2, &k[..1]);
            k[1] = rhs(t + C[1] * step, &y2)?;
            let y3 = combine(&y, step, &A3, &k[..2]);
            k[2] = rhs(t + C[2] * step, &y3)?;
            let y4 = combine(&y, step, &A4, &k[..3]);
            k[3] = rhs(t + C[3] * step, &y4)?;
            let y5 = combine(&y, step, &A5, &k[..4]);
            k[4] = rhs(t + C[4] * step, &y5)?;
            let y6 = combine(&y, step, &A6, &k[..5]);
            k[5] = rhs(t + C[5] * step, &y6)?;
            let yn = combine(&y, step, &B, &k[..6]);
            k[6] = rhs(t + step, &yn)?;
            Ok((k, yn))
        })();

        let (k, y_new) = match stages {
            Ok(v) => {
                stats.rhs_evals += 6;
                v
            }
            Err(e) => {
                stats.rhs_evals += 6;
                stats.failed_stages += 1;
                stats.rejected += 1;
                last_stage_error = Some(e);
                h = hs * 0.25;
                just_rejected = true;
                continue;
            }
        };

        let mut err = 0.0;
        for i in 0..N {
            let mut e = 0.0;
            for (j, kj) in k.iter().enumerate() {
                e += E[j] * kj[i];
            }
            let r = step * e / scale(&y, &y_new, i);
            err += r * r;
        }
        let err = (err / N as f64).sqrt();
        if !err.is_finite() {
            stats.rejected += 1;
            h = hs * 0.25;
            just_rejected = true;
            continue;
        }

        let mut factor = if err == 0.0 {
            5.0
        } else {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        };
        if err <= 1.0 {
            stats.accepted += 1;
            t = if hs == remaining { t_end } else { t + step };
            y = y_new;
            f = k[6];
            traj.max_error_ratio = traj.max_error_ratio.max(err);
            traj.t.push(t);
            traj.y.push(y);
            traj.dy.push(f);
            last_stage_error = None;
            if just_rejected {
                factor = factor.min(1.0);
            }
            just_rejected = false;
            h = (hs * factor).min(opts.h_max);
            if observer(t, &y, &f)? == Control::Stop || t == t_end {
                break;
            }
        } else {
            stats.rejected += 1;
            just_rejected = true;
            h = hs * factor.min(1.0);
        }
    }
    traj.stats = stats;
    Ok(traj)
}
