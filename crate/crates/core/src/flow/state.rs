//! Rotationally symmetric hypersurfaces on a uniform 1D grid and their
//! time stepping under the fully nonlinear flow.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::speed::SpeedFunction;

/// Which scalar function describes the hypersurface.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Representation {
    /// Radius `r(z, t)` over the axis, `r_t = −γ(−r_zz/(1+r_z²), 1/r, …)`.
    Radial,
    /// Height `f(r, t)` over the radius, `f_t = γ(f_rr/(1+f_r²), f_r/r, …)`.
    Vertical,
    /// Rescaled radius `v(z, τ)`, `v_τ = −γ(−v_zz/(1+v_z²), 1/v, …) + (v − zv_z)/2`.
    Rescaled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    /// Explicit two-stage Runge–Kutta (Heun).
    Heun,
    /// Diffusion treated implicitly with coefficients frozen at the current state.
    SemiImplicit,
}

pub type BoundaryFn = Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>;

/// Condition at one end of the grid.
#[derive(Clone)]
pub enum Boundary {
    /// Values `g(x, t)` from a reference solution.
    Dirichlet(BoundaryFn),
    /// Quadratic extrapolation from the three nearest interior nodes.
    Extrapolate,
    /// Smooth axis of a vertical graph (`x₀ = 0`, even reflection).
    Axis,
}

impl Boundary {
    pub fn dirichlet(g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        Boundary::Dirichlet(Arc::new(g))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Boundary::Dirichlet(_) => "dirichlet",
            Boundary::Extrapolate => "extrapolate",
            Boundary::Axis => "axis",
        }
    }
}

impl fmt::Debug for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Uniform grid `x_i = x₀ + iΔ`, `i = 0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub x0: f64,
    pub dx: f64,
    pub n: usize,
}

impl Grid {
    /// Grid covering `[x0, x1]` with spacing `dx`; the interval must be a multiple of `dx`.
    pub fn new(x0: f64, x1: f64, dx: f64) -> Result<Self> {
        if !(dx > 0.0 && x1 > x0) {
            return Err(FlowError::InvalidParameter(format!(
                "grid [{x0}, {x1}] with spacing {dx}"
            )));
        }
        let cells = (x1 - x0) / dx;
        let m = cells.round();
        if (cells - m).abs() > 1e-9 * cells.max(1.0) || m < 4.0 {
            return Err(FlowError::InvalidParameter(format!(
                "spacing {dx} does not divide [{x0}, {x1}] into at least 4 cells"
            )));
        }
        Ok(Grid {
            x0,
            dx,
            n: m as usize + 1,
        })
    }

    pub fn x(&self, i: usize) -> f64 {
        self.x0 + i as f64 * self.dx
    }

    pub fn x1(&self) -> f64 {
        self.x(self.n - 1)
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }
}

/// A rotationally symmetric hypersurface sampled on a grid at time `t`.
#[derive(Debug, Clone)]
pub struct RadialFlowState {
    pub repr: Representation,
    pub grid: Grid,
    pub values: Vec<f64>,
    pub t: f64,
    pub left: Boundary,
    pub right: Boundary,
    speed: SpeedFunction,
    /// Pinch floor for radii.
    pub r_min: f64,
    pub cfl_safety: f64,
}

/// Pointwise right-hand side with the diffusion coefficient `∂u_t/∂u_xx`.
#[derive(Debug, Clone)]
pub struct Rates {
    pub rate: Vec<f64>,
    pub diffusion: Vec<f64>,
}

impl RadialFlowState {
    pub fn new(
        repr: Representation,
        speed: &SpeedFunction,
        grid: Grid,
        values: Vec<f64>,
        t: f64,
        left: Boundary,
        right: Boundary,
    ) -> Result<Self> {
        if values.len() != grid.n {
            return Err(FlowError::InvalidParameter(format!(
                "{} values for {} grid nodes",
                values.len(),
                grid.n
            )));
        }
        if matches!(right, Boundary::Axis) || (matches!(left, Boundary::Axis) && (repr != Representation::Vertical || grid.x0 != 0.0)) {
            return Err(FlowError::InvalidParameter(
                "the axis condition needs a vertical graph starting at r = 0".into(),
            ));
        }
        let st = RadialFlowState {
            repr,
            grid,
            values,
            t,
            left,
            right,
            speed: *speed,
            r_min: 1e-6,
            cfl_safety: 0.4,
        };
        if repr != Representation::Vertical {
            for (i, v) in st.values.iter().enumerate() {
                if !(*v > st.r_min) {
                    return Err(FlowError::Pinch { z: grid.x(i), t });
                }
            }
        }
        Ok(st)
    }

    /// Samples `u(x)` on the grid.
    pub fn from_fn(
        repr: Representation,
        speed: &SpeedFunction,
        grid: Grid,
        u: impl Fn(f64) -> f64,
        t: f64,
        left: Boundary,
        right: Boundary,
    ) -> Result<Self> {
        let values = grid.nodes().into_iter().map(u).collect();
        Self::new(repr, speed, grid, values, t, left, right)
    }

    pub fn speed(&self) -> &SpeedFunction {
        &self.speed
    }

    pub fn with_safety(mut self, safety: f64) -> Self {
        self.cfl_safety = safety;
        self
    }

    fn interior_rate(&self, u: &[f64], i: usize) -> Result<(f64, f64)> {
        let dx = self.grid.dx;
        let x = self.grid.x(i);
        let (um, u0, up) = (u[i - 1], u[i], u[i + 1]);
        let ux = (up - um) / (2.0 * dx);
        let uxx = (up - 2.0 * u0 + um) / (dx * dx);
        let g = 1.0 + ux * ux;
        let exit = |_| FlowError::ConeExit {
            location: "z",
            value: x,
        };
        match self.repr {
            Representation::Radial | Representation::Rescaled => {
                if !(u0 > self.r_min) {
                    return Err(FlowError::Pinch { z: x, t: self.t });
                }
                let (f, fx, _) = self.speed.restriction_with_partials(-uxx / g, 1.0 / u0).map_err(exit)?;
                let drift = if self.repr == Representation::Rescaled {
                    0.5 * (u0 - x * ux)
                } else {
                    0.0
                };
                Ok((-f + drift, fx / g))
            }
            Representation::Vertical => {
                let (f, fx, fy) = self.speed.restriction_with_partials(uxx / g, ux / x).map_err(exit)?;
                Ok((f, fx / g + fy * dx / (2.0 * x)))
            }
        }
    }

    /// Nodal rates for the values `u` at the state's time; boundary nodes
    /// other than the axis get rate 0.
    pub fn rates_of(&self, u: &[f64]) -> Result<Rates> {
        let n = self.grid.n;
        let mut rate = vec![0.0; n];
        let mut diffusion = vec![0.0; n];
        for i in 1..n - 1 {
            let (r, d) = self.interior_rate(u, i)?;
            rate[i] = r;
            diffusion[i] = d;
        }
        if matches!(self.left, Boundary::Axis) {
            let dx = self.grid.dx;
            let frr = 2.0 * (u[1] - u[0]) / (dx * dx);
            let f11 = self.speed.f11();
            rate[0] = self.speed.restriction(frr, frr).map_err(|_| FlowError::ConeExit {
                location: "z",
                value: 0.0,
            })?;
            diffusion[0] = f11;
        }
        Ok(Rates { rate, diffusion })
    }

    pub fn rates(&self) -> Result<Rates> {
        self.rates_of(&self.values)
    }

    /// Largest interior `|u_t|`, the discrete residual of a stationary profile.
    pub fn max_interior_rate(&self) -> Result<f64> {
        let r = self.rates()?;
        let lo = usize::from(!matches!(self.left, Boundary::Axis));
        Ok(r.rate[lo..self.grid.n - 1].iter().fold(0.0, |m, v| m.max(v.abs())))
    }

    fn apply_bc(&self, u: &mut [f64], t: f64) {
        let n = u.len();
        match &self.left {
            Boundary::Dirichlet(g) => u[0] = g(self.grid.x(0), t),
            Boundary::Extrapolate => u[0] = 3.0 * u[1] - 3.0 * u[2] + u[3],
            Boundary::Axis => {}
        }
        match &self.right {
            Boundary::Dirichlet(g) => u[n - 1] = g(self.grid.x(n - 1), t),
            Boundary::Extrapolate => u[n - 1] = 3.0 * u[n - 2] - 3.0 * u[n - 3] + u[n - 4],
            Boundary::Axis => {}
        }
    }

    /// `safety·Δ²/(2 max D)` for the current values.
    pub fn stable_dt(&self) -> Result<f64> {
        let r = self.rates()?;
        let dmax = r.diffusion.iter().cloned().fold(0.0, f64::max);
        if dmax <= 0.0 {
            return Ok(f64::INFINITY);
        }
        Ok(self.cfl_safety * self.grid.dx * self.grid.dx / (2.0 * dmax))
    }

    /// One step of length `dt`.
    pub fn step(&self, dt: f64, scheme: Scheme) -> Result<RadialFlowState> {
        if !(dt > 0.0) {
            return Err(FlowError::InvalidParameter(format!("time step {dt}")));
        }
        let r1 = self.rates()?;
        let t1 = self.t + dt;
        let mut next = self.clone();
        match scheme {
            Scheme::Heun => {
                let dmax = r1.diffusion.iter().cloned().fold(0.0, f64::max);
                // the safety factor applies when steps are chosen; here only the hard bound
                let limit = self.grid.dx * self.grid.dx / (2.0 * dmax);
                if dt > limit {
                    return Err(FlowError::StabilityViolation { dt, limit });
                }
                let mut mid: Vec<f64> = self.values.iter().zip(&r1.rate).map(|(u, k)| u + dt * k).collect();
                self.apply_bc(&mut mid, t1);
                let mut probe = self.clone();
                probe.t = t1;
                let r2 = probe.rates_of(&mid)?;
                for i in 0..self.grid.n {
                    next.values[i] = self.values[i] + 0.5 * dt * (r1.rate[i] + r2.rate[i]);
                }
            }
            Scheme::SemiImplicit => {
                let n = self.grid.n;
                let c = dt / (self.grid.dx * self.grid.dx);
                let mut lower = vec![0.0; n];
                let mut diag = vec![1.0; n];
                let mut upper = vec![0.0; n];
                let mut rhs = vec![0.0; n];
                for i in 1..n - 1 {
                    let d = r1.diffusion[i];
                    lower[i] = -c * d;
                    diag[i] = 1.0 + 2.0 * c * d;
                    upper[i] = -c * d;
                    rhs[i] = dt * r1.rate[i];
                }
                if matches!(self.left, Boundary::Axis) {
                    let d = r1.diffusion[0];
                    diag[0] = 1.0 + 2.0 * c * d;
                    upper[0] = -2.0 * c * d;
                    rhs[0] = dt * r1.rate[0];
                } else if let Boundary::Dirichlet(g) = &self.left {
                    rhs[0] = g(self.grid.x(0), t1) - self.values[0];
                }
                if let Boundary::Dirichlet(g) = &self.right {
                    rhs[n - 1] = g(self.grid.x(n - 1), t1) - self.values[n - 1];
                }
                let du = thomas(&lower, &diag, &upper, &rhs);
                for i in 0..n {
                    next.values[i] = self.values[i] + du[i];
                }
            }
        }
        self.apply_bc(&mut next.values, t1);
        next.t = t1;
        if self.repr != Representation::Vertical {
            for (i, v) in next.values.iter().enumerate() {
                if !(*v > self.r_min) {
                    return Err(FlowError::Pinch {
                        z: self.grid.x(i),
                        t: t1,
                    });
                }
            }
        }
        Ok(next)
    }

    /// Advances to `t_end` with equal steps no longer than the stability
    /// limit at the start (or `dt_max` if smaller). Returns the step count.
    pub fn advance_to(&mut self, t_end: f64, scheme: Scheme, dt_max: Option<f64>) -> Result<usize> {
        let span = t_end - self.t;
        if span <= 0.0 {
            return Ok(0);
        }
        let mut allowed = match scheme {
            Scheme::Heun => self.stable_dt()?,
            Scheme::SemiImplicit => f64::INFINITY,
        };
        if let Some(m) = dt_max {
            allowed = allowed.min(m);
        }
        if !allowed.is_finite() {
            return Err(FlowError::InvalidParameter(
                "semi-implicit stepping needs an explicit dt_max".into(),
            ));
        }
        let steps = (span / allowed).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let t0 = self.t;
        for k in 1..=steps {
            let mut next = self.step(dt, scheme)?;
            next.t = t0 + k as f64 * dt;
            *self = next;
        }
        self.t = t_end;
        Ok(steps)
    }

    /// Runs to `t_end`, keeping a snapshot every `stride` steps and at the end.
    pub fn run(mut self, t_end: f64, scheme: Scheme, dt_max: Option<f64>, stride: usize) -> Result<(RadialFlowState, FlowHistory)> {
        let span = t_end - self.t;
        let mut allowed = match scheme {
            Scheme::Heun => self.stable_dt()?,
            Scheme::SemiImplicit => f64::INFINITY,
        };
        if let Some(m) = dt_max {
            allowed = allowed.min(m);
        }
        if !(span > 0.0) || !allowed.is_finite() {
            return Err(FlowError::InvalidParameter(format!(
                "run to {t_end} from {} with step bound {allowed}",
                self.t
            )));
        }
        let steps = (span / allowed).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        let t0 = self.t;
        let stride = stride.max(1);
        let mut hist = FlowHistory {
            grid: self.grid,
            times: vec![self.t],
            snapshots: vec![self.values.clone()],
        };
        for k in 1..=steps {
            let mut next = self.step(dt, scheme)?;
            next.t = if k == steps { t_end } else { t0 + k as f64 * dt };
            self = next;
            if k % stride == 0 || k == steps {
                hist.times.push(self.t);
                hist.snapshots.push(self.values.clone());
            }
        }
        Ok((self, hist))
    }

    /// Discrete `u_x` by central differences (one-sided at the ends).
    pub fn derivative(&self) -> Vec<f64> {
        central_derivative(&self.values, self.grid.dx)
    }

    /// Solves `u(x) = level` on the grid by local cubic interpolation,
    /// assuming `u` increases in `x`.
    pub fn level_crossing(&self, level: f64) -> Option<f64> {
        let u = &self.values;
        let i = (0..u.len() - 1).find(|&i| u[i] <= level && level <= u[i + 1])?;
        let g = self.grid;
        let f = |x: f64| crate::interp::lagrange_cubic_uniform(g.x0, g.dx, u, x).unwrap_or(f64::NAN) - level;
        let (mut lo, mut hi) = (g.x(i), g.x(i + 1));
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-15 * mid.abs().max(1.0) {
                break;
            }
        }
        Some(0.5 * (lo + hi))
    }
}

pub(crate) fn central_derivative(u: &[f64], dx: f64) -> Vec<f64> {
    let n = u.len();
    (0..n)
        .map(|i| {
            if i == 0 {
                (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * dx)
            } else if i == n - 1 {
                (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) / (2.0 * dx)
            } else {
                (u[i + 1] - u[i - 1]) / (2.0 * dx)
            }
        })
        .collect()
}

/// Tridiagonal solve; `lower[0]` and `upper[n-1]` are ignored.
pub(crate) fn thomas(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for i in 1..n {
        let m = diag[i] - lower[i] * c[i - 1];
        c[i] = if i + 1 < n { upper[i] / m } else { 0.0 };
        d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for i in (0..n - 1).rev() {
        x[i] = d[i] - c[i] * x[i + 1];
    }
    x
}

/// Snapshots of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlowHistory {
    pub grid: Grid,
    pub times: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
}

impl FlowHistory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}
