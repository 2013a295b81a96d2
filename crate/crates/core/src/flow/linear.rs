//! Finite-difference check of the linearized rescaled operator at the cylinder.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::speed::SpeedFunction;

use super::state::{Boundary, Grid, RadialFlowState, Representation};

/// Sum of Gaussian bumps with analytic derivatives.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpDirection {
    pub centers: Vec<f64>,
    pub widths: Vec<f64>,
    pub weights: Vec<f64>,
}

impl BumpDirection {
    pub fn random(rng: &mut impl Rng, half_window: f64, bumps: usize) -> Self {
        let mut d = BumpDirection {
            centers: Vec::new(),
            widths: Vec::new(),
            weights: Vec::new(),
        };
        for _ in 0..bumps {
            d.centers.push(rng.gen_range(-0.5 * half_window..0.5 * half_window));
            d.widths.push(rng.gen_range(0.6..1.5));
            d.weights.push(rng.gen_range(-1.0..1.0));
        }
        d
    }

    /// `(u, u_z, u_zz)`.
    pub fn eval(&self, z: f64) -> (f64, f64, f64) {
        let mut out = (0.0, 0.0, 0.0);
        for ((c, s), w) in self.centers.iter().zip(&self.widths).zip(&self.weights) {
            let x = (z - c) / s;
            let e = w * (-0.5 * x * x).exp();
            out.0 += e;
            out.1 += -x / s * e;
            out.2 += (x * x - 1.0) / (s * s) * e;
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearizationReport {
    pub a: f64,
    pub dx: f64,
    pub half_window: f64,
    pub eps: f64,
    pub seed: u64,
    /// `max|DN·u − 𝓛u| / max|𝓛u|` per direction.
    pub deviations: Vec<f64>,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Compares the central difference `(N(σ+εu) − N(σ−εu))/(2ε)` of the discrete
/// rescaled operator with `𝓛u = a u_zz − z u_z/2 + u` in random directions.
pub fn linearize_rescaled_at_cylinder(
    speed: &SpeedFunction,
    dx: f64,
    half_window: f64,
    directions: usize,
    seed: u64,
) -> Result<LinearizationReport> {
    let grid = Grid::new(-half_window, half_window, dx)?;
    let sigma = speed.cylinder_radius();
    let a = speed.a_lin();
    let eps = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = grid.nodes();
    let base = RadialFlowState::from_fn(Representation::Rescaled, speed, grid, |_| sigma, 0.0, Boundary::Extrapolate, Boundary::Extrapolate)?;
    let mut deviations = Vec::with_capacity(directions);
    for _ in 0..directions {
        let dir = BumpDirection::random(&mut rng, half_window, 3);
        let plus: Vec<f64> = nodes.iter().map(|&z| sigma + eps * dir.eval(z).0).collect();
        let minus: Vec<f64> = nodes.iter().map(|&z| sigma - eps * dir.eval(z).0).collect();
        let rp = base.rates_of(&plus)?.rate;
        let rm = base.rates_of(&minus)?.rate;
        let (mut num, mut den): (f64, f64) = (0.0, 0.0);
        for i in 1..grid.n - 1 {
            let z = nodes[i];
            let (u, uz, uzz) = dir.eval(z);
            let lu = a * uzz - 0.5 * z * uz + u;
            let fd = (rp[i] - rm[i]) / (2.0 * eps);
            num = num.max((fd - lu).abs());
            den = den.max(lu.abs());
        }
        deviations.push(num / den);
    }
    let max_deviation = deviations.iter().cloned().fold(0.0, f64::max);
    let tolerance = 1e-4f64.max(10.0 * dx * dx);
    Ok(LinearizationReport {
        a,
        dx,
        half_window,
        eps,
        seed,
        deviations,
        max_deviation,
        tolerance,
        passed: max_deviation <= tolerance,
    })
}
