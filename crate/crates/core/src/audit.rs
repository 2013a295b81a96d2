//! Seeded property suites shared by the test harness and `verify`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{expansion_error_a, expansion_error_g, scale_sweep, trace_expansion_error, CylinderGraph};
use crate::speed::SpeedFunction;

/// Worst observed value of each speed invariant over the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeedAudit {
    pub label: String,
    pub samples: usize,
    /// `max |γ(tλ) − tγ(λ)|/γ(tλ)` for `t ∈ {½, 2, 10}`.
    pub homogeneity: f64,
    /// Largest change of `γ` under permutations (all of them for `n ≤ 4`).
    pub symmetry: f64,
    pub min_gradient: f64,
    /// Largest relative gap between the gradient and central differences.
    pub gradient_fd: f64,
    /// `max |F(f(y,z), y) − z|/z`.
    pub inverse: f64,
    /// `max |f(ty,tz) − t f(y,z)|/|t f(y,z)|`.
    pub inverse_scaling: f64,
    /// Smallest `γ(½(λ+μ)) − ½(γ(λ)+γ(μ))` relative to `γ(½(λ+μ))`.
    pub concavity_gap: f64,
    /// Linear speeds must show equality in the midpoint test.
    pub linear: bool,
}

impl SpeedAudit {
    pub fn passed(&self) -> bool {
        let concave_ok = if self.linear {
            self.concavity_gap.abs() <= 1e-12
        } else {
            self.concavity_gap >= -1e-12
        };
        self.homogeneity <= 1e-12
            && self.symmetry <= 1e-12
            && self.min_gradient > 0.0
            && self.gradient_fd <= 1e-6
            && self.inverse <= 1e-12
            && self.inverse_scaling <= 1e-10
            && concave_ok
    }
}

/// A random point of the cone, entries of order one.
pub fn random_cone_point(speed: &SpeedFunction, rng: &mut impl Rng) -> Vec<f64> {
    let n = speed.n();
    loop {
        let l: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.4..2.0)).collect();
        if speed.contains_slice(&l) && l.iter().sum::<f64>() > 0.05 {
            return l;
        }
    }
}

/// A random point of `U = {F(0,1) < z/y < Q}`.
pub fn random_inverse_point(speed: &SpeedFunction, rng: &mut impl Rng) -> (f64, f64) {
    let y = rng.gen_range(0.1..5.0);
    let hi = if speed.q().is_finite() { speed.q() } else { speed.f01() + 20.0 };
    let s = speed.f01() + (hi - speed.f01()) * rng.gen_range(0.01..0.99);
    (y, s * y)
}

fn label(speed: &SpeedFunction) -> String {
    format!("{} n={}", speed.kind(), speed.n())
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

pub fn audit_speed(speed: &SpeedFunction, samples: usize, seed: u64) -> Result<SpeedAudit> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = speed.n();
    let perms = if n <= 4 {
        permutations(n)
    } else {
        // rotations and one reversal
        let mut v: Vec<Vec<usize>> = (0..n).map(|s| (0..n).map(|i| (i + s) % n).collect()).collect();
        v.push((0..n).rev().collect());
        v
    };
    let mut a = SpeedAudit {
        label: label(speed),
        samples,
        homogeneity: 0.0,
        symmetry: 0.0,
        min_gradient: f64::INFINITY,
        gradient_fd: 0.0,
        inverse: 0.0,
        inverse_scaling: 0.0,
        concavity_gap: f64::INFINITY,
        linear: speed.is_linear(),
    };
    let inv = speed.inverse();
    for _ in 0..samples {
        let l = random_cone_point(speed, &mut rng);
        let g = speed.eval_slice(&l)?;
        for t in [0.5, 2.0, 10.0] {
            let tl: Vec<f64> = l.iter().map(|v| t * v).collect();
            let gt = speed.eval_slice(&tl)?;
            a.homogeneity = a.homogeneity.max((gt - t * g).abs() / gt.abs());
        }
        for p in &perms {
            let pl: Vec<f64> = p.iter().map(|&i| l[i]).collect();
            a.symmetry = a.symmetry.max((speed.eval_slice(&pl)? - g).abs() / g.abs());
        }
        let grad = speed.gradient_slice(&l)?;
        for i in 0..n {
            a.min_gradient = a.min_gradient.min(grad[i]);
            let h = 1e-6 * (1.0 + l[i].abs());
            let (mut lp, mut lm) = (l.clone(), l.clone());
            lp[i] += h;
            lm[i] -= h;
            let fd = (speed.eval_slice(&lp)? - speed.eval_slice(&lm)?) / (2.0 * h);
            a.gradient_fd = a.gradient_fd.max((fd - grad[i]).abs() / grad[i].abs().max(1e-3));
        }
        let m = random_cone_point(speed, &mut rng);
        let mid: Vec<f64> = l.iter().zip(&m).map(|(x, y)| 0.5 * (x + y)).collect();
        let gm = speed.eval_slice(&mid)?;
        let gap = (gm - 0.5 * (g + speed.eval_slice(&m)?)) / gm.abs();
        if a.linear {
            // equality is checked in absolute value
            a.concavity_gap = if gap.abs() > a.concavity_gap.abs() || a.concavity_gap.is_infinite() { gap } else { a.concavity_gap };
        } else {
            a.concavity_gap = a.concavity_gap.min(gap);
        }

        let (y, z) = random_inverse_point(speed, &mut rng);
        let x = inv.invert(y, z)?;
        a.inverse = a.inverse.max((speed.restriction(x, y)? - z).abs() / z.abs());
        let t = rng.gen_range(0.2..5.0);
        let xt = inv.invert(t * y, t * z)?;
        a.inverse_scaling = a.inverse_scaling.max((xt - t * x).abs() / (t * x).abs().max(1e-300));
    }
    Ok(a)
}

/// Halving sweeps of the three expansion errors for `u = c·e^{−z²}` over the
/// cylinder of radius `r`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryAudit {
    pub label: String,
    pub halvings: usize,
    pub a_change: f64,
    pub g_change: f64,
    /// `None` when the trace error vanishes identically (linear speeds).
    pub trace_change: Option<f64>,
}

impl GeometryAudit {
    pub fn passed(&self, tol: f64) -> bool {
        self.a_change < tol && self.g_change < tol && self.trace_change.is_none_or(|c| c < tol)
    }
}

pub fn audit_geometry(speed: &SpeedFunction, r: f64, amplitude: f64, halvings: usize) -> Result<GeometryAudit> {
    let z: Vec<f64> = (0..=400).map(|i| -4.0 + 0.02 * i as f64).collect();
    let graph = CylinderGraph::from_fn(r, &z, |z| {
        let e = (-z * z).exp();
        (amplitude * e, -2.0 * z * amplitude * e, (4.0 * z * z - 2.0) * amplitude * e)
    })?;
    let a = scale_sweep(&graph, halvings, |g| expansion_error_a(g).map(|r| r.principal))?;
    let g = scale_sweep(&graph, halvings, |g| expansion_error_g(g, speed))?;
    let f = |z: f64| {
        let e = (-z * z).exp();
        (-2.0 * z * e, (4.0 * z * z - 2.0) * e)
    };
    let t = scale_sweep(&graph, halvings, |g| trace_expansion_error(g, speed, f))?;
    let trace_change = if t.rows.iter().all(|r| r.sup_error <= 1e-14) {
        None
    } else {
        Some(t.max_relative_change)
    };
    Ok(GeometryAudit {
        label: label(speed),
        halvings,
        a_change: a.max_relative_change,
        g_change: g.max_relative_change,
        trace_change,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn permutation_count() {
        assert_eq!(permutations(4).len(), 24);
        assert_eq!(permutations(1), vec![vec![0]]);
    }
}
