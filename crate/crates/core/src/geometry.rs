//! Rotationally symmetric normal graphs `{x + u(z)ν(x)}` over the cylinder
//! `ℝ × S^{n−1}(r)`: exact curvatures against their first-order expansions.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::soliton::BowlProfile;
use crate::speed::SpeedFunction;

/// Height function over the cylinder of radius `r` with exact derivatives at each node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CylinderGraph {
    pub r: f64,
    pub z: Vec<f64>,
    pub u: Vec<f64>,
    pub u_z: Vec<f64>,
    pub u_zz: Vec<f64>,
}

impl CylinderGraph {
    /// Samples `u` and its derivatives given as closures.
    pub fn from_fn(r: f64, z: &[f64], u: impl Fn(f64) -> (f64, f64, f64)) -> Result<Self> {
        if !(r > 0.0) {
            return Err(FlowError::InvalidParameter(format!("cylinder radius {r}")));
        }
        let mut g = CylinderGraph {
            r,
            z: z.to_vec(),
            u: Vec::with_capacity(z.len()),
            u_z: Vec::with_capacity(z.len()),
            u_zz: Vec::with_capacity(z.len()),
        };
        for &x in z {
            let (a, b, c) = u(x);
            g.u.push(a);
            g.u_z.push(b);
            g.u_zz.push(c);
        }
        Ok(g)
    }

    /// The graph `s·u`.
    pub fn scaled(&self, s: f64) -> Self {
        let m = |v: &[f64]| v.iter().map(|x| s * x).collect();
        CylinderGraph {
            r: self.r,
            z: self.z.clone(),
            u: m(&self.u),
            u_z: m(&self.u_z),
            u_zz: m(&self.u_zz),
        }
    }

    /// `(g_zz, g_θθ)` with `g_θθ` per unit of the round metric.
    pub fn metric(&self, i: usize) -> (f64, f64) {
        let rho = self.r + self.u[i];
        (1.0 + self.u_z[i] * self.u_z[i], rho * rho)
    }

    /// `⟨ν, ν_Σ⟩ = 1/√(1 + u_z²)`.
    pub fn normal_tilt(&self, i: usize) -> f64 {
        1.0 / (1.0 + self.u_z[i] * self.u_z[i]).sqrt()
    }

    pub fn kappa_axial(&self, i: usize) -> f64 {
        let g = 1.0 + self.u_z[i] * self.u_z[i];
        -self.u_zz[i] / (g * g.sqrt())
    }

    pub fn kappa_rot(&self, i: usize) -> f64 {
        1.0 / ((self.r + self.u[i]) * (1.0 + self.u_z[i] * self.u_z[i]).sqrt())
    }

    /// `sup (|u|/r + |u_z| + r|u_zz|)`.
    pub fn smallness(&self) -> f64 {
        (0..self.z.len())
            .map(|i| self.u[i].abs() / self.r + self.u_z[i].abs() + self.r * self.u_zz[i].abs())
            .fold(0.0, f64::max)
    }

    /// `sup (r⁻³u² + r⁻¹u_z² + r u_zz²)`, the quadratic scale of the expansion errors.
    pub fn quadratic_scale(&self) -> f64 {
        let r = self.r;
        (0..self.z.len())
            .map(|i| self.u[i].powi(2) / r.powi(3) + self.u_z[i].powi(2) / r + r * self.u_zz[i].powi(2))
            .fold(0.0, f64::max)
    }

    fn check_small(&self) -> Result<()> {
        let s = self.smallness();
        if s > 0.1 {
            return Err(FlowError::InvalidParameter(format!(
                "graph is not small: sup(|u|/r + |u_z| + r|u_zz|) = {s}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpansionReport {
    pub sup_error: f64,
    /// Quadratic scale of `u` the error is divided by.
    pub scale: f64,
    pub constant: f64,
    pub z_argmax: f64,
}

impl ExpansionReport {
    fn new(scale: f64) -> Self {
        ExpansionReport {
            sup_error: 0.0,
            scale,
            constant: 0.0,
            z_argmax: f64::NAN,
        }
    }

    fn record(&mut self, z: f64, err: f64) {
        if err > self.sup_error || self.z_argmax.is_nan() {
            self.sup_error = self.sup_error.max(err);
            self.z_argmax = z;
        }
    }

    fn finish(mut self) -> Self {
        self.constant = if self.scale > 0.0 { self.sup_error / self.scale } else { 0.0 };
        self
    }
}

/// Errors of the second fundamental form against `A_Σ − ∇²_Σu + uA²_Σ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AExpansionReport {
    /// Covariant components in the `g_Σ`-orthonormal frame, where the
    /// correction is `+u A²_Σ`.
    pub tensor: ExpansionReport,
    /// Principal curvatures (mixed form), where it becomes `−u A²_Σ`.
    pub principal: ExpansionReport,
}

pub fn expansion_error_a(graph: &CylinderGraph) -> Result<AExpansionReport> {
    graph.check_small()?;
    let r = graph.r;
    let scale = graph.quadratic_scale();
    let mut tensor = ExpansionReport::new(scale);
    let mut principal = ExpansionReport::new(scale);
    for i in 0..graph.z.len() {
        let (u, uz, uzz) = (graph.u[i], graph.u_z[i], graph.u_zz[i]);
        let w = (1.0 + uz * uz).sqrt();
        let h_zz = -uzz / w;
        let h_rot = (r + u) / (r * r * w);
        let e = (h_zz + uzz).abs().max((h_rot - (1.0 / r + u / (r * r))).abs());
        tensor.record(graph.z[i], e);
        let e = (graph.kappa_axial(i) + uzz)
            .abs()
            .max((graph.kappa_rot(i) - (1.0 / r - u / (r * r))).abs());
        principal.record(graph.z[i], e);
    }
    Ok(AExpansionReport {
        tensor: tensor.finish(),
        principal: principal.finish(),
    })
}

/// Error of `G = γ(κ_axial, κ_rot, …)` against `G_Σ − γ̇¹u_zz − γ(0,1,…,1)u/r²`.
pub fn expansion_error_g(graph: &CylinderGraph, speed: &SpeedFunction) -> Result<ExpansionReport> {
    graph.check_small()?;
    let r = graph.r;
    let (a, f01) = (speed.a_lin(), speed.f01());
    let mut rep = ExpansionReport::new(graph.quadratic_scale());
    for i in 0..graph.z.len() {
        let g = speed.restriction(graph.kappa_axial(i), graph.kappa_rot(i))?;
        let lin = f01 / r - a * graph.u_zz[i] - f01 * graph.u[i] / (r * r);
        rep.record(graph.z[i], (g - lin).abs());
    }
    Ok(rep.finish())
}

/// Rotationally symmetric symmetric 2-tensor in the principal frame:
/// `axial` on `e_z`, `rot` on each rotation direction, `off` between `e_z`
/// and the first rotation direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrameTensor {
    pub axial: f64,
    pub rot: f64,
    pub off: f64,
}

impl FrameTensor {
    pub fn diagonal(axial: f64, rot: f64) -> Self {
        FrameTensor { axial, rot, off: 0.0 }
    }

    pub fn norm(&self, n: usize) -> f64 {
        (self.axial.powi(2) + (n - 1) as f64 * self.rot.powi(2) + 2.0 * self.off.powi(2)).sqrt()
    }

    fn matrix(&self, n: usize) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        m[(0, 0)] = self.axial;
        for j in 1..n {
            m[(j, j)] = self.rot;
        }
        if n > 1 {
            m[(0, 1)] = self.off;
            m[(1, 0)] = self.off;
        }
        m
    }
}

/// `d/dt γ(A + tS)` at `t = 0` for each node, from the gradient of `γ` at the
/// principal curvatures.
pub fn trace_gamma(graph: &CylinderGraph, speed: &SpeedFunction, s: &[FrameTensor]) -> Result<Vec<f64>> {
    if s.len() != graph.z.len() {
        return Err(FlowError::InvalidParameter(format!("{} tensors for {} nodes", s.len(), graph.z.len())));
    }
    let n = speed.n();
    let mut kappa = vec![0.0; n];
    (0..graph.z.len())
        .map(|i| {
            kappa[0] = graph.kappa_axial(i);
            kappa[1..].fill(graph.kappa_rot(i));
            let grad = speed.gradient_slice(&kappa)?;
            Ok(grad[0] * s[i].axial + grad[1..].iter().sum::<f64>() * s[i].rot)
        })
        .collect()
}

/// `γ̇^{ij}(A_Σ)S_ij = γ̇¹(0,1,…,1)S_axial + γ(0,1,…,1)S_rot`.
pub fn trace_gamma_cylinder(speed: &SpeedFunction, s: &FrameTensor) -> f64 {
    speed.a_lin() * s.axial + speed.f01() * s.rot
}

/// Oracle for `trace_gamma`: central difference of `γ` on the eigenvalues of
/// the full `n × n` matrix `A + tS`.
pub fn trace_gamma_matrix_fd(kappa_axial: f64, kappa_rot: f64, speed: &SpeedFunction, s: &FrameTensor, h: f64) -> Result<f64> {
    let n = speed.n();
    let a = FrameTensor::diagonal(kappa_axial, kappa_rot).matrix(n);
    let sm = s.matrix(n);
    let gamma_at = |t: f64| -> Result<f64> {
        let eig = SymmetricEigen::new(&a + &sm * t);
        speed.eval_slice(eig.eigenvalues.as_slice())
    };
    Ok((gamma_at(h)? - gamma_at(-h)?) / (2.0 * h))
}

/// Hessian on the graph of a function `f(z)` in the principal frame.
pub fn graph_hessian(graph: &CylinderGraph, i: usize, f_z: f64, f_zz: f64) -> FrameTensor {
    let (uz, uzz) = (graph.u_z[i], graph.u_zz[i]);
    let g = 1.0 + uz * uz;
    let rho = graph.r + graph.u[i];
    FrameTensor::diagonal((f_zz - uz * uzz * f_z / g) / g, uz * f_z / (rho * g))
}

/// `sup |trace_γ(∇²f) − γ̇^{ij}(A_Σ)(∇²f)_ij|` for `f = f(z)`, scaled by
/// `smallness(u)·sup|∇²f|` since the error is first order in `u`.
pub fn trace_expansion_error(graph: &CylinderGraph, speed: &SpeedFunction, f: impl Fn(f64) -> (f64, f64)) -> Result<ExpansionReport> {
    graph.check_small()?;
    let n = speed.n();
    let s: Vec<FrameTensor> = (0..graph.z.len())
        .map(|i| {
            let (fz, fzz) = f(graph.z[i]);
            graph_hessian(graph, i, fz, fzz)
        })
        .collect();
    let t = trace_gamma(graph, speed, &s)?;
    let s_max = s.iter().map(|x| x.norm(n)).fold(0.0, f64::max);
    let mut rep = ExpansionReport::new(graph.smallness() * s_max);
    for i in 0..s.len() {
        rep.record(graph.z[i], (t[i] - trace_gamma_cylinder(speed, &s[i])).abs());
    }
    Ok(rep.finish())
}

/// One row of a halving sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRow {
    pub u_scale: f64,
    pub sup_error: f64,
    pub constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScaleSweep {
    pub rows: Vec<ScaleRow>,
    /// `max |C_{j+1}/C_j − 1|` over consecutive halvings.
    pub max_relative_change: f64,
    /// Error ratios between consecutive halvings (≈ 4 for quadratic errors).
    pub error_ratios: Vec<f64>,
}

impl ScaleSweep {
    pub fn is_stable(&self, tol: f64) -> bool {
        self.max_relative_change < tol
    }
}

/// Evaluates `report` on `s·u` for `s = 1, ½, …, 2^{−halvings}`.
pub fn scale_sweep(graph: &CylinderGraph, halvings: usize, report: impl Fn(&CylinderGraph) -> Result<ExpansionReport>) -> Result<ScaleSweep> {
    let mut rows = Vec::with_capacity(halvings + 1);
    for j in 0..=halvings {
        let s = 0.5f64.powi(j as i32);
        let rep = report(&graph.scaled(s))?;
        rows.push(ScaleRow {
            u_scale: s,
            sup_error: rep.sup_error,
            constant: rep.constant,
        });
    }
    let max_relative_change = rows
        .windows(2)
        .map(|w| (w[1].constant / w[0].constant - 1.0).abs())
        .fold(0.0, f64::max);
    let error_ratios = rows.windows(2).map(|w| w[0].sup_error / w[1].sup_error).collect();
    Ok(ScaleSweep {
        rows,
        max_relative_change,
        error_ratios,
    })
}

/// Largest discrepancy between the graph curvatures of the bowl written over
/// the tangent cylinder at each height and the profile-side formulas
/// `ζ_ρρ/(1+ζ_ρ²)^{3/2}`, `ζ_ρ/(ρ√(1+ζ_ρ²))`.
pub fn bowl_curvature_self_check(bowl: &BowlProfile, heights: &[f64]) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for &h in heights {
        let (_, hi) = bowl.height_range();
        let rho = bowl.radius_at_height(h).ok_or(FlowError::OutOfRange { lo: 0.0, hi, node: h })?;
        let p = bowl.slope_at(rho).ok_or(FlowError::OutOfRange { lo: 0.0, hi, node: h })?;
        let pp = bowl.curvature_at(rho).ok_or(FlowError::OutOfRange { lo: 0.0, hi, node: h })?;
        let graph = CylinderGraph {
            r: rho,
            z: vec![h],
            u: vec![0.0],
            u_z: vec![1.0 / p],
            u_zz: vec![-pp / (p * p * p)],
        };
        let w = (1.0 + p * p).sqrt();
        let ax = pp / (w * w * w);
        let rot = p / (rho * w);
        worst = worst
            .max((graph.kappa_axial(0) - ax).abs() / (1.0 + ax.abs()))
            .max((graph.kappa_rot(0) - rot).abs() / (1.0 + rot.abs()));
    }
    Ok(worst)
}
