//! Hermite eigenbasis of `𝓛 = a∂²_z − (z/2)∂_z + 1` in the weighted space
//! `L²(e^{−z²/4a} dz)`, with Gauss–Hermite quadrature at `z = 2√a·x`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

use super::quadrature::{gauss_hermite, orthonormal_hermite};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteBasis {
    pub a: f64,
    pub k_max: usize,
    pub quad_order: usize,
    pub x: Vec<f64>,
    /// Weights for `e^{−x²}`.
    pub weights: Vec<f64>,
    pub z: Vec<f64>,
    /// `values[k][i] = ĥ_k(z_i)`, orthonormal modes.
    pub values: Vec<Vec<f64>>,
    /// `max |⟨ĥ_j, ĥ_k⟩ − δ_jk|`.
    pub orthogonality_error: f64,
    /// `max_k sup |(a∂² − z∂/2)ĥ_k + (k/2)ĥ_k| / sup |ĥ_k|` over the nodes.
    pub eigen_residual: f64,
}

/// Builds the basis up to degree `k_max` with a `quad_order`-point rule.
pub fn build_basis(a: f64, k_max: usize, quad_order: usize) -> Result<HermiteBasis> {
    if !(a > 0.0) {
        return Err(FlowError::InvalidParameter(format!("scale a = {a} must be positive")));
    }
    if quad_order < 2 * k_max + 2 {
        return Err(FlowError::InvalidParameter(format!(
            "quadrature order {quad_order} < 2K + 2 = {}",
            2 * k_max + 2
        )));
    }
    let (x, weights) = gauss_hermite(quad_order)?;
    let s = (2.0 * a.sqrt()).sqrt();
    let z: Vec<f64> = x.iter().map(|x| 2.0 * a.sqrt() * x).collect();
    let table: Vec<Vec<f64>> = x.iter().map(|&x| orthonormal_hermite(k_max, x)).collect();
    let values: Vec<Vec<f64>> = (0..=k_max).map(|k| table.iter().map(|p| p[k] / s).collect()).collect();
    let mut basis = HermiteBasis {
        a,
        k_max,
        quad_order,
        x,
        weights,
        z,
        values,
        orthogonality_error: 0.0,
        eigen_residual: 0.0,
    };
    let mut err: f64 = 0.0;
    for j in 0..=k_max {
        for k in 0..=j {
            let g = basis.inner_nodes(&basis.values[j], &basis.values[k]);
            let target = if j == k { 1.0 } else { 0.0 };
            err = err.max((g - target).abs());
        }
    }
    basis.orthogonality_error = err;
    if err > 1e-10 {
        return Err(FlowError::QuadratureFailure(format!(
            "orthogonality defect {err:e} exceeds 1e-10"
        )));
    }
    let mut res: f64 = 0.0;
    for k in 0..=k_max {
        let mut worst: f64 = 0.0;
        let mut scale: f64 = 0.0;
        for &z in &basis.z {
            let (h, hz, hzz) = basis.mode_derivatives(k, z);
            worst = worst.max((a * hzz - 0.5 * z * hz + 0.5 * k as f64 * h).abs());
            scale = scale.max(h.abs());
        }
        res = res.max(worst / scale);
    }
    basis.eigen_residual = res;
    Ok(basis)
}

impl HermiteBasis {
    fn scale(&self) -> f64 {
        (2.0 * self.a.sqrt()).sqrt()
    }

    /// Weighted inner product of two node vectors.
    pub fn inner_nodes(&self, f: &[f64], g: &[f64]) -> f64 {
        2.0 * self.a.sqrt() * self.weights.iter().zip(f).zip(g).map(|((w, f), g)| w * f * g).sum::<f64>()
    }

    pub fn inner(&self, f: impl Fn(f64) -> f64, g: impl Fn(f64) -> f64) -> f64 {
        let fv: Vec<f64> = self.z.iter().map(|&z| f(z)).collect();
        let gv: Vec<f64> = self.z.iter().map(|&z| g(z)).collect();
        self.inner_nodes(&fv, &gv)
    }

    /// `ĥ_k(z)`.
    pub fn mode(&self, k: usize, z: f64) -> f64 {
        orthonormal_hermite(k, z / (2.0 * self.a.sqrt()))[k] / self.scale()
    }

    /// `(ĥ_k, ĥ_k', ĥ_k'')` at `z`.
    pub fn mode_derivatives(&self, k: usize, z: f64) -> (f64, f64, f64) {
        let c = 2.0 * self.a.sqrt();
        let p = orthonormal_hermite(k, z / c);
        let s = self.scale();
        let kf = k as f64;
        let d1 = if k >= 1 { (2.0 * kf).sqrt() * p[k - 1] } else { 0.0 };
        let d2 = if k >= 2 { (2.0 * kf * 2.0 * (kf - 1.0)).sqrt() * p[k - 2] } else { 0.0 };
        (p[k] / s, d1 / (c * s), d2 / (c * c * s))
    }

    /// `‖H_k(z/2√a)‖` for the physicists' polynomial.
    pub fn hermite_norm(&self, k: usize) -> f64 {
        let fact: f64 = (1..=k).map(|j| j as f64).product();
        (2.0 * self.a.sqrt() * PI.sqrt() * 2f64.powi(k as i32) * fact).sqrt()
    }

    /// `⟨ĥ_j, 𝓛ĥ_k⟩` for `j, k ≤ K` (`l = 0`).
    pub fn operator_matrix(&self) -> Vec<Vec<f64>> {
        let a = self.a;
        let lk: Vec<Vec<f64>> = (0..=self.k_max)
            .map(|k| {
                self.z
                    .iter()
                    .map(|&z| {
                        let (h, hz, hzz) = self.mode_derivatives(k, z);
                        a * hzz - 0.5 * z * hz + h
                    })
                    .collect()
            })
            .collect();
        (0..=self.k_max)
            .map(|j| (0..=self.k_max).map(|k| self.inner_nodes(&self.values[j], &lk[k])).collect())
            .collect()
    }

    /// `max_{j≠k} |L_jk| / max(|L_kk|, 1)`.
    pub fn operator_leakage(&self) -> f64 {
        let m = self.operator_matrix();
        let mut worst: f64 = 0.0;
        for k in 0..m.len() {
            let d = m[k][k].abs().max(1.0);
            for (j, row) in m.iter().enumerate() {
                if j != k {
                    worst = worst.max(row[k].abs() / d);
                }
            }
        }
        worst
    }
}

/// Second-order finite-difference `𝓛u = a u_zz − z u_z/2 + u` at the interior nodes
/// of a uniform grid; returns `(z_i, (𝓛u)_i)`.
pub fn fd_operator(a: f64, z0: f64, dz: f64, u: &[f64]) -> Vec<(f64, f64)> {
    (1..u.len().saturating_sub(1))
        .map(|i| {
            let z = z0 + i as f64 * dz;
            let uz = (u[i + 1] - u[i - 1]) / (2.0 * dz);
            let uzz = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (dz * dz);
            (z, a * uzz - 0.5 * z * uz + u[i])
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gaussian_mass_and_orthogonality() {
        for &a in &[1.0, 0.32, 2.5] {
            let b = build_basis(a, 12, 40).unwrap();
            assert_relative_eq!(b.inner(|_| 1.0, |_| 1.0), 2.0 * (PI * a).sqrt(), max_relative = 1e-13);
            assert!(b.orthogonality_error < 1e-12);
            assert!(b.eigen_residual < 1e-10, "{}", b.eigen_residual);
            assert!(b.inner_nodes(&b.values[1], &b.values[2]).abs() < 1e-14);
        }
    }

    #[test]
    fn zero_mode_is_h2() {
        // (a∂² − z∂/2)(z²/a − 2) = 2 − z²/a
        let a = 0.7;
        let b = build_basis(a, 4, 20).unwrap();
        for &z in &[-2.0, 0.3, 1.9] {
            let u = z * z / a - 2.0;
            let x = z / (2.0 * a.sqrt());
            assert_relative_eq!(u, 4.0 * x * x - 2.0, epsilon = 1e-13);
            let (h, _, _) = b.mode_derivatives(2, z);
            assert_relative_eq!(u / b.hermite_norm(2), h, epsilon = 1e-13);
        }
        let g = b.inner(|z| z * z / a - 2.0, |z| z * z / a - 2.0);
        assert_relative_eq!(g.sqrt(), b.hermite_norm(2), max_relative = 1e-13);
    }

    #[test]
    fn fd_operator_exact_on_quadratics() {
        let a = 1.0;
        let u: Vec<f64> = (0..=240).map(|i| {
            let z = -6.0 + i as f64 * 0.05;
            z * z / a - 2.0
        }).collect();
        for (_, lu) in fd_operator(a, -6.0, 0.05, &u) {
            assert!(lu.abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_low_order() {
        assert!(build_basis(1.0, 10, 20).is_err());
    }
}
