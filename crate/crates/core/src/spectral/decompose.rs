//! Projection of a profile onto the Hermite modes and the
//! positive/zero/negative split (`l = 0`).

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};
use crate::flow::Grid;
use crate::interp::lagrange_cubic_uniform;

use super::basis::HermiteBasis;
use super::eigen::{classify_mode, eigenvalue, ModeClass};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralDecomposition {
    pub a: f64,
    pub n: usize,
    /// `c_k = ⟨u, ĥ_k⟩`.
    pub coefficients: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub classes: Vec<ModeClass>,
    pub plus_norm2: f64,
    pub zero_norm2: f64,
    pub minus_norm2: f64,
    /// `‖u‖²` by the same quadrature.
    pub total_norm2: f64,
    /// Share of `‖u‖²` not carried by the retained modes.
    pub tail_fraction: f64,
    pub truncation_warning: bool,
}

impl SpectralDecomposition {
    fn from_nodes(basis: &HermiteBasis, u: &[f64], n: usize) -> Result<Self> {
        if n < 2 {
            return Err(FlowError::InvalidParameter(format!("dimension n = {n} must be at least 2")));
        }
        let coefficients: Vec<f64> = basis.values.iter().map(|h| basis.inner_nodes(u, h)).collect();
        let eigenvalues: Vec<f64> = (0..coefficients.len()).map(|k| eigenvalue(k, 0, n)).collect();
        let classes: Vec<ModeClass> = (0..coefficients.len()).map(|k| classify_mode(k, 0, n)).collect();
        let mut d = SpectralDecomposition {
            a: basis.a,
            n,
            coefficients,
            eigenvalues,
            classes,
            plus_norm2: 0.0,
            zero_norm2: 0.0,
            minus_norm2: 0.0,
            total_norm2: basis.inner_nodes(u, u),
            tail_fraction: 0.0,
            truncation_warning: false,
        };
        for (c, cl) in d.coefficients.iter().zip(&d.classes) {
            match cl {
                ModeClass::Positive => d.plus_norm2 += c * c,
                ModeClass::Zero => d.zero_norm2 += c * c,
                ModeClass::Negative => d.minus_norm2 += c * c,
            }
        }
        let kept = d.plus_norm2 + d.zero_norm2 + d.minus_norm2;
        d.tail_fraction = if d.total_norm2 > 0.0 {
            ((d.total_norm2 - kept) / d.total_norm2).max(0.0)
        } else {
            0.0
        };
        if d.tail_fraction > 0.01 {
            d.truncation_warning = true;
            warn!("spectral truncation: {:.2}% of the energy lies above degree {}", 100.0 * d.tail_fraction, basis.k_max);
        }
        Ok(d)
    }

    pub fn retained_norm2(&self) -> f64 {
        self.plus_norm2 + self.zero_norm2 + self.minus_norm2
    }

    /// `Σ c_k ĥ_k(z)` restricted to one class, or all modes for `None`.
    pub fn reconstruct(&self, basis: &HermiteBasis, class: Option<ModeClass>, z: f64) -> f64 {
        self.coefficients
            .iter()
            .zip(&self.classes)
            .enumerate()
            .filter(|(_, (_, cl))| class.is_none_or(|c| c == **cl))
            .map(|(k, (c, _))| c * basis.mode(k, z))
            .sum()
    }

    /// `‖u − (P₊ + P₀ + P₋)u‖` for the function the decomposition came from.
    pub fn residual_norm(&self, basis: &HermiteBasis, u: impl Fn(f64) -> f64) -> f64 {
        basis.inner(|z| u(z) - self.reconstruct(basis, None, z), |z| u(z) - self.reconstruct(basis, None, z)).max(0.0).sqrt()
    }
}

/// Decomposes a function given in closed form.
pub fn decompose(basis: &HermiteBasis, u: impl Fn(f64) -> f64, n: usize) -> Result<SpectralDecomposition> {
    let vals: Vec<f64> = basis.z.iter().map(|&z| u(z)).collect();
    SpectralDecomposition::from_nodes(basis, &vals, n)
}

/// Decomposes grid samples; quadrature nodes inside the grid are reached by
/// local cubic interpolation and the samples are extended by zero outside.
pub fn decompose_samples(basis: &HermiteBasis, grid: &Grid, values: &[f64], n: usize) -> Result<SpectralDecomposition> {
    if values.len() != grid.n {
        return Err(FlowError::InvalidParameter(format!(
            "{} samples for {} grid nodes",
            values.len(),
            grid.n
        )));
    }
    let (lo, hi) = (grid.x0, grid.x1());
    let vals = basis
        .z
        .iter()
        .map(|&z| {
            if z < lo || z > hi {
                Ok(0.0)
            } else {
                lagrange_cubic_uniform(grid.x0, grid.dx, values, z)
            }
        })
        .collect::<Result<Vec<f64>>>()?;
    SpectralDecomposition::from_nodes(basis, &vals, n)
}
