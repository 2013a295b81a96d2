//! Least-squares helpers shared by the tail fits and trend classifiers.

use nalgebra::{DMatrix, DVector};

use crate::error::{FlowError, Result};

/// Result of a (weighted) linear least-squares fit.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFit {
    pub coefficients: Vec<f64>,
    /// Largest absolute residual over the samples.
    pub max_residual: f64,
    pub rms_residual: f64,
}

/// Fits `y ≈ Σ_j c_j·basis_j(x)` by least squares with optional weights.
pub fn fit_basis<F>(x: &[f64], y: &[f64], weights: Option<&[f64]>, nbasis: usize, basis: F) -> Result<LinearFit>
where
    F: Fn(usize, f64) -> f64,
{
    if x.len() != y.len() || x.len() < nbasis || nbasis == 0 {
        return Err(FlowError::WindowTooNarrow(format!(
            "{} samples for {} coefficients",
            x.len(),
            nbasis
        )));
    }
    let w = |i: usize| weights.map(|w| w[i]).unwrap_or(1.0);
    let a = DMatrix::from_fn(x.len(), nbasis, |i, j| w(i) * basis(j, x[i]));
    let b = DVector::from_fn(x.len(), |i, _| w(i) * y[i]);
    let svd = a.svd(true, true);
    let c = svd
        .solve(&b, 1e-14)
        .map_err(|e| FlowError::WindowTooNarrow(e.to_string()))?;
    let coefficients: Vec<f64> = c.iter().copied().collect();
    let mut max_residual: f64 = 0.0;
    let mut ss = 0.0;
    for i in 0..x.len() {
        let pred: f64 = (0..nbasis).map(|j| coefficients[j] * basis(j, x[i])).sum();
        let r = y[i] - pred;
        max_residual = max_residual.max(r.abs());
        ss += r * r;
    }
    Ok(LinearFit {
        coefficients,
        max_residual,
        rms_residual: (ss / x.len() as f64).sqrt(),
    })
}

/// Slope and intercept of the least-squares line through `(x, y)`.
pub fn line(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    let f = fit_basis(x, y, None, 2, |j, t| if j == 0 { 1.0 } else { t })?;
    Ok((f.coefficients[1], f.coefficients[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn recovers_exact_polynomial() {
        let x: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = x.iter().map(|t| 1.5 - 2.0 * t + 0.25 * t * t).collect();
        let f = fit_basis(&x, &y, None, 3, |j, t| t.powi(j as i32)).unwrap();
        assert_relative_eq!(f.coefficients[0], 1.5, epsilon = 1e-12);
        assert_relative_eq!(f.coefficients[1], -2.0, epsilon = 1e-12);
        assert_relative_eq!(f.coefficients[2], 0.25, epsilon = 1e-12);
        assert!(f.max_residual < 1e-12);
    }

    #[test]
    fn line_fit() {
        let (s, b) = line(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]).unwrap();
        assert_relative_eq!(s, 2.0, epsilon = 1e-13);
        assert_relative_eq!(b, 1.0, epsilon = 1e-13);
        assert!(line(&[1.0], &[1.0]).is_err());
    }
}
