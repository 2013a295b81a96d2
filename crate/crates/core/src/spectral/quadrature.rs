//! Gauss–Hermite quadrature for the weight `e^{−x²}` and orthonormal
//! Hermite functions.

use std::f64::consts::PI;

use crate::error::{FlowError, Result};

/// Orthonormal Hermite polynomials `p_0..=p_k` at `x`:
/// `∫ p_j p_k e^{−x²} dx = δ_jk`.
pub fn orthonormal_hermite(k: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(k + 1);
    p.push(PI.powf(-0.25));
    if k >= 1 {
        p.push(x * 2f64.sqrt() * p[0]);
    }
    for j in 1..k {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * p[j] - (jf / (jf + 1.0)).sqrt() * p[j - 1];
        p.push(next);
    }
    p
}

/// Physicists' Hermite polynomial `H_k(x)`.
pub fn hermite_h(k: usize, x: f64) -> f64 {
    let (mut h0, mut h1) = (1.0, 2.0 * x);
    if k == 0 {
        return h0;
    }
    for j in 1..k {
        let h2 = 2.0 * x * h1 - 2.0 * j as f64 * h0;
        h0 = h1;
        h1 = h2;
    }
    h1
}

/// Nodes (ascending) and weights of the `n`-point rule for `∫ g(x) e^{−x²} dx`.
pub fn gauss_hermite(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    if n == 0 || n > 400 {
        return Err(FlowError::QuadratureFailure(format!("unsupported order {n}")));
    }
    let nf = n as f64;
    let m = n.div_ceil(2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut z = 0.0;
    for i in 0..m {
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * x[0],
            3 => 1.91 * z - 0.91 * x[1],
            _ => 2.0 * z - x[i - 2],
        };
        let mut pp = 0.0;
        let mut converged = false;
        for _ in 0..100 {
            let p = orthonormal_hermite(n, z);
            pp = (2.0 * nf).sqrt() * p[n - 1];
            let z1 = z;
            z = z1 - p[n] / pp;
            if (z - z1).abs() <= 3e-15 * z.abs().max(1.0) {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(FlowError::QuadratureFailure(format!("node {i} of order {n} did not converge")));
        }
        x[i] = z;
        x[n - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[n - 1 - i] = w[i];
    }
    if n % 2 == 1 {
        x[m - 1] = 0.0;
    }
    x.reverse();
    w.reverse();
    Ok((x, w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn moments_are_exact() {
        let (x, w) = gauss_hermite(20).unwrap();
        // ∫ x^{2m} e^{−x²} = Γ(m + 1/2)
        let mut gamma_half = PI.sqrt();
        for m in 0..20 {
            let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * m)).sum();
            assert_relative_eq!(q, gamma_half, max_relative = 1e-12);
            let odd: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(2 * m + 1)).sum();
            assert!(odd.abs() < 1e-10 * gamma_half);
            gamma_half *= m as f64 + 0.5;
        }
        assert!(x.windows(2).all(|p| p[1] > p[0]));
    }

    #[test]
    fn three_point_rule() {
        let (x, w) = gauss_hermite(3).unwrap();
        assert_relative_eq!(x[2], 1.5f64.sqrt(), epsilon = 1e-14);
        assert_relative_eq!(x[1], 0.0, epsilon = 1e-15);
        assert_relative_eq!(w[1], 2.0 * PI.sqrt() / 3.0, epsilon = 1e-14);
    }

    #[test]
    fn physicists_polynomials() {
        assert_eq!(hermite_h(2, 1.5), 4.0 * 2.25 - 2.0);
        assert_eq!(hermite_h(3, 2.0), 8.0 * 8.0 - 24.0);
        // H_k = 2^{k/2} √(k!) π^{1/4} p_k
        let p = orthonormal_hermite(5, 0.7);
        assert_relative_eq!(hermite_h(5, 0.7), 2f64.powf(2.5) * 120f64.sqrt() * PI.powf(0.25) * p[5], max_relative = 1e-13);
    }
}
