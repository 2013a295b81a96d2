//! The heat-equation barrier on the half line.

use libm::erf;

use crate::error::{FlowError, Result};

/// `ψ(z,t) = (4πt)^{−1/2} ∫₀^∞ (e^{−(z−y)²/4t} − e^{−(z+y)²/4t}) dy = erf(z/(2√t))`.
pub fn heat_barrier_psi(z: f64, t: f64) -> Result<f64> {
    check(z, t)?;
    Ok(erf(z / (2.0 * t.sqrt())))
}

/// `(ψ_z, ψ_zz)`; `ψ_t = ψ_zz`.
pub fn heat_barrier_derivatives(z: f64, t: f64) -> Result<(f64, f64)> {
    check(z, t)?;
    let pz = (-z * z / (4.0 * t)).exp() / (std::f64::consts::PI * t).sqrt();
    Ok((pz, -z / (2.0 * t) * pz))
}

/// One probe of a limit of `ψ`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LimitProbe {
    pub label: &'static str,
    pub z: f64,
    pub t: f64,
    pub value: f64,
    pub limit: f64,
}

impl LimitProbe {
    pub fn error(&self) -> f64 {
        (self.value - self.limit).abs()
    }
}

/// `ψ` at the preset points approaching `z → 0`, `z → ∞`, `t → 0` and `t → ∞`.
pub fn heat_barrier_limit_probes() -> Result<Vec<LimitProbe>> {
    let pts = [
        ("z->0", 1e-7, 1.0, 0.0),
        ("z->inf", 20.0, 1.0, 1.0),
        ("t->0", 1.0, 1e-3, 1.0),
        ("t->inf", 1.0, 1e13, 0.0),
    ];
    pts.iter()
        .map(|&(label, z, t, limit)| {
            Ok(LimitProbe {
                label,
                z,
                t,
                value: heat_barrier_psi(z, t)?,
                limit,
            })
        })
        .collect()
}

// adaptive Simpson on the defining integral, truncated where both kernels vanish
fn simpson(f: &dyn Fn(f64) -> f64, a: f64, b: f64, eps: f64, whole: f64, depth: u32) -> f64 {
    let c = 0.5 * (a + b);
    let (l, r) = (
        (c - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + c)) + f(c)),
        (b - c) / 6.0 * (f(c) + 4.0 * f(0.5 * (c + b)) + f(b)),
    );
    if depth == 0 || (l + r - whole).abs() <= 15.0 * eps {
        return l + r + (l + r - whole) / 15.0;
    }
    simpson(f, a, c, eps / 2.0, l, depth - 1) + simpson(f, c, b, eps / 2.0, r, depth - 1)
}

/// `ψ(z, t)` by adaptive Simpson quadrature of the defining integral, an
/// oracle independent of the closed form.
pub fn heat_barrier_quadrature(z: f64, t: f64) -> Result<f64> {
    check(z, t)?;
    let k = |y: f64| {
        ((-(z - y) * (z - y) / (4.0 * t)).exp() - (-(z + y) * (z + y) / (4.0 * t)).exp())
            / (4.0 * std::f64::consts::PI * t).sqrt()
    };
    let hi = z + 40.0 * t.sqrt();
    let whole = hi / 6.0 * (k(0.0) + 4.0 * k(0.5 * hi) + k(hi));
    Ok(simpson(&k, 0.0, hi, 1e-14, whole, 50))
}

fn check(z: f64, t: f64) -> Result<()> {
    if !(z > 0.0 && t > 0.0) {
        return Err(FlowError::DomainViolation {
            y: z,
            z: t,
            lower: 0.0,
            upper: f64::INFINITY,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_quadrature() {
        assert!((heat_barrier_psi(2.0, 1.0).unwrap() - 0.8427007929497149).abs() < 1e-15);
        for &(z, t) in &[(2.0, 1.0), (0.3, 2.0), (5.0, 0.7)] {
            assert!((heat_barrier_psi(z, t).unwrap() - heat_barrier_quadrature(z, t).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn solves_heat_equation_and_is_concave() {
        let p = |z: f64, t: f64| heat_barrier_psi(z, t).unwrap();
        for i in 0..10 {
            for j in 0..10 {
                let z = 0.1 + i as f64 * 1.1;
                let t = 0.1 + j as f64 * 1.1;
                // fourth-order stencils
                let h = 0.01 * z.min(t.sqrt());
                let pt = (-p(z, t + 2.0 * h) + 8.0 * p(z, t + h) - 8.0 * p(z, t - h) + p(z, t - 2.0 * h)) / (12.0 * h);
                let pzz = (-p(z + 2.0 * h, t) + 16.0 * p(z + h, t) - 30.0 * p(z, t) + 16.0 * p(z - h, t) - p(z - 2.0 * h, t))
                    / (12.0 * h * h);
                assert!((pt - pzz).abs() < 1e-6, "z={z} t={t}");
                assert!(heat_barrier_derivatives(z, t).unwrap().1 < 0.0);
            }
        }
    }

    #[test]
    fn limits_at_probes() {
        for p in heat_barrier_limit_probes().unwrap() {
            assert!(p.error() < 1e-6, "{p:?}");
        }
    }

    #[test]
    fn rejects_boundary() {
        assert!(heat_barrier_psi(0.0, 1.0).is_err());
        assert!(heat_barrier_psi(1.0, -1.0).is_err());
    }
}
