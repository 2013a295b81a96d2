//! Eigenvalues `μ_{k,l} = 1 − k/2 − l(l+n−2)/(2(n−1))` of the linearized
//! rescaled operator and their sign classes.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeClass {
    Positive,
    Zero,
    Negative,
}

pub fn eigenvalue(k: usize, l: usize, n: usize) -> f64 {
    let (k, l, n) = (k as f64, l as f64, n as f64);
    1.0 - 0.5 * k - l * (l + n - 2.0) / (2.0 * (n - 1.0))
}

/// Sign class from the integer `2(n−1)μ`.
pub fn classify_mode(k: usize, l: usize, n: usize) -> ModeClass {
    let (k, l, n) = (k as i64, l as i64, n as i64);
    let scaled = 2 * (n - 1) - k * (n - 1) - l * (l + n - 2);
    match scaled.signum() {
        1 => ModeClass::Positive,
        0 => ModeClass::Zero,
        _ => ModeClass::Negative,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenRow {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub mu: f64,
    pub class: ModeClass,
}

pub fn eigen_table(k_max: usize, l_max: usize, n: usize) -> Vec<EigenRow> {
    let mut rows = Vec::new();
    for k in 0..=k_max {
        for l in 0..=l_max {
            rows.push(EigenRow {
                n,
                k,
                l,
                mu: eigenvalue(k, l, n),
                class: classify_mode(k, l, n),
            });
        }
    }
    rows
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sign_sets_for_all_dimensions() {
        for n in 2..=6 {
            for row in eigen_table(6, 6, n) {
                let expect = match (row.k, row.l) {
                    (0, 0) | (1, 0) | (0, 1) => ModeClass::Positive,
                    (2, 0) | (1, 1) => ModeClass::Zero,
                    _ => ModeClass::Negative,
                };
                assert_eq!(row.class, expect, "n={n} k={} l={}", row.k, row.l);
                let sign = if row.mu > 1e-12 {
                    ModeClass::Positive
                } else if row.mu < -1e-12 {
                    ModeClass::Negative
                } else {
                    ModeClass::Zero
                };
                assert_eq!(sign, row.class);
            }
        }
    }

    #[test]
    fn sample_values() {
        assert_eq!(eigenvalue(0, 0, 3), 1.0);
        assert_eq!(eigenvalue(3, 0, 3), -0.5);
        assert_eq!(eigenvalue(0, 1, 3), 0.5);
    }
}
