//! Small interpolation helpers: cubic Hermite segments, monotone inversion and
//! local cubic Lagrange interpolation on uniform grids.

use crate::error::{FlowError, Result};

/// Cubic Hermite interpolant on `[t0, t1]`; returns value and derivative at `t`.
pub fn hermite(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> (f64, f64) {
    let h = t1 - t0;
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let v = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = (6.0 * s2 - 6.0 * s) / h;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = (-6.0 * s2 + 6.0 * s) / h;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let d = dh00 * y0 + dh10 * d0 + dh01 * y1 + dh11 * d1;
    (v, d)
}

/// Piecewise cubic Hermite data on increasing nodes.
#[derive(Debug, Clone)]
pub struct HermiteTable {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub d: Vec<f64>,
}

impl HermiteTable {
    pub fn new(t: Vec<f64>, y: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        if t.len() < 2 || t.len() != y.len() || t.len() != d.len() {
            return Err(FlowError::InvalidParameter(
                "Hermite table needs >= 2 matching nodes".into(),
            ));
        }
        if t.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FlowError::InvalidParameter(
                "Hermite nodes must increase strictly".into(),
            ));
        }
        Ok(HermiteTable { t, y, d })
    }

    pub fn range(&self) -> (f64, f64) {
        (self.t[0], self.t[self.t.len() - 1])
    }

    /// Index `i` with `t[i] <= x <= t[i+1]`.
    pub fn segment(&self, x: f64) -> Option<usize> {
        let (lo, hi) = self.range();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = self.t.partition_point(|&v| v <= x);
        Some(i.saturating_sub(1).min(self.t.len() - 2))
    }

    /// Value and derivative at `x`; `None` outside the node range.
    pub fn eval(&self, x: f64) -> Option<(f64, f64)> {
        let i = self.segment(x)?;
        Some(hermite(
            self.t[i],
            self.t[i + 1],
            self.y[i],
            self.y[i + 1],
            self.d[i],
            self.d[i + 1],
            x,
        ))
    }

    /// Solves `y(x) = target` assuming `y` increases along the nodes.
    pub fn invert_increasing(&self, target: f64) -> Option<f64> {
        let n = self.y.len();
        if !(target >= self.y[0] && target <= self.y[n - 1]) {
            return None;
        }
        let j = self.y.partition_point(|&v| v <= target);
        let i = j.saturating_sub(1).min(n - 2);
        let (mut lo, mut hi) = (self.t[i], self.t[i + 1]);
        let seg = |x: f64| {
            hermite(
                self.t[i],
                self.t[i + 1],
                self.y[i],
                self.y[i + 1],
                self.d[i],
                self.d[i + 1],
                x,
            )
        };
        let (ylo, yhi) = (self.y[i], self.y[i + 1]);
        if target == ylo {
            return Some(lo);
        }
        if target == yhi {
            return Some(hi);
        }
        let mut x = lo + (hi - lo) * (target - ylo) / (yhi - ylo);
        for _ in 0..200 {
            let (v, dv) = seg(x);
            let r = v - target;
            if r == 0.0 {
                return Some(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - r / dv;
            if !(next > lo && next < hi) || !dv.is_finite() || dv <= 0.0 {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= 0.0 {
                return Some(next);
            }
            x = next;
        }
        Some(x)
    }
}

/// Local four-point Lagrange interpolation on a uniform grid `x0 + i·dx`.
pub fn lagrange_cubic_uniform(x0: f64, dx: f64, values: &[f64], x: f64) -> Result<f64> {
    let n = values.len();
    let hi_edge = x0 + dx * (n - 1) as f64;
    if n < 4 || !(x >= x0 - 1e-12 * dx && x <= hi_edge + 1e-12 * dx) {
        return Err(FlowError::OutOfRange {
            lo: x0,
            hi: hi_edge,
            node: x,
        });
    }
    let s = (x - x0) / dx;
    let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
    let mut acc = 0.0;
    for j in 0..4 {
        let mut w = 1.0;
        let xj = (base + j) as f64;
        for m in 0..4 {
            if m != j {
                let xm = (base + m) as f64;
                w *= (s - xm) / (xj - xm);
            }
        }
        acc += w * values[base + j];
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn hermite_reproduces_cubics() {
        let p = |x: f64| 2.0 * x * x * x - x + 0.5;
        let dp = |x: f64| 6.0 * x * x - 1.0;
        let (v, d) = hermite(0.3, 1.7, p(0.3), p(1.7), dp(0.3), dp(1.7), 1.1);
        assert_relative_eq!(v, p(1.1), epsilon = 1e-13);
        assert_relative_eq!(d, dp(1.1), epsilon = 1e-12);
    }

    #[test]
    fn table_inversion_round_trip() {
        let t: Vec<f64> = (0..50).map(|i| i as f64 * 0.1).collect();
        let y: Vec<f64> = t.iter().map(|x| x.sinh()).collect();
        let d: Vec<f64> = t.iter().map(|x| x.cosh()).collect();
        let tab = HermiteTable::new(t, y, d).unwrap();
        for k in 1..40 {
            let x = k as f64 * 0.117;
            let (v, _) = tab.eval(x).unwrap();
            let back = tab.invert_increasing(v).unwrap();
            assert!((back - x).abs() < 1e-12);
        }
        assert!(tab.eval(-0.1).is_none());
    }

    #[test]
    fn lagrange_exact_on_cubics() {
        let vals: Vec<f64> = (0..10).map(|i| {
            let x = -1.0 + 0.25 * i as f64;
            x * x * x - 2.0 * x
        }).collect();
        for &x in &[-1.0, -0.9, 0.33, 1.2, 1.25] {
            let v = lagrange_cubic_uniform(-1.0, 0.25, &vals, x).unwrap();
            assert_relative_eq!(v, x * x * x - 2.0 * x, epsilon = 1e-13);
        }
        assert!(lagrange_cubic_uniform(-1.0, 0.25, &vals, 1.4).is_err());
    }
}
