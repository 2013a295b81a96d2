//! Curvature speeds and the scalar algebra built on top of them.
//!
//! A speed is a symmetric, 1-homogeneous, monotone function γ on an open cone
//! Γ ⊂ ℝⁿ. Everything downstream only ever sees γ through the restriction
//! `F(x, y) = γ(x, y, …, y)` and its partial inverse `f` solving
//! `F(f(y, z), y) = z`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{FlowError, Result};

/// Growth factor used by the `Q` extrapolation to decide divergence.
pub const DEFAULT_Q_GROWTH: f64 = 1e6;

/// Built-in speed families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedKind {
    /// Mean curvature `λ₁ + … + λₙ`.
    Sum,
    /// Harmonic pair sum `(Σ_{i<j} 1/(λᵢ+λⱼ))⁻¹`.
    BrendleHuisken,
    /// Quotient of elementary symmetric polynomials `σ_k / σ_{k−1}`.
    SigmaRatio(usize),
}

impl fmt::Display for SpeedKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpeedKind::Sum => write!(f, "sum"),
            SpeedKind::BrendleHuisken => write!(f, "bh"),
            SpeedKind::SigmaRatio(k) => write!(f, "sigma_ratio{k}"),
        }
    }
}

/// Kind name as it appears in configuration files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpeedKindName {
    Sum,
    #[serde(alias = "brendle_huisken")]
    Bh,
    SigmaRatio,
}

impl FromStr for SpeedKindName {
    type Err = FlowError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "sum" | "mean" => Ok(SpeedKindName::Sum),
            "bh" | "brendle_huisken" | "brendle-huisken" => Ok(SpeedKindName::Bh),
            "sigma_ratio" | "sigma-ratio" | "sigma" => Ok(SpeedKindName::SigmaRatio),
            other => Err(FlowError::InvalidParameter(format!(
                "unknown speed kind '{other}'"
            ))),
        }
    }
}

/// Serializable speed selection: `kind`, `n` and (for `sigma_ratio`) `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpeedSpec {
    pub kind: SpeedKindName,
    pub n: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
}

impl SpeedSpec {
    pub fn sum(n: usize) -> Self {
        SpeedSpec {
            kind: SpeedKindName::Sum,
            n,
            k: None,
        }
    }

    pub fn kind(&self) -> Result<SpeedKind> {
        match self.kind {
            SpeedKindName::Sum => Ok(SpeedKind::Sum),
            SpeedKindName::Bh => Ok(SpeedKind::BrendleHuisken),
            SpeedKindName::SigmaRatio => match self.k {
                Some(k) => Ok(SpeedKind::SigmaRatio(k)),
                None => Err(FlowError::InvalidParameter(
                    "sigma_ratio needs k".to_string(),
                )),
            },
        }
    }

    pub fn build(&self) -> Result<SpeedFunction> {
        SpeedFunction::new(self.kind()?, self.n)
    }
}

impl From<&SpeedFunction> for SpeedSpec {
    fn from(s: &SpeedFunction) -> Self {
        match s.kind {
            SpeedKind::Sum => SpeedSpec::sum(s.n),
            SpeedKind::BrendleHuisken => SpeedSpec {
                kind: SpeedKindName::Bh,
                n: s.n,
                k: None,
            },
            SpeedKind::SigmaRatio(k) => SpeedSpec {
                kind: SpeedKindName::SigmaRatio,
                n: s.n,
                k: Some(k),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Concavity {
    Convex,
    Concave,
}

/// Principal curvatures, kept in ascending order.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureVector(Vec<f64>);

impl CurvatureVector {
    pub fn new(mut entries: Vec<f64>) -> Result<Self> {
        if entries.len() < 2 {
            return Err(FlowError::InvalidParameter(
                "curvature vector needs n >= 2".into(),
            ));
        }
        if entries.iter().any(|v| !v.is_finite()) {
            return Err(FlowError::ConeViolation(entries));
        }
        entries.sort_by(|a, b| a.total_cmp(b));
        Ok(CurvatureVector(entries))
    }

    /// `(x, y, …, y)` with `n − 1` copies of `y`.
    pub fn restricted(x: f64, y: f64, n: usize) -> Result<Self> {
        let mut v = vec![y; n];
        v[0] = x;
        CurvatureVector::new(v)
    }

    pub fn entries(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }
}

/// Binomial coefficient as a float; zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: usize, k: isize) -> f64 {
    if k < 0 || k as usize > n {
        return 0.0;
    }
    let k = k as usize;
    let k = k.min(n - k);
    let mut c = 1.0;
    for i in 0..k {
        c = c * (n - i) as f64 / (i + 1) as f64;
    }
    c.round()
}

/// A speed function together with its cached constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedFunction {
    kind: SpeedKind,
    n: usize,
    f01: f64,
    f11: f64,
    a_lin: f64,
    q: f64,
    q_growth: f64,
}

impl SpeedFunction {
    pub fn new(kind: SpeedKind, n: usize) -> Result<Self> {
        SpeedFunction::with_q_growth(kind, n, DEFAULT_Q_GROWTH)
    }

    pub fn sum(n: usize) -> Result<Self> {
        SpeedFunction::new(SpeedKind::Sum, n)
    }

    pub fn brendle_huisken(n: usize) -> Result<Self> {
        SpeedFunction::new(SpeedKind::BrendleHuisken, n)
    }

    pub fn sigma_ratio(n: usize, k: usize) -> Result<Self> {
        SpeedFunction::new(SpeedKind::SigmaRatio(k), n)
    }

    /// Builds a speed with a custom divergence threshold for the `Q` limit.
    pub fn with_q_growth(kind: SpeedKind, n: usize, q_growth: f64) -> Result<Self> {
        if n < 2 {
            return Err(FlowError::InvalidParameter(format!(
                "dimension n = {n} must be at least 2"
            )));
        }
        match kind {
            SpeedKind::Sum => {}
            SpeedKind::BrendleHuisken => {
                if n < 3 {
                    return Err(FlowError::InvalidParameter(
                        "brendle_huisken needs n >= 3 (n = 2 has a single pair)"
                            .into(),
                    ));
                }
            }
            SpeedKind::SigmaRatio(k) => {
                if k < 1 || k > n - 1 {
                    return Err(FlowError::InvalidParameter(format!(
                        "sigma_ratio needs 1 <= k <= n-1, got k = {k}, n = {n}"
                    )));
                }
            }
        }
        if !(q_growth > 1.0) {
            return Err(FlowError::InvalidParameter(
                "Q growth factor must exceed 1".into(),
            ));
        }
        let mut s = SpeedFunction {
            kind,
            n,
            f01: 0.0,
            f11: 0.0,
            a_lin: 0.0,
            q: 0.0,
            q_growth,
        };
        let (f01, fx0, _) = s.restricted_raw(0.0, 1.0).ok_or_else(|| {
            FlowError::InvalidParameter("(0,1,...,1) is not in the cone".into())
        })?;
        s.f01 = f01;
        s.a_lin = fx0;
        s.f11 = s.restricted_raw(1.0, 1.0).map(|v| v.0).unwrap_or(f64::NAN);
        s.q = s.extrapolate_q();
        Ok(s)
    }

    pub fn kind(&self) -> SpeedKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `F(0,1) = γ(0,1,…,1)`.
    pub fn f01(&self) -> f64 {
        self.f01
    }

    /// `F(1,1) = γ(1,…,1)`.
    pub fn f11(&self) -> f64 {
        self.f11
    }

    /// `γ̇¹(0,1,…,1)`, the diffusion coefficient of the linearized flow at the cylinder.
    pub fn a_lin(&self) -> f64 {
        self.a_lin
    }

    /// `lim_{x→∞} F(x,1)`, possibly infinite.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn concavity(&self) -> Concavity {
        // all built-in families are concave; the sum is linear
        Concavity::Concave
    }

    pub fn is_linear(&self) -> bool {
        matches!(self.kind, SpeedKind::Sum) || self.kind == SpeedKind::SigmaRatio(1)
    }

    /// Radius of the cylinder fixed point of the rescaled flow, `√(2F(0,1))`.
    pub fn cylinder_radius(&self) -> f64 {
        (2.0 * self.f01).sqrt()
    }

    /// Infimum of `x/y` over the restricted cone `{(x, y, …, y) ∈ Γ, y > 0}`.
    pub fn restricted_cone_edge(&self) -> f64 {
        match self.kind {
            SpeedKind::Sum | SpeedKind::BrendleHuisken => -1.0,
            SpeedKind::SigmaRatio(k) => -((self.n - k) as f64) / k as f64,
        }
    }

    fn extrapolate_q(&self) -> f64 {
        let vals: Vec<f64> = (0..=12)
            .map(|j| {
                self.restricted_raw(10f64.powi(j), 1.0)
                    .map(|v| v.0)
                    .unwrap_or(f64::NAN)
            })
            .collect();
        let last = vals[12];
        if !last.is_finite() || last > self.q_growth * vals[0] {
            return f64::INFINITY;
        }
        // F(x,1) = Q − c/x + O(x⁻²); one Richardson step on the last decade
        last + (last - vals[11]) / 9.0
    }

    /// Cone membership of a curvature vector in any order.
    pub fn contains_slice(&self, lambda: &[f64]) -> bool {
        if lambda.len() != self.n || lambda.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match self.kind {
            SpeedKind::Sum | SpeedKind::BrendleHuisken => {
                let (a, b) = two_smallest(lambda);
                a + b > 0.0
            }
            SpeedKind::SigmaRatio(k) => {
                let e = elementary(lambda, k);
                e[1..=k].iter().all(|&v| v > 0.0)
            }
        }
    }

    pub fn contains(&self, lambda: &CurvatureVector) -> bool {
        self.contains_slice(lambda.entries())
    }

    /// `γ(λ)` for entries in any order.
    pub fn eval_slice(&self, lambda: &[f64]) -> Result<f64> {
        if !self.contains_slice(lambda) {
            return Err(FlowError::ConeViolation(lambda.to_vec()));
        }
        Ok(match self.kind {
            SpeedKind::Sum => lambda.iter().sum(),
            SpeedKind::BrendleHuisken => {
                let mut s = 0.0;
                for i in 0..lambda.len() {
                    for j in (i + 1)..lambda.len() {
                        s += 1.0 / (lambda[i] + lambda[j]);
                    }
                }
                1.0 / s
            }
            SpeedKind::SigmaRatio(k) => {
                let e = elementary(lambda, k);
                e[k] / e[k - 1]
            }
        })
    }

    pub fn eval(&self, lambda: &CurvatureVector) -> Result<f64> {
        self.eval_slice(lambda.entries())
    }

    /// `(γ̇¹, …, γ̇ⁿ)` in the order of the input entries.
    pub fn gradient_slice(&self, lambda: &[f64]) -> Result<Vec<f64>> {
        if !self.contains_slice(lambda) {
            return Err(FlowError::ConeViolation(lambda.to_vec()));
        }
        let n = lambda.len();
        Ok(match self.kind {
            SpeedKind::Sum => vec![1.0; n],
            SpeedKind::BrendleHuisken => {
                let g = self.eval_slice(lambda)?;
                (0..n)
                    .map(|i| {
                        let t: f64 = (0..n)
                            .filter(|&j| j != i)
                            .map(|j| (lambda[i] + lambda[j]).powi(-2))
                            .sum();
                        g * g * t
                    })
                    .collect()
            }
            SpeedKind::SigmaRatio(k) => {
                let e = elementary(lambda, k);
                let r = e[k - 1];
                (0..n)
                    .map(|i| {
                        let d = elementary_without(lambda, k, &[i]);
                        let pk = d[k - 1];
                        let rk = if k >= 2 { d[k - 2] } else { 0.0 };
                        (pk * r - e[k] * rk) / (r * r)
                    })
                    .collect()
            }
        })
    }

    pub fn gradient(&self, lambda: &CurvatureVector) -> Result<Vec<f64>> {
        self.gradient_slice(lambda.entries())
    }

    /// Second derivatives `γ̈^{ij}` in the order of the input entries.
    pub fn hessian_slice(&self, lambda: &[f64]) -> Result<Vec<Vec<f64>>> {
        if !self.contains_slice(lambda) {
            return Err(FlowError::ConeViolation(lambda.to_vec()));
        }
        let n = lambda.len();
        let mut h = vec![vec![0.0; n]; n];
        match self.kind {
            SpeedKind::Sum => {}
            SpeedKind::BrendleHuisken => {
                let mut s = 0.0;
                for i in 0..n {
                    for j in (i + 1)..n {
                        s += 1.0 / (lambda[i] + lambda[j]);
                    }
                }
                let t: Vec<f64> = (0..n)
                    .map(|i| {
                        (0..n)
                            .filter(|&j| j != i)
                            .map(|j| (lambda[i] + lambda[j]).powi(-2))
                            .sum()
                    })
                    .collect();
                for i in 0..n {
                    for l in 0..n {
                        let dt = if i == l {
                            -2.0 * (0..n)
                                .filter(|&j| j != i)
                                .map(|j| (lambda[i] + lambda[j]).powi(-3))
                                .sum::<f64>()
                        } else {
                            -2.0 * (lambda[i] + lambda[l]).powi(-3)
                        };
                        h[i][l] = dt / (s * s) + 2.0 * t[i] * t[l] / (s * s * s);
                    }
                }
            }
            SpeedKind::SigmaRatio(k) => {
                let e = elementary(lambda, k);
                let (p, r) = (e[k], e[k - 1]);
                let first: Vec<(f64, f64)> = (0..n)
                    .map(|i| {
                        let d = elementary_without(lambda, k, &[i]);
                        (d[k - 1], if k >= 2 { d[k - 2] } else { 0.0 })
                    })
                    .collect();
                for i in 0..n {
                    for l in 0..n {
                        let (pil, ril) = if i == l {
                            (0.0, 0.0)
                        } else {
                            let d = elementary_without(lambda, k, &[i, l]);
                            (
                                if k >= 2 { d[k - 2] } else { 0.0 },
                                if k >= 3 { d[k - 3] } else { 0.0 },
                            )
                        };
                        let (pi, ri) = first[i];
                        let (pl, rl) = first[l];
                        h[i][l] = (pil * r + pi * rl - pl * ri - p * ril) / (r * r)
                            - 2.0 * rl * (pi * r - p * ri) / (r * r * r);
                    }
                }
            }
        }
        Ok(h)
    }

    /// `F(x, y) = γ(x, y, …, y)`.
    pub fn restriction(&self, x: f64, y: f64) -> Result<f64> {
        self.restricted_raw(x, y)
            .map(|v| v.0)
            .ok_or_else(|| self.restricted_violation(x, y))
    }

    /// `(F, ∂F/∂x, ∂F/∂y)` at `(x, y)`.
    pub fn restriction_with_partials(&self, x: f64, y: f64) -> Result<(f64, f64, f64)> {
        self.restricted_raw(x, y)
            .ok_or_else(|| self.restricted_violation(x, y))
    }

    fn restricted_violation(&self, x: f64, y: f64) -> FlowError {
        let mut v = vec![y; self.n];
        v[0] = x;
        FlowError::ConeViolation(v)
    }

    /// Closed-form restriction with partial derivatives; `None` outside the cone.
    fn restricted_raw(&self, x: f64, y: f64) -> Option<(f64, f64, f64)> {
        if !x.is_finite() || !y.is_finite() {
            return None;
        }
        let m = (self.n - 1) as f64;
        match self.kind {
            SpeedKind::Sum => {
                let ok = if self.n == 2 {
                    x + y > 0.0
                } else {
                    x + y > 0.0 && y > 0.0
                };
                ok.then_some((x + m * y, 1.0, m))
            }
            SpeedKind::BrendleHuisken => {
                if !(x + y > 0.0 && y > 0.0) {
                    return None;
                }
                let p = m * (m - 1.0) / 2.0;
                let u = 1.0 / (x + y);
                let s = m * u + p / (2.0 * y);
                let inv2 = 1.0 / (s * s);
                Some((
                    1.0 / s,
                    m * u * u * inv2,
                    (m * u * u + p / (2.0 * y * y)) * inv2,
                ))
            }
            SpeedKind::SigmaRatio(k) => {
                let mm = self.n - 1;
                let sigma = |j: usize| -> (f64, f64, f64) {
                    if j == 0 {
                        return (1.0, 0.0, 0.0);
                    }
                    let a = binomial(mm, j as isize - 1);
                    let b = binomial(mm, j as isize);
                    let val = a * x * y.powi(j as i32 - 1) + b * y.powi(j as i32);
                    let dx = a * y.powi(j as i32 - 1);
                    let dy = if j >= 2 {
                        a * (j - 1) as f64 * x * y.powi(j as i32 - 2)
                    } else {
                        0.0
                    } + b * j as f64 * y.powi(j as i32 - 1);
                    (val, dx, dy)
                };
                for j in 1..=k {
                    if !(sigma(j).0 > 0.0) {
                        return None;
                    }
                }
                let (p, px, py) = sigma(k);
                let (r, rx, ry) = sigma(k - 1);
                Some((
                    p / r,
                    (px * r - p * rx) / (r * r),
                    (py * r - p * ry) / (r * r),
                ))
            }
        }
    }

    /// Implicit inverse `f` with the default tolerance.
    pub fn inverse(&self) -> ImplicitInverse {
        ImplicitInverse::new(*self)
    }
}

fn two_smallest(v: &[f64]) -> (f64, f64) {
    let mut a = f64::INFINITY;
    let mut b = f64::INFINITY;
    for &x in v {
        if x < a {
            b = a;
            a = x;
        } else if x < b {
            b = x;
        }
    }
    (a, b)
}

/// `σ_0, …, σ_k` of the entries.
fn elementary(lambda: &[f64], k: usize) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &l in lambda {
        for j in (1..=k).rev() {
            e[j] += l * e[j - 1];
        }
    }
    e
}

/// `σ_0, …, σ_k` with the listed indices removed.
fn elementary_without(lambda: &[f64], k: usize, skip: &[usize]) -> Vec<f64> {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for (i, &l) in lambda.iter().enumerate() {
        if skip.contains(&i) {
            continue;
        }
        for j in (1..=k).rev() {
            e[j] += l * e[j - 1];
        }
    }
    e
}

/// Solves `F(x, y) = z` for `x`.
///
/// The strict entry point [`ImplicitInverse::invert`] only accepts
/// `F(0,1) < z/y < Q`, where the solution is positive. The extended variant
/// also returns negative solutions down to the cone edge, which adaptive
/// integrators need for trial stages near the boundary.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImplicitInverse {
    speed: SpeedFunction,
    rel_tol: f64,
}

impl ImplicitInverse {
    pub fn new(speed: SpeedFunction) -> Self {
        ImplicitInverse {
            speed,
            rel_tol: 4.0 * f64::EPSILON,
        }
    }

    pub fn with_tolerance(speed: SpeedFunction, rel_tol: f64) -> Self {
        ImplicitInverse { speed, rel_tol }
    }

    pub fn speed(&self) -> &SpeedFunction {
        &self.speed
    }

    pub fn tolerance(&self) -> f64 {
        self.rel_tol
    }

    /// Whether `(y, z)` lies in `U = {F(0,1) < z/y < Q}`.
    pub fn in_domain(&self, y: f64, z: f64) -> bool {
        y > 0.0 && z.is_finite() && {
            let s = z / y;
            s > self.speed.f01 && s < self.speed.q
        }
    }

    fn domain_error(&self, y: f64, z: f64) -> FlowError {
        FlowError::DomainViolation {
            y,
            z,
            lower: self.speed.f01,
            upper: self.speed.q,
        }
    }

    /// `f(y, z)` on `U`.
    pub fn invert(&self, y: f64, z: f64) -> Result<f64> {
        if !self.in_domain(y, z) {
            return Err(self.domain_error(y, z));
        }
        Ok(y * self.solve_unit(z / y)?)
    }

    /// `f(y, z)` allowing `x` anywhere in the restricted cone.
    pub fn invert_extended(&self, y: f64, z: f64) -> Result<f64> {
        if !(y > 0.0) || !z.is_finite() || !(z / y < self.speed.q) {
            return Err(self.domain_error(y, z));
        }
        Ok(y * self.solve_unit(z / y)?)
    }

    /// `(f, ∂f/∂y, ∂f/∂z)` on the extended domain.
    pub fn invert_with_partials(&self, y: f64, z: f64) -> Result<(f64, f64, f64)> {
        let x = self.invert_extended(y, z)?;
        let (_, fx, fy) = self.speed.restriction_with_partials(x, y)?;
        Ok((x, -fy / fx, 1.0 / fx))
    }

    /// Solves `F(t, 1) = s`.
    fn solve_unit(&self, s: f64) -> Result<f64> {
        let sp = &self.speed;
        let g = |t: f64| sp.restricted_raw(t, 1.0);
        let (mut lo, mut hi);
        if s >= sp.f01 {
            lo = 0.0;
            hi = 1.0;
            let mut guard = 0;
            while g(hi).map(|v| v.0).unwrap_or(f64::INFINITY) < s {
                lo = hi;
                hi *= 2.0;
                guard += 1;
                if guard > 1100 {
                    return Err(FlowError::DomainViolation {
                        y: 1.0,
                        z: s,
                        lower: sp.f01,
                        upper: sp.q,
                    });
                }
            }
        } else {
            let edge = sp.restricted_cone_edge();
            hi = 0.0;
            lo = f64::NAN;
            for j in 1..=60 {
                let cand = edge * (1.0 - 0.5f64.powi(j));
                match g(cand) {
                    Some((v, _, _)) if v <= s => {
                        lo = cand;
                        break;
                    }
                    Some(_) => hi = cand,
                    None => {}
                }
            }
            if lo.is_nan() {
                return Err(FlowError::DomainViolation {
                    y: 1.0,
                    z: s,
                    lower: g(edge * (1.0 - 1e-15)).map(|v| v.0).unwrap_or(f64::NAN),
                    upper: sp.q,
                });
            }
        }
        // bisection to a coarse relative width
        while hi - lo > 1e-3 * hi.abs().max(lo.abs()).max(1e-3) {
            let mid = 0.5 * (lo + hi);
            match g(mid) {
                Some((v, _, _)) if v < s => lo = mid,
                Some(_) => hi = mid,
                None => lo = mid,
            }
        }
        // safeguarded Newton polish
        let mut x = 0.5 * (lo + hi);
        for _ in 0..100 {
            let Some((v, fx, _)) = g(x) else {
                lo = x;
                x = 0.5 * (lo + hi);
                continue;
            };
            let r = v - s;
            if r == 0.0 {
                return Ok(x);
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let mut next = x - r / fx;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= self.rel_tol * x.abs().max(1e-300) {
                return Ok(next);
            }
            x = next;
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn all_speeds() -> Vec<SpeedFunction> {
        let mut v = Vec::new();
        for n in 2..=6 {
            v.push(SpeedFunction::sum(n).unwrap());
            if n >= 3 {
                v.push(SpeedFunction::brendle_huisken(n).unwrap());
            }
            for k in 1..n {
                v.push(SpeedFunction::sigma_ratio(n, k).unwrap());
            }
        }
        v
    }

    #[test]
    fn sum_values() {
        let s = SpeedFunction::sum(3).unwrap();
        let l = CurvatureVector::new(vec![1.0, 1.0, 1.0]).unwrap();
        assert_eq!(s.eval(&l).unwrap(), 3.0);
        assert_eq!(s.restriction(0.0, 1.0).unwrap(), 2.0);
        assert_eq!(s.gradient(&l).unwrap(), vec![1.0; 3]);
        assert!(s.q().is_infinite());
        assert_eq!(s.a_lin(), 1.0);
    }

    #[test]
    fn bh_pair_summation_oracle() {
        let s = SpeedFunction::brendle_huisken(3).unwrap();
        // pairs of (0,1,1): 1/1 + 1/1 + 1/2
        assert_relative_eq!(s.f01(), 1.0 / 2.5, epsilon = 1e-15);
        assert_relative_eq!(s.f11(), 2.0 / 3.0, epsilon = 1e-15);
        let eps = CurvatureVector::new(vec![1e-9, 1.0, 1.0]).unwrap();
        assert_relative_eq!(s.eval(&eps).unwrap(), 0.4, epsilon = 1e-8);
        assert_relative_eq!(s.q(), 2.0, epsilon = 1e-9);
        let s4 = SpeedFunction::brendle_huisken(4).unwrap();
        assert_relative_eq!(s4.q(), 2.0 / 3.0, epsilon = 1e-9);
    }

    #[test]
    fn bh_q_matches_pair_count_formula() {
        for n in 3..=8 {
            let s = SpeedFunction::brendle_huisken(n).unwrap();
            let expected = 4.0 / ((n - 1) * (n - 2)) as f64;
            assert_relative_eq!(s.q(), expected, max_relative = 1e-9);
        }
    }

    #[test]
    fn bh_gradient_against_finite_differences() {
        let s = SpeedFunction::brendle_huisken(3).unwrap();
        let g = s.gradient_slice(&[0.0, 1.0, 1.0]).unwrap();
        assert_relative_eq!(g[0], 0.32, epsilon = 1e-14);
        let h = 1e-6;
        let fd = (s.eval_slice(&[h, 1.0, 1.0]).unwrap() - s.eval_slice(&[-h, 1.0, 1.0]).unwrap())
            / (2.0 * h);
        assert_relative_eq!(fd, 0.32, epsilon = 1e-8);
        assert_relative_eq!(s.a_lin(), 0.32, epsilon = 1e-14);
    }

    #[test]
    fn sigma_ratio_constants() {
        let s = SpeedFunction::sigma_ratio(3, 2).unwrap();
        assert_relative_eq!(s.f01(), 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.f11(), 1.0, epsilon = 1e-15);
        assert_relative_eq!(s.q(), 2.0, epsilon = 1e-9);
        for n in 2..=7 {
            for k in 1..n {
                let s = SpeedFunction::sigma_ratio(n, k).unwrap();
                let m = n - 1;
                let f01 = binomial(m, k as isize) / binomial(m, k as isize - 1);
                let f11 = binomial(n, k as isize) / binomial(n, k as isize - 1);
                assert_relative_eq!(s.f01(), f01, max_relative = 1e-14);
                assert_relative_eq!(s.f11(), f11, max_relative = 1e-14);
                if k >= 2 {
                    let q = (n - k + 1) as f64 / (k - 1) as f64;
                    assert_relative_eq!(s.q(), q, max_relative = 1e-9);
                } else {
                    assert!(s.q().is_infinite());
                }
            }
        }
    }

    #[test]
    fn rejects_degenerate_configurations() {
        assert!(SpeedFunction::brendle_huisken(2).is_err());
        assert!(SpeedFunction::sum(1).is_err());
        assert!(SpeedFunction::sigma_ratio(3, 3).is_err());
        assert!(SpeedFunction::sigma_ratio(3, 0).is_err());
    }

    #[test]
    fn cone_violations() {
        let s = SpeedFunction::brendle_huisken(3).unwrap();
        assert!(matches!(
            s.eval_slice(&[-1.0, 1.0, 2.0]),
            Err(FlowError::ConeViolation(_))
        ));
        assert!(s.restriction(-2.0, 1.0).is_err());
        assert!(s.gradient_slice(&[-3.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn restriction_matches_full_evaluation() {
        for s in all_speeds() {
            for &(x, y) in &[(0.0, 1.0), (1.0, 1.0), (3.5, 0.7), (-0.2, 1.3), (100.0, 2.0)] {
                let Ok(f) = s.restriction(x, y) else { continue };
                let mut l = vec![y; s.n()];
                l[0] = x;
                assert_relative_eq!(f, s.eval_slice(&l).unwrap(), max_relative = 1e-13);
                let (_, fx, fy) = s.restriction_with_partials(x, y).unwrap();
                let g = s.gradient_slice(&l).unwrap();
                assert_relative_eq!(fx, g[0], max_relative = 1e-12);
                assert_relative_eq!(fy, g[1..].iter().sum::<f64>(), max_relative = 1e-12);
            }
        }
    }

    #[test]
    fn hessian_against_gradient_differences() {
        for s in all_speeds() {
            let l: Vec<f64> = (0..s.n()).map(|i| 0.3 + 0.37 * i as f64).collect();
            let h = s.hessian_slice(&l).unwrap();
            let step = 1e-5;
            for j in 0..s.n() {
                let mut p = l.clone();
                let mut m = l.clone();
                p[j] += step;
                m[j] -= step;
                let gp = s.gradient_slice(&p).unwrap();
                let gm = s.gradient_slice(&m).unwrap();
                for i in 0..s.n() {
                    let fd = (gp[i] - gm[i]) / (2.0 * step);
                    assert!(
                        (fd - h[i][j]).abs() <= 1e-6 * (1.0 + h[i][j].abs()),
                        "{:?} n={} ({i},{j}): {fd} vs {}",
                        s.kind(),
                        s.n(),
                        h[i][j]
                    );
                }
            }
        }
    }

    /// Closed-form inverses used as independent oracles.
    fn closed_form_inverse(s: &SpeedFunction, y: f64, z: f64) -> f64 {
        let n = s.n();
        match s.kind() {
            SpeedKind::Sum => z - (n - 1) as f64 * y,
            SpeedKind::BrendleHuisken => {
                let m = binomial(n - 1, 2);
                (n - 1) as f64 / (1.0 / z - m / (2.0 * y)) - y
            }
            SpeedKind::SigmaRatio(k) => {
                let a = binomial(n - 1, k as isize - 1);
                let b = binomial(n - 1, k as isize);
                let c = binomial(n - 1, k as isize - 2);
                y * (z * a - b * y) / (a * y - z * c)
            }
        }
    }

    #[test]
    fn inverse_examples() {
        let s = SpeedFunction::sum(3).unwrap();
        assert_relative_eq!(s.inverse().invert(1.0, 2.5).unwrap(), 0.5, epsilon = 1e-14);
        let b = SpeedFunction::brendle_huisken(3).unwrap();
        assert_relative_eq!(b.inverse().invert(1.0, 1.0).unwrap(), 3.0, max_relative = 1e-13);
        let near = b.inverse().invert(1.0, b.f01() + 1e-12).unwrap();
        assert!(near >= 0.0 && near < 1e-10);
    }

    #[test]
    fn inverse_against_closed_forms() {
        for s in all_speeds() {
            let inv = s.inverse();
            let upper = if s.q().is_finite() { s.q() } else { 50.0 };
            for i in 1..40 {
                let ratio = s.f01() + (upper - s.f01()) * i as f64 / 40.0;
                for &y in &[0.01, 1.0, 37.0] {
                    let z = ratio * y;
                    let x = inv.invert(y, z).unwrap();
                    let oracle = closed_form_inverse(&s, y, z);
                    assert!(
                        (x - oracle).abs() <= 1e-9 * (1.0 + oracle.abs()),
                        "{:?} n={} y={y} z={z}: {x} vs {oracle}",
                        s.kind(),
                        s.n()
                    );
                    let back = s.restriction(x, y).unwrap();
                    assert!((back - z).abs() <= 1e-12 * z);
                }
            }
        }
    }

    #[test]
    fn inverse_domain_errors() {
        let b = SpeedFunction::brendle_huisken(3).unwrap();
        let inv = b.inverse();
        assert!(matches!(inv.invert(1.0, 0.3), Err(FlowError::DomainViolation { .. })));
        assert!(matches!(inv.invert(1.0, 2.0), Err(FlowError::DomainViolation { .. })));
        assert!(inv.invert(-1.0, 1.0).is_err());
        // extended branch returns the negative root
        let x = inv.invert_extended(1.0, 0.3).unwrap();
        assert!(x < 0.0);
        assert_relative_eq!(b.restriction(x, 1.0).unwrap(), 0.3, max_relative = 1e-13);
    }

    #[test]
    fn inverse_partials_against_differences() {
        for s in all_speeds() {
            let inv = s.inverse();
            let y = 0.8;
            let z = y * (s.f01() + 0.3 * (s.q().min(10.0) - s.f01()));
            let (_, fy, fz) = inv.invert_with_partials(y, z).unwrap();
            let h = 1e-6;
            let dy = (inv.invert(y + h, z).unwrap() - inv.invert(y - h, z).unwrap()) / (2.0 * h);
            let dz = (inv.invert(y, z + h).unwrap() - inv.invert(y, z - h).unwrap()) / (2.0 * h);
            assert_relative_eq!(fy, dy, max_relative = 1e-6);
            assert_relative_eq!(fz, dz, max_relative = 1e-6);
            assert!(fy < 0.0 && fz > 0.0);
        }
    }

    #[test]
    fn spec_round_trip() {
        let spec = SpeedSpec {
            kind: SpeedKindName::SigmaRatio,
            n: 4,
            k: Some(2),
        };
        let s = spec.build().unwrap();
        assert_eq!(SpeedSpec::from(&s), spec);
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<SpeedSpec>(&text).unwrap(), spec);
        assert_eq!("brendle_huisken".parse::<SpeedKindName>().unwrap(), SpeedKindName::Bh);
    }
}
