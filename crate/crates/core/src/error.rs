use thiserror::Error;

/// Every failure mode reported by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FlowError {
    #[error("curvature vector {0:?} lies outside the admissible cone")]
    ConeViolation(Vec<f64>),

    #[error("({y}, {z}) is outside the inversion domain: need {lower} < z/y < {upper}")]
    DomainViolation {
        y: f64,
        z: f64,
        lower: f64,
        upper: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("solver state left the ellipticity region at {location} = {value}")]
    ConeExit { location: &'static str, value: f64 },

    #[error("step size underflow at t = {t} (h = {h:e})")]
    ToleranceFailure { t: f64, h: f64 },

    #[error("barrier violated at rho = {rho}: psi = {psi}, barrier = {barrier}")]
    BarrierViolation { rho: f64, psi: f64, barrier: f64 },

    #[error("initial value sequence did not settle: last difference {last_diff:e} > {tol:e}")]
    NonConvergence { last_diff: f64, tol: f64 },

    #[error("radius fell below the pinch floor at z = {z}, t = {t}")]
    Pinch { z: f64, t: f64 },

    #[error("time step {dt:e} exceeds the stability limit {limit:e}")]
    StabilityViolation { dt: f64, limit: f64 },

    #[error("tail window too small: {nodes} nodes, need at least {needed}")]
    InsufficientTail { nodes: usize, needed: usize },

    #[error("fit window too narrow: {0}")]
    WindowTooNarrow(String),

    #[error("run too short: {got} windows, need {needed}")]
    WindowTooShort { got: usize, needed: usize },

    #[error("quadrature check failed: {0}")]
    QuadratureFailure(String),

    #[error("sample range [{lo}, {hi}] does not cover node {node}")]
    OutOfRange { lo: f64, hi: f64, node: f64 },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for FlowError {
    fn from(e: std::io::Error) -> Self {
        FlowError::Io(e.to_string())
    }
}

impl From<csv::Error> for FlowError {
    fn from(e: csv::Error) -> Self {
        FlowError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for FlowError {
    fn from(e: serde_json::Error) -> Self {
        FlowError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, FlowError>;
