//! Numerical laboratory for rotationally symmetric solutions of fully
//! nonlinear curvature flows: speeds, soliton profiles, flow simulation,
//! Hermite spectral analysis of the linearized rescaled flow, and
//! asymptotic fits.

pub mod asymptotics;
pub mod audit;
pub mod error;
pub mod fit;
pub mod flow;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod ode;
pub mod soliton;
pub mod spectral;
pub mod speed;

pub use error::{FlowError, Result};
pub use speed::{CurvatureVector, ImplicitInverse, SpeedFunction, SpeedKind, SpeedSpec};
