//! Time stepping of rotationally symmetric flows in radial, vertical and
//! rescaled form, with reference runs and neck diagnostics.

pub mod heat;
pub mod linear;
pub mod presets;
pub mod state;
pub mod tip;

pub use heat::{heat_barrier_derivatives, heat_barrier_limit_probes, heat_barrier_psi, heat_barrier_quadrature, LimitProbe};
pub use linear::{linearize_rescaled_at_cylinder, BumpDirection, LinearizationReport};
pub use presets::{
    bowl_for_heights, bowl_state, bowl_tail_run, bowl_translation, cylinder_regression, CylinderRegression,
    CylinderRow, TranslationReport,
};
pub use state::{Boundary, BoundaryFn, FlowHistory, Grid, RadialFlowState, Rates, Representation, Scheme};
pub use tip::{extinction_map, tip_neck_diagnostics, ExtinctionReport, TipDiagnostics};
