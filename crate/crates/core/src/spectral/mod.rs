//! Weighted-`L²` eigenstructure of the linearized rescaled operator
//! `𝓛u = a u_zz − z u_z/2 + u` and the mode-dominance bookkeeping.

mod basis;
mod decompose;
mod eigen;
mod modes;
mod quadrature;
mod trace;

pub use basis::{build_basis, fd_operator, HermiteBasis};
pub use decompose::{decompose, decompose_samples, SpectralDecomposition};
pub use eigen::{classify_mode, eigen_table, eigenvalue, EigenRow, ModeClass};
pub use modes::{bowl_rescaled_run, decay_law, rescaled_mode_run, seeded_trace, DecayLawReport, ModeRateReport, ModeRun, ModeRunOptions};
pub use quadrature::{gauss_hermite, hermite_h, orthonormal_hermite};
pub use trace::{
    cutoff_chi, gamma_trace_from_run, merle_zaag_classifier, Classification, GammaTrace, TraceOptions, Verdict, RATIO_FLOOR,
    SLOPE_THRESHOLD,
};
