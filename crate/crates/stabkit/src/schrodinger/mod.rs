//! Wave/Schrodinger pair coupled in the volume and damped through a single
//! interior point: branch spectra from a cubic reduction, badly-approximable
//! observation points, transfer-function scans, the non-uniform-stability
//! witness, and subspace decay runs.

mod diophantine;
mod spectrum;
mod system;
mod transfer;

pub use diophantine::{
    continued_fraction, sine_gap, ContinuedFraction, MAX_DEPTH, QUOTIENT_BOUND,
};
pub use spectrum::{
    cross_branch_gap, reduction_poly, schro_branch_eigenvalue, schro_charpoly,
    schro_eigenvalues, schro_mode, Branch, SchroEigen, SchroSpectrum,
};
pub use system::{
    analytic_basis, hautus_witness, schro_decay_experiment, schro_generator,
    schro_observability, subspace_gap, subspace_project, verify_numeric_spectrum,
    SchroDecayOutcome, SchroObservability, Subspace,
};
pub use transfer::{transfer_scan, transfer_value, w3_series, TransferScan, TransferValue, W3Sum};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SchroError {
    #[error("mu = {0} is an excluded frequency (0 and 1 are not eigenvalues)")]
    ExcludedMu(f64),
    #[error("mode index k must be nonzero (and positive for the second branch)")]
    BadModeIndex(i64),
    #[error("root search diverged for k = {k}, branch {branch}: no sign change near {seed}")]
    SeedDivergence { k: i64, branch: u8, seed: f64 },
    #[error("branch classification ambiguous at mu = {mu} (both roots match)")]
    BranchAmbiguity { mu: f64 },
    #[error("observation point must lie strictly inside (0, 1) (got {0})")]
    BadPoint(f64),
    #[error("continued fraction terminated: the point is rational")]
    RationalDetected,
    #[error("linear system singular at lambda = {lambda:?} (truncation artifact)")]
    SingularSystem { lambda: num_complex::Complex64 },
    #[error("need at least {needed} modes (got {got})")]
    TooFewModes { needed: usize, got: usize },
    #[error("subspace selection is empty or out of range")]
    BasisIncomplete,
    #[error("numeric and analytic spectra disagree by {defect:.3e} at mode {index}")]
    SpectrumMismatch { index: usize, defect: f64 },
    #[error(transparent)]
    Core(#[from] crate::core::CoreError),
}
