//! Abstract machinery shared by every worked system: generator assembly,
//! time evolution with the energy law, decay-rate fitting, observability
//! Gramians, the frequency-domain residual and spectral-weight norms.

pub mod decay;
pub mod generator;
pub mod hautus;
pub mod linalg;
pub mod observability;
pub mod spectral;
pub mod split;
pub mod trajectory;

pub use decay::{fit_decay, DecayModel, DecayReport, EnergyTrace, FitParams};
pub use generator::{assemble_generator, assemble_generator_with_tol, GeneratorPair};
pub use hautus::hautus_residual;
pub use observability::{
    gramian_constant, observability_constant, observability_constant_on, GramianOutcome,
    ObservabilityReport, QuadratureRule,
};
pub use spectral::{spectral_norm, SpectralWeight};
pub use split::{correction_split, SplitReport};
pub use trajectory::{
    dissipation_residual, evolve, evolve_with, stable_dt, EvolveMode, Scheme, Trajectory,
};

use thiserror::Error;

/// Errors raised by the core operations.
#[derive(Debug, Error)]
pub enum CoreError {
    #[error("matrix/vector dimensions disagree: {0}")]
    DimensionMismatch(String),
    #[error("conservative part is not metric-skew-adjoint (relative defect {defect:.3e})")]
    NotSkewAdjoint { defect: f64 },
    #[error("dissipative part is inconsistent with the observation rows (relative defect {defect:.3e})")]
    NotDissipative { defect: f64 },
    #[error("metric must be strictly positive (entry {index} = {value})")]
    NonPositiveMetric { index: usize, value: f64 },
    #[error("energy grew by {growth:.3e} relative in conservative mode: step too large")]
    UnstableStep { growth: f64 },
    #[error("energy trace contains a non-positive value at t = {time}")]
    NonPositiveEnergy { time: f64 },
    #[error("only {found} samples past the transient cutoff, need {needed}")]
    InsufficientSamples { found: usize, needed: usize },
    #[error("weight matrix is singular or indefinite: {0}")]
    SingularWeight(String),
    #[error("coefficients do not match the weight basis ({coeffs} vs {basis})")]
    BasisMismatch { coeffs: usize, basis: usize },
    #[error("zero vector where a nonzero state is required")]
    ZeroVector,
    #[error("modal decomposition too ill-conditioned to trust (reconstruction error {0:.3e})")]
    IllConditionedModes(f64),
    #[error("quadrature unstable: halving dt moved the constant by {drift:.2}%")]
    QuadratureUnstable { drift: f64 },
    #[error("linear algebra backend failure: {0}")]
    Backend(String),
}

impl CoreError {
    pub(crate) fn from_linalg(e: ndarray_linalg::error::LinalgError) -> Self {
        CoreError::Backend(e.to_string())
    }
}
