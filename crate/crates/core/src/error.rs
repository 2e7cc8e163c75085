use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid mode layout: {mode_count} modes with cutoff {cutoff} (need ≥ 2 of each)")]
    InvalidLayout { mode_count: usize, cutoff: usize },

    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("occupation {occupation} of mode {mode} exceeds n_max = {n_max}")]
    OccupationOutOfRange {
        mode: usize,
        occupation: usize,
        n_max: usize,
    },

    #[error("mode {mode} out of range for {mode_count} modes")]
    ModeOutOfRange { mode: usize, mode_count: usize },

    #[error("dimension mismatch: {left:?} vs {right:?}")]
    DimensionMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("matrix is not Hermitian (‖H − H†‖_F = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Hermitian eigendecomposition did not converge")]
    EigenFailure,

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix exponential failed to converge")]
    ConvergenceFailure,

    #[error("layout ({mode_count} modes, cutoff {cutoff}) does not match coupler parameters")]
    LayoutMismatch { mode_count: usize, cutoff: usize },

    #[error("invalid coupler parameters: {0}")]
    InvalidParams(&'static str),

    #[error(
        "factorization singular: sqrt(gamma) = {sqrt_gamma} lies within {margin:e} of an odd multiple of pi"
    )]
    NearSingularity { sqrt_gamma: f64, margin: f64 },

    #[error("gate times need equal couplings")]
    UnequalCouplings,

    #[error("free phase w·t = {free_phase} is not an odd multiple of pi (off by {offset:e})")]
    FreePhaseMismatch { free_phase: f64, offset: f64 },

    #[error("truncation n_max = {n_max} too small for {mode_count} qubit modes")]
    TruncationTooSmall { n_max: usize, mode_count: usize },

    #[error("state is not normalized (norm = {norm})")]
    NotNormalized { norm: f64 },

    #[error("bipartition cut {cut} invalid for {parts} subsystems")]
    InvalidCut { cut: usize, parts: usize },

    #[error("matrix is not unitary (‖U†U − I‖_F = {deviation:e})")]
    NotUnitary { deviation: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}
