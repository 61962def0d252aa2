use num_complex::Complex64;
use thiserror::Error;

/// Errors raised across the evaluation, spectral and classification pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter c = {c} lies within {guard:e} of a nonpositive integer")]
    CNonpositiveInteger { c: Complex64, guard: f64 },

    #[error("parameter {name} is not finite")]
    NonFiniteParameter { name: &'static str },

    #[error("series evaluated at |z| = {modulus} outside the usable disk |z| < {limit}")]
    OutsideDisk { modulus: f64, limit: f64 },

    #[error("no convergence after {steps} steps (last correction {last_correction:e})")]
    NoConvergence { steps: usize, last_correction: f64 },

    #[error("denominator series vanishes (|F| = {magnitude:e})")]
    DenominatorZero { magnitude: f64 },

    #[error("z = {z} lies on the branch cut [1, inf)")]
    OnCut { z: Complex64 },

    #[error("approximant {n} has a pole at z = {z}")]
    PoleOfApproximant { n: usize, z: Complex64 },

    #[error("z = {z} lies within the guard band around [-2, 2]")]
    OnBand { z: Complex64 },

    #[error("resolvent solve is near singular (growth {growth:e})")]
    NearSingular { growth: f64 },

    #[error("z = {z} is at a pole")]
    NearPole { z: Complex64 },

    #[error("eigensolver failed to converge within {iterations} iterations")]
    EigensolverFailure { iterations: usize },

    #[error("shifted parameters (a, b - 1, c - 1) are invalid")]
    ShiftInvalid,

    #[error("operation requires real parameters")]
    NotRealParams,

    #[error("continued fraction terminates at index {index} before sign stabilization")]
    Terminating { index: usize },

    #[error("negative b_j^2 may persist beyond the scan limit {limit}")]
    ScanExhausted { limit: usize },

    #[error("degenerate kernel sample points")]
    DegenerateSamples,

    #[error("parameters do not satisfy the Stieltjes condition")]
    NotStieltjes,

    #[error("normalization coefficient d_1 vanishes")]
    DegenerateNormalization,

    #[error("truncation order {order} is below the stabilization index {required}")]
    OrderBelowStabilization { order: usize, required: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// Whether the error stems from invalid input rather than a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::CNonpositiveInteger { .. }
                | Error::NonFiniteParameter { .. }
                | Error::OutsideDisk { .. }
                | Error::OnCut { .. }
                | Error::OnBand { .. }
                | Error::ShiftInvalid
                | Error::NotRealParams
                | Error::DegenerateSamples
                | Error::NotStieltjes
                | Error::DegenerateNormalization
                | Error::OrderBelowStabilization { .. }
                | Error::InvalidArgument(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
