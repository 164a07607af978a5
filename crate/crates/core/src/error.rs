use thiserror::Error;

/// Errors raised anywhere in the walk, limit-measure and oracle code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("requested {requested} steps exceeds the step cap of {cap}")]
    StepCapExceeded { requested: u64, cap: u64 },

    #[error("rescaling requires t > 0")]
    ZeroTime,

    #[error("weight denominator degenerates at x = {x}")]
    DegenerateDenominator { x: f64 },

    #[error("theta = {theta} lies in the localization region |sin theta| >= 1/sqrt(2)")]
    OutsideBallisticRegion { theta: f64 },

    #[error("wave number k = {k} lies on an axis (sin k or cos k vanishes)")]
    AxisWaveNumber { k: f64 },

    #[error(
        "quadrature did not converge after {evaluations} evaluations \
         (partial value {partial}, estimated error {est_error})"
    )]
    QuadratureNonConvergence {
        partial: f64,
        est_error: f64,
        evaluations: usize,
    },

    #[error("k grid too coarse: bin {bin} received only {samples} samples (need {required})")]
    CoarseGrid {
        bin: usize,
        samples: usize,
        required: usize,
    },

    #[error("unknown fixture `{0}`")]
    UnknownFixture(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
