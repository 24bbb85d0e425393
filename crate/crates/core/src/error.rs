use thiserror::Error;

use crate::torus::FrequencyValidity;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid split space: {0}")]
    InvalidSpace(String),

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("{what} is not Hermitian (residual {residual:e})")]
    NotHermitian { what: &'static str, residual: f64 },

    #[error("kernel is not J-Hermitian (residual {residual:e})")]
    NotJHermitian { residual: f64 },

    #[error("kernel does not define a DPP: spectrum of the hat kernel is [{min:e}, {max:e}]")]
    InvalidKernel { min: f64, max: f64 },

    #[error("spectral triple violates the admissibility conditions (worst margin {:e})", .0.worst_margin)]
    InadmissibleSpectrum(Box<FrequencyValidity>),

    #[error("space with {n} points exceeds the exact-enumeration cap of {max}")]
    SpaceTooLarge { n: usize, max: usize },

    #[error("cumulant order {0} is out of range (supported: 1..=12)")]
    OrderOutOfRange(usize),

    #[error("trace has imaginary residual {imag:e} (real part {real:e})")]
    ImaginaryResidual { real: f64, imag: f64 },

    #[error("C{order} cross-check failed: composition formula {composition:e} vs direct {direct:e}")]
    CrossCheck {
        order: usize,
        composition: f64,
        direct: f64,
    },

    #[error("malformed distribution: {0}")]
    MalformedDistribution(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("degenerate configuration: {0}")]
    Degenerate(String),

    #[error("sampler breakdown: {0}")]
    Breakdown(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("report is empty")]
    EmptyReport,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
