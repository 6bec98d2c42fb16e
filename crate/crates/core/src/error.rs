use thiserror::Error;

/// Errors raised by the scattering library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite input: {0}")]
    NonFinite(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("breakpoint {value} cannot be aligned to a uniform grid on [{x_min}, {x_max}] with at most {max_points} points")]
    UnalignableBreakpoint {
        value: f64,
        x_min: f64,
        x_max: f64,
        max_points: usize,
    },

    #[error("wavefunction is not exchange-symmetric (max asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("point ({x1}, {x2}) lies outside the grid")]
    OutsideGrid { x1: f64, x2: f64 },

    #[error("output grid does not cover the input support: {0}")]
    GridDoesNotCoverInput(String),

    #[error("point outside the domain of the closed form: {0}")]
    OutsideDomain(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("excitation tracing was not enabled for this run")]
    TracingDisabled,

    #[error("empty curve")]
    EmptyCurve,

    #[error("malformed data file: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            Error::Io(e.to_string())
        } else {
            Error::Format(e.to_string())
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
