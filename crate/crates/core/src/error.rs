use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("non-finite objective value encountered at stencil point {index}")]
    NonFiniteObjective { index: usize },

    #[error("non-finite gradient encountered")]
    NonFiniteGradient,

    #[error("objective at the current outer iterate is not finite")]
    NonFiniteState,

    #[error("secant estimate undefined: consecutive inner iterates coincide")]
    DivisionByZero,

    #[error("point {theta} lies outside [0, {m}]")]
    OutOfDomain { theta: f64, m: f64 },

    #[error("breakpoints must be strictly increasing (index {index})")]
    NonIncreasingBreakpoints { index: usize },

    #[error("method `{0}` has no adversarial parameterization")]
    UnsupportedMethod(String),

    #[error("anti-convergence verification failed at k = {k}: {reason}")]
    VerificationFailed { k: usize, reason: String },

    #[error("adaptive quadrature exceeded depth {max_depth}")]
    QuadratureDepthExceeded { max_depth: u32 },

    #[error("CSV schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
