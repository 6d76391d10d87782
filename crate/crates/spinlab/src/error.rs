use thiserror::Error;

pub type Result<T> = std::result::Result<T, SpinError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpinError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} out of range 1..={dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("parameter `{0}` must be nonzero")]
    ZeroParameter(String),

    #[error("Jacobi identity fails: d(de{index}) has residual norm {residual:.3e}")]
    Jacobi { index: usize, residual: f64 },

    #[error("frame is not nilpotent")]
    NotNilpotent,

    #[error("matrix is not a derivation: residual {0:.3e}")]
    NotDerivation(f64),

    #[error("spinor is not unit: norm {0}")]
    NonUnitSpinor(f64),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("unknown family `{0}`")]
    UnknownFamily(String),

    #[error("unknown claim `{0}`")]
    UnknownClaim(String),

    #[error("io error: {0}")]
    Io(String),
}

impl SpinError {
    /// True for errors caused by malformed input rather than a failed check.
    pub fn is_input_error(&self) -> bool {
        !matches!(
            self,
            SpinError::Jacobi { .. } | SpinError::NotDerivation(_) | SpinError::Numerical(_)
        )
    }
}

impl From<std::io::Error> for SpinError {
    fn from(e: std::io::Error) -> Self {
        SpinError::Io(e.to_string())
    }
}
