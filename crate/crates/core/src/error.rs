use thiserror::Error;

pub type Result<T> = std::result::Result<T, GfdmError>;

#[derive(Debug, Error)]
pub enum GfdmError {
    #[error("invalid parameter: {0}")]
    Param(String),

    #[error("oracle size MN={mn} exceeds cap {cap}")]
    Capacity { mn: usize, cap: usize },

    #[error("fast path needs power-of-two sizes, got M={m}, N={n}")]
    UnsupportedSize { m: usize, n: usize },

    #[error("singular pulse: |lambda_bar[{bin}]| = {magnitude:e} is below the ZF threshold")]
    SingularPulse { bin: usize, magnitude: f64 },

    #[error("singular channel: |Lambda[{bin}]| = {magnitude:e} is below the ZF threshold")]
    SingularChannel { bin: usize, magnitude: f64 },

    #[error("singular matrix: {0}")]
    SingularMatrix(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl GfdmError {
    /// Stable name of the variant, used for CLI exit messages.
    pub fn name(&self) -> &'static str {
        match self {
            GfdmError::Param(_) => "ParamError",
            GfdmError::Capacity { .. } => "CapacityError",
            GfdmError::UnsupportedSize { .. } => "UnsupportedSize",
            GfdmError::SingularPulse { .. } => "SingularPulse",
            GfdmError::SingularChannel { .. } => "SingularChannel",
            GfdmError::SingularMatrix(_) => "SingularMatrix",
            GfdmError::Config(_) => "ConfigError",
            GfdmError::Unsupported(_) => "Unsupported",
            GfdmError::Parse(_) => "ParseError",
            GfdmError::Io(_) => "IoError",
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        GfdmError::Param(msg.into())
    }
}

pub(crate) fn check_len(what: &str, got: usize, want: usize) -> Result<()> {
    if got != want {
        return Err(GfdmError::param(format!(
            "{what}: expected length {want}, got {got}"
        )));
    }
    Ok(())
}
