//! Error and diagnostic types shared by all modules.

/// Library-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum QsError {
    /// A documented precondition of an operation was violated by the caller.
    #[error("contract violation: {0}")]
    Contract(String),

    /// The request is outside the implemented capability envelope
    /// (e.g. Hermite order above the stability bound, analytic Schmidt
    /// decomposition on non-Gaussian inputs).
    #[error("capability: {0}")]
    Capability(String),

    /// A different constructor must be used for this input
    /// (e.g. cw pump passed to the pulsed two-photon-amplitude builder).
    #[error("wrong constructor: {0}")]
    WrongConstructor(String),

    /// Configuration could not be parsed or failed schema validation.
    #[error("config: {0}")]
    Config(String),

    /// I/O failure while reading or writing artifacts.
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, QsError>;

/// Non-fatal accuracy or validity warnings surfaced next to results.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    /// Stable machine-readable code, e.g. `grid-coverage`, `hbl-flags`.
    pub code: &'static str,
    pub message: String,
}

impl Diagnostic {
    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        Self { code, message: message.into() }
    }
}
