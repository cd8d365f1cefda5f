use thiserror::Error;

/// Errors raised by the library.
///
/// The variants split into two families that the CLI maps onto different exit
/// codes: input problems (`Parse`, `Mismatch`, `Format`) and domain problems
/// (everything else).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("theorem inapplicable: {0}")]
    Inapplicable(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("invalid input: {0}")]
    Format(String),

    #[error("power of the polynomial not detected in the ideal within cap {cap}")]
    RadicalCap { cap: u64 },

    #[error("no stabilization within e_max = {e_max}")]
    NoStabilization { e_max: u32 },

    #[error("missing import for leaf `{0}`")]
    MissingImport(String),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

impl Error {
    /// True for malformed input (bad syntax, mismatched rings, bad files).
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::Parse { .. } | Error::Mismatch(_) | Error::Format(_)
        )
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Inapplicable(_) => "theorem_inapplicable",
            Error::Precondition(_) => "precondition",
            Error::Parse { .. } => "parse",
            Error::Mismatch(_) => "mismatch",
            Error::Format(_) => "format",
            Error::RadicalCap { .. } => "radical_cap",
            Error::NoStabilization { .. } => "no_stabilization",
            Error::MissingImport(_) => "missing_import",
            Error::Internal(_) => "internal",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
