use thiserror::Error;

/// Diagnostic codes for rejected domain documents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub enum DomainCode {
    MalformedJson,
    UnknownType,
    UnknownField,
    NonRational,
    NonConvex,
    Orientation,
    Endpoints,
    Degenerate,
}

impl DomainCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DomainCode::MalformedJson => "E_JSON",
            DomainCode::UnknownType => "E_TYPE",
            DomainCode::UnknownField => "E_FIELD",
            DomainCode::NonRational => "E_NONRATIONAL",
            DomainCode::NonConvex => "E_CONVEXITY",
            DomainCode::Orientation => "E_ORIENTATION",
            DomainCode::Endpoints => "E_ENDPOINTS",
            DomainCode::Degenerate => "E_DEGENERATE",
        }
    }
}

impl std::fmt::Display for DomainCode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    Domain(String),

    #[error("[{code}] {message}")]
    InvalidDomain { code: DomainCode, message: String },

    #[error("resource budget exceeded: {bound} = {value} ({detail})")]
    Budget {
        bound: &'static str,
        value: u64,
        detail: String,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    #[error("value out of supported range: {0}")]
    Overflow(String),

    #[error("could not certify within j budget {j_budget} at index {k}; best upper bound {best}")]
    Uncertified {
        k: usize,
        j_budget: usize,
        best: String,
    },
}

impl Error {
    pub(crate) fn domain(code: DomainCode, message: impl Into<String>) -> Self {
        Error::InvalidDomain {
            code,
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
