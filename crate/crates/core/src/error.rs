use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("malformed fraction `{0}`")]
    Fraction(String),
    #[error("line {line}: {msg}")]
    Circuit { line: usize, msg: String },
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("invalid structure: {0}")]
    Structure(String),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("arity mismatch: {left} outputs vs {right} inputs")]
    ArityMismatch { left: usize, right: usize },
    #[error("rule {rule} does not apply: {reason}")]
    Precondition { rule: &'static str, reason: String },
    #[error("stale match for rule {0}")]
    StaleMatch(&'static str),
    #[error("oracle cap exceeded: needs {needed} Boolean variables, cap is {cap}")]
    CapExceeded { needed: usize, cap: usize },
    #[error("H-box {hbox} has label {label} which is not a phase")]
    NonPhaseLabel { hbox: usize, label: String },
    #[error("H-box {hbox} has an inexact label; enable inexact mode to translate it")]
    InexactLabel { hbox: usize },
}

impl Error {
    pub(crate) fn precondition(rule: &'static str, reason: impl Into<String>) -> Self {
        Error::Precondition {
            rule,
            reason: reason.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
