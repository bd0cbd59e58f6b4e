use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Note,
    Warning,
    Error,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Note => "note",
            Severity::Warning => "warning",
            Severity::Error => "error",
        })
    }
}

/// A located message about an input file. Rendered as `line:col: severity: message`;
/// callers that know the file name prefix it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub col: usize,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn error(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, col, severity: Severity::Error, message: message.into() }
    }

    pub fn warning(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, col, severity: Severity::Warning, message: message.into() }
    }

    pub fn note(line: usize, col: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, col, severity: Severity::Note, message: message.into() }
    }

    pub fn with_file(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}: {}", self.line, self.col, self.severity, self.message)
    }
}

fn join(ds: &[Diagnostic]) -> String {
    ds.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}", join(.0))]
    Parse(Vec<Diagnostic>),
    #[error("{}", join(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("not translatable: {0}")]
    Translate(String),
    #[error("{0}")]
    Cap(String),
    #[error("open term: free variable `{0}`")]
    OpenTerm(String),
    #[error("malformed IO-term `{0}`")]
    BadTerm(String),
    #[error("arity mismatch: gate expects {expected} inputs, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parse(_) | Error::BadTerm(_) | Error::Io(_) => 10,
            Error::Invalid(_) => 11,
            Error::Translate(_) | Error::OpenTerm(_) | Error::Arity { .. } => 12,
            Error::Cap(_) => 13,
        }
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        match self {
            Error::Parse(d) | Error::Invalid(d) => d,
            _ => &[],
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
