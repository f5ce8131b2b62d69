use std::fmt;

use serde::Serialize;

/// Error categories and their exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    /// Malformed or invalid input document or flag (exit 2).
    Parse,
    /// Enumeration or search budget exceeded (exit 3).
    Budget,
    /// Reconstruction could not separate a heavy cell (exit 4).
    Ambiguity,
    /// Well-formed request the tool cannot serve (exit 1).
    Unsupported,
    Io,
    Invalid,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Parse => 2,
            ErrorKind::Budget => 3,
            ErrorKind::Ambiguity => 4,
            ErrorKind::Unsupported | ErrorKind::Io | ErrorKind::Invalid => 1,
        }
    }
}

/// Machine-readable error, printed to stderr as `{"error": {...}}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CliError {
    pub kind: ErrorKind,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

impl CliError {
    pub fn new(kind: ErrorKind, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
            input: None,
            field: None,
            line: None,
            column: None,
        }
    }

    pub fn parse_field(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            field: Some(field.into()),
            ..Self::new(ErrorKind::Parse, message)
        }
    }

    pub fn unsupported(message: impl Into<String>) -> Self {
        Self::new(ErrorKind::Unsupported, message)
    }

    pub fn from_json(e: serde_json::Error) -> Self {
        Self {
            line: Some(e.line()),
            column: Some(e.column()),
            ..Self::new(ErrorKind::Parse, e.to_string())
        }
    }

    pub fn in_input(mut self, path: &str) -> Self {
        self.input = Some(path.to_string());
        self
    }

    pub fn exit_code(&self) -> i32 {
        self.kind.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({ "error": self }).to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<matdist_core::Error> for CliError {
    fn from(e: matdist_core::Error) -> Self {
        use matdist_core::Error as E;
        let kind = match &e {
            E::BudgetExceeded { .. } | E::SearchLimit { .. } => ErrorKind::Budget,
            E::AmbiguousCell { .. } => ErrorKind::Ambiguity,
            E::InvalidRational(_) => ErrorKind::Parse,
            _ => ErrorKind::Invalid,
        };
        Self::new(kind, e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        Self::new(ErrorKind::Io, e.to_string())
    }
}
