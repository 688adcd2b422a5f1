//! Per-record diagnostics produced by the tolerant loaders.

use std::fmt;

/// A skipped or suspicious input record, located by 1-based line number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

/// Records that survived loading plus diagnostics for the ones that did not.
#[derive(Debug, Clone)]
pub struct Loaded<T> {
    pub items: T,
    pub diagnostics: Vec<Diagnostic>,
}
