//! Line-oriented text formats: reward machines, explicit MDPs and labelings,
//! and run configurations.

pub mod config;
pub mod explicit;
pub mod mrm;

use thiserror::Error;

/// A model file that could not be read, with the 1-based line at fault
/// (0 when the problem is not tied to one line).
#[derive(Debug, Error, Clone, PartialEq)]
#[error("line {line}: {message}")]
pub struct ModelParseError {
    pub line: usize,
    pub message: String,
}

impl ModelParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ModelParseError {
            line,
            message: message.into(),
        }
    }
}

/// Non-blank lines with `#` comments removed, paired with line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        (!line.is_empty()).then_some((i + 1, line))
    })
}

/// Splits `key: rest` header lines.
pub(crate) fn header<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.strip_prefix(key)
        .and_then(|rest| rest.strip_prefix(':'))
        .map(str::trim)
}
