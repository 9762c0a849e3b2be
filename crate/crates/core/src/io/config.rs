//! `key = value` configuration files.
//!
//! ```text
//! # treasure-map batch
//! domain = treasure
//! mode = learn-mcts
//! apf = 0.85
//! trials = 10
//! mq_action_budget = 1000
//! ```
//!
//! This module only tokenizes; [`crate::experiment::RunConfig`] interprets
//! the keys.

use thiserror::Error;

/// Line number used for settings that come from the command line.
pub const COMMAND_LINE: usize = 0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("{}: {message}", place(*line))]
    Syntax { line: usize, message: String },
    #[error("{}: `{field}`: {message}", place(*line))]
    Field {
        line: usize,
        field: String,
        message: String,
    },
}

fn place(line: usize) -> String {
    if line == COMMAND_LINE {
        "command line".into()
    } else {
        format!("line {line}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub line: usize,
    pub key: String,
    pub value: String,
}

impl Entry {
    pub fn new(line: usize, key: impl Into<String>, value: impl Into<String>) -> Self {
        Entry {
            line,
            key: key.into(),
            value: value.into(),
        }
    }

    /// An error attributed to this entry.
    pub fn error(&self, message: impl Into<String>) -> ConfigError {
        ConfigError::Field {
            line: self.line,
            field: self.key.clone(),
            message: message.into(),
        }
    }

    /// Parses the value, reporting the key and line on failure.
    pub fn parse<T: std::str::FromStr>(&self) -> Result<T, ConfigError> {
        self.value
            .parse()
            .map_err(|_| self.error(format!("cannot parse `{}`", self.value)))
    }
}

/// Splits a config file into entries. `#` starts a comment; a key may
/// appear only once per file.
pub fn parse_entries(text: &str) -> Result<Vec<Entry>, ConfigError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (line, content) in super::content_lines(text) {
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                message: format!("expected `key = value`, found `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() || key.contains(char::is_whitespace) {
            return Err(ConfigError::Syntax {
                line,
                message: format!("`{key}` is not a key"),
            });
        }
        if let Some(first) = entries.iter().find(|e| e.key == key) {
            return Err(ConfigError::Field {
                line,
                field: key.into(),
                message: format!("already set on line {}", first.line),
            });
        }
        entries.push(Entry::new(line, key, value));
    }
    Ok(entries)
}
