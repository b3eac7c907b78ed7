// Copyright 2026 The pmme Authors
// SPDX-License-Identifier: Apache-2.0

use std::fmt;
use std::path::PathBuf;

/// Location of a configuration problem.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Location {
    pub path: Option<PathBuf>,
    pub line: Option<usize>,
    pub key: Option<String>,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if let Some(p) = &self.path {
            parts.push(p.display().to_string());
        }
        if let Some(l) = self.line {
            parts.push(format!("line {l}"));
        }
        if let Some(k) = &self.key {
            parts.push(format!("key '{k}'"));
        }
        write!(f, "{}", parts.join(", "))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error ({location}): {message}")]
    Config { location: Location, message: String },

    #[error("map is not completely positive at t = {t}: minimal Choi eigenvalue {margin:.6e}")]
    NotCompletelyPositive { t: f64, margin: f64 },

    #[error("{context}: {source}")]
    Numerical {
        context: String,
        #[source]
        source: pmme_core::Error,
    },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        Self::Config { location: Location::default(), message: message.into() }
    }

    pub fn at(line: usize, key: Option<&str>, message: impl Into<String>) -> Self {
        Self::Config {
            location: Location { path: None, line: Some(line), key: key.map(str::to_string) },
            message: message.into(),
        }
    }

    /// Attaches the file name to a configuration error.
    pub fn in_file(self, path: &std::path::Path) -> Self {
        match self {
            Self::Config { mut location, message } => {
                location.path = Some(path.to_path_buf());
                Self::Config { location, message }
            }
            other => other,
        }
    }

    /// 0 success, 1 config error, 2 CP failure, 3 numerical or output failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => 1,
            Self::NotCompletelyPositive { .. } => 2,
            Self::Numerical { source: pmme_core::Error::NotCompletelyPositive { .. }, .. } => 2,
            Self::Numerical { .. } | Self::Output { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Wraps core errors with the stage that produced them.
pub trait Context<T> {
    fn context(self, what: &str) -> Result<T>;
}

impl<T> Context<T> for pmme_core::Result<T> {
    fn context(self, what: &str) -> Result<T> {
        self.map_err(|source| CliError::Numerical { context: what.to_string(), source })
    }
}
