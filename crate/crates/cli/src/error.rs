use std::fmt;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// 1-based position in a text file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Location {
    pub path: PathBuf,
    pub line: usize,
    pub column: usize,
}

impl Location {
    /// Position of byte `offset` in `text`; columns count characters.
    pub fn from_offset(path: &Path, text: &str, offset: usize) -> Self {
        let offset = offset.min(text.len());
        let before = &text[..offset];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let column = before[line_start..].chars().count() + 1;
        Self { path: path.to_path_buf(), line, column }
    }
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.path.display(), self.line, self.column)
    }
}

fn at(location: &Option<Location>) -> String {
    location.as_ref().map_or_else(String::new, |l| format!("{l}: "))
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("io: {}: {message}", path.display())]
    Io { path: PathBuf, message: String },

    /// Description or time-series file rejected.
    #[error("{module}: {}{message}", at(location))]
    Input { module: &'static str, location: Option<Location>, message: String },

    /// Description file rejected.
    #[error("config: {}{message}", at(location))]
    Parse { location: Option<Location>, message: String },

    /// Structural failure from the modelling pipeline.
    #[error("{0}")]
    Model(thermocircuit::Error),

    /// Step-size instability.
    #[error("{0}")]
    Numeric(thermocircuit::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Input { .. } | CliError::Parse { .. } => 2,
            CliError::Model(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn input(module: &'static str, location: Option<Location>, message: impl Into<String>) -> Self {
        CliError::Input { module, location, message: message.into() }
    }
}

impl From<thermocircuit::Error> for CliError {
    fn from(e: thermocircuit::Error) -> Self {
        use thermocircuit::Error as E;
        match e {
            e if e.is_numeric() => CliError::Numeric(e),
            E::Config(m) => CliError::Usage(format!("simulator: {m}")),
            E::TimeSeries(m) => CliError::input("timeseries", None, m),
            e => CliError::Model(e),
        }
    }
}
