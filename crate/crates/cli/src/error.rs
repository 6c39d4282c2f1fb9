use std::path::{Path, PathBuf};

use serde_json::json;

/// Exit codes. Clap's own usage errors keep exit code 2.
pub mod exit {
    pub const PARSE: i32 = 3;
    pub const CONFIG: i32 = 4;
    pub const IO: i32 = 5;
    pub const NUMERIC: i32 = 6;
    pub const REPRESENTATION: i32 = 7;
}

#[derive(Debug)]
pub enum CliError {
    /// Malformed JSON in a config or input file.
    Parse(String),
    /// Well-formed input that does not describe a valid experiment.
    Config { kind: &'static str, message: String },
    Io { path: PathBuf, source: std::io::Error },
    Core(orbitframe::Error),
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError::Config { kind: "config", message: message.into() }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    /// Splits serde errors into syntax (parse) and schema (config) failures.
    pub fn from_json(context: &str, err: serde_json::Error) -> Self {
        use serde_json::error::Category;
        match err.classify() {
            Category::Syntax | Category::Eof => CliError::Parse(format!("{context}: {err}")),
            Category::Data => CliError::config(format!("{context}: {err}")),
            Category::Io => CliError::Parse(format!("{context}: {err}")),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Parse(_) => "parse",
            CliError::Config { kind, .. } => kind,
            CliError::Io { .. } => "io",
            CliError::Core(orbitframe::Error::Parse(e)) if e.is_data() => "config",
            CliError::Core(e) => e.kind(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        use orbitframe::Error as E;
        match self {
            CliError::Parse(_) => exit::PARSE,
            CliError::Config { .. } => exit::CONFIG,
            CliError::Io { .. } => exit::IO,
            CliError::Core(e) => match e {
                E::Parse(e) if e.is_data() => exit::CONFIG,
                E::Parse(_) => exit::PARSE,
                E::NumericFailure(_) | E::NotFrameSequence => exit::NUMERIC,
                E::RepresentationImpossible { .. } => exit::REPRESENTATION,
                _ => exit::CONFIG,
            },
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({ "error": { "kind": self.kind(), "exit_code": self.exit_code(), "message": self.to_string() } })
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "{m}"),
            CliError::Config { message, .. } => write!(f, "{message}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<orbitframe::Error> for CliError {
    fn from(e: orbitframe::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
