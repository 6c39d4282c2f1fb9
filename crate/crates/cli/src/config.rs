//! Experiment configuration files.
//!
//! ```json
//! {
//!   "command": "sweep",
//!   "input": {"builtin": "aldroubi"},
//!   "params": {"sizes": [50, 100, 200], "independence": "resolved"},
//!   "tolerance": {"rank_rel": 1e-10},
//!   "output": {"path": "out.csv", "format": "csv"}
//! }
//! ```
//!
//! `input` is either `{"file": path}`, `{"builtin": name, ...args}`, or a string that is a
//! path unless it starts with `builtin:`.

use std::path::{Path, PathBuf};

use orbitframe::Tolerance;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Analyze,
    Represent,
    Gabor,
    Shiftinv,
    Sweep,
    Demo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual_abs: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero_level: Option<f64>,
}

impl ToleranceOverrides {
    pub fn resolve(&self) -> CliResult<Tolerance> {
        let d = Tolerance::default();
        Ok(Tolerance::new(
            self.rank_rel.unwrap_or(d.rank_rel),
            self.residual_abs.unwrap_or(d.residual_abs),
            self.zero_level.unwrap_or(d.zero_level),
        )?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Input {
    File { file: PathBuf },
    Builtin { builtin: String, #[serde(flatten)] args: Map<String, Value> },
}

#[derive(Deserialize)]
#[serde(untagged)]
enum InputJson {
    Text(String),
    File { file: PathBuf },
    Builtin { builtin: String, #[serde(flatten)] args: Map<String, Value> },
}

impl<'de> Deserialize<'de> for Input {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(match InputJson::deserialize(d)? {
            InputJson::Text(s) => match s.strip_prefix("builtin:") {
                Some(name) => Input::Builtin { builtin: name.to_string(), args: Map::new() },
                None => Input::File { file: s.into() },
            },
            InputJson::File { file } => Input::File { file },
            InputJson::Builtin { builtin, args } => Input::Builtin { builtin, args },
        })
    }
}

impl Input {
    pub fn builtin(name: &str) -> Self {
        Input::Builtin { builtin: name.to_string(), args: Map::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub input: Option<Input>,
    #[serde(default)]
    pub params: Map<String, Value>,
    #[serde(default)]
    pub tolerance: ToleranceOverrides,
    #[serde(default)]
    pub output: OutputSpec,
    /// Seed for the `random` family builtin.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Where to write the analyzed family, in the format `analyze` accepts as input.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family_out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn demo(name: &str) -> Self {
        ExperimentConfig {
            command: Command::Demo,
            input: Some(Input::builtin(name)),
            params: Map::new(),
            tolerance: ToleranceOverrides::default(),
            output: OutputSpec::default(),
            seed: None,
            family_out: None,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let raw: Value = serde_json::from_str(&text).map_err(|e| CliError::from_json(&path.display().to_string(), e))?;
        serde_json::from_value(raw).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
    }

    /// Relative paths inside the config are taken relative to the config file.
    pub fn rebase(&mut self, dir: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        };
        if let Some(Input::File { file }) = &mut self.input {
            fix(file);
        }
        if let Some(p) = &mut self.family_out {
            fix(p);
        }
        if let Some(p) = &mut self.output.path {
            fix(p);
        }
    }
}

/// Typed view of a parameter object; unknown keys are config errors.
pub fn typed<T: DeserializeOwned>(what: &str, map: &Map<String, Value>) -> CliResult<T> {
    serde_json::from_value(Value::Object(map.clone())).map_err(|e| CliError::config(format!("{what}: {e}")))
}
