//! `orbitframe`: run a frame / iteration-operator experiment and write a report.
//!
//! Exit codes: 0 success, 2 usage, 3 malformed JSON, 4 invalid config or parameters,
//! 5 I/O, 6 numeric failure, 7 representation impossible. Failures print one JSON error
//! object on stderr and write no report.

mod config;
mod error;
mod report;
mod run;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chrono::{SecondsFormat, Utc};
use clap::{ArgGroup, Parser};

use config::{ExperimentConfig, Format};
use error::CliResult;
use report::{Provenance, Report};

#[derive(Debug, Parser)]
#[command(name = "orbitframe", version, about = "Frame and iteration-operator experiments")]
#[command(group(ArgGroup::new("source").required(true).args(["config", "demo"])))]
struct Cli {
    /// Experiment config (JSON).
    #[arg(long, env = "ORBITFRAME_CONFIG")]
    config: Option<PathBuf>,
    /// Run a builtin demo: aldroubi, sinc-half-shift, gabor-thirds, two-onb-alternate.
    #[arg(long, env = "ORBITFRAME_DEMO")]
    demo: Option<String>,
    /// Report path; stdout when absent.
    #[arg(long, env = "ORBITFRAME_OUT")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, env = "ORBITFRAME_FORMAT")]
    format: Option<Format>,
    /// Relative singular-value cutoff for numeric rank.
    #[arg(long, env = "ORBITFRAME_TOL_RANK")]
    tol_rank: Option<f64>,
    /// Absolute residual tolerance.
    #[arg(long, env = "ORBITFRAME_TOL_RESIDUAL")]
    tol_residual: Option<f64>,
    /// Seed for randomly generated families.
    #[arg(long, env = "ORBITFRAME_SEED")]
    seed: Option<u64>,
}

fn format_for(path: Option<&Path>) -> Option<Format> {
    match path?.extension()?.to_str()? {
        "csv" => Some(Format::Csv),
        "json" => Some(Format::Json),
        _ => None,
    }
}

fn execute(cli: Cli) -> CliResult<()> {
    let mut cfg = match (&cli.config, &cli.demo) {
        (Some(path), _) => {
            let mut cfg = ExperimentConfig::load(path)?;
            cfg.rebase(path.parent().unwrap_or(Path::new(".")));
            cfg
        }
        (None, Some(name)) => ExperimentConfig::demo(name),
        (None, None) => unreachable!("clap requires a source"),
    };
    if cli.tol_rank.is_some() {
        cfg.tolerance.rank_rel = cli.tol_rank;
    }
    if cli.tol_residual.is_some() {
        cfg.tolerance.residual_abs = cli.tol_residual;
    }
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.output.path = cli.out.clone();
    }
    if cli.format.is_some() {
        cfg.output.format = cli.format;
    }
    let format = cfg.output.format.or_else(|| format_for(cfg.output.path.as_deref())).unwrap_or_default();
    let tol = cfg.tolerance.resolve()?;

    let outcome = run::run(&cfg, &tol)?;
    let report = Report {
        provenance: Provenance {
            tool: "orbitframe",
            version: orbitframe::VERSION,
            timestamp: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
        },
        tolerance: tol,
        results: outcome.results,
        warnings: outcome.warnings,
        config: cfg,
    };
    let bytes = report.render(&outcome.table, format)?;
    report::emit(&bytes, report.config.output.path.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
