//! Configuration-driven front end: flow runs, verification suites and
//! parameter sweeps, all writing CSV artifacts.

pub mod config;
mod run;
mod sweep;
mod verify;

use std::fmt;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use quermass_core::flow::FlowError;

pub use config::{ConfigError, RunConfig};
pub use run::cmd_run;
pub use sweep::cmd_sweep;
pub use verify::cmd_verify;

#[derive(Debug, Parser)]
#[command(name = "quermass", version, about = "Inverse curvature flows and quermassintegral inequalities")]
pub struct Cli {
    /// Worker threads for sweeps and independent checks.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
    /// Override a configuration key, e.g. `--set stepping.t_max=2`. Repeatable.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    /// Print only failures and the final status line.
    #[arg(long, global = true)]
    pub quiet: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate one flow and write its trajectory and snapshots.
    Run { config: PathBuf },
    /// Run a verification suite; without a config the built-in defaults are used.
    Verify { suite: Suite, config: Option<PathBuf> },
    /// Run every combination of the config's sweep section.
    Sweep { config: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Symfunc,
    Geometry,
    Prop1,
    Lemma,
    Variation,
    Af,
    Monotone,
    All,
}

/// Process exit status.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success = 0,
    ConfigError = 2,
    NumericalFailure = 3,
    ToleranceViolation = 4,
}

#[derive(Debug)]
pub enum CliError {
    Config(ConfigError),
    Numerical(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(e) => e.fmt(f),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl CliError {
    fn outcome(&self) -> Outcome {
        match self {
            CliError::Config(_) => Outcome::ConfigError,
            CliError::Numerical(_) => Outcome::NumericalFailure,
        }
    }

    fn io(key: &str, path: &Path, err: std::io::Error) -> Self {
        CliError::Config(ConfigError::new(key, format!("cannot write {}: {err}", path.display())))
    }

    /// Precondition failures count as configuration errors; the rest as numerical failures.
    fn from_flow(e: FlowError) -> Self {
        match e {
            FlowError::Config { key, message } => CliError::Config(ConfigError::new(key, message)),
            FlowError::InitialNotConvex { .. } => CliError::Config(ConfigError::new("shape", e.to_string())),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

/// Opens `path` for writing, creating parent directories.
fn create_file(key: &str, path: &Path) -> Result<BufWriter<fs::File>, CliError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| CliError::io(key, parent, e))?;
    }
    fs::File::create(path).map(BufWriter::new).map_err(|e| CliError::io(key, path, e))
}

fn load(path: Option<&Path>, overrides: &[String]) -> Result<RunConfig, ConfigError> {
    match path {
        Some(p) => RunConfig::load(p, overrides),
        None => {
            let doc = serde_json::to_value(RunConfig::default_document()).expect("default config serializes");
            RunConfig::from_value(doc, overrides)
        }
    }
}

/// Parses `args`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Outcome::ConfigError as i32 } else { 0 };
        }
    };
    let jobs = cli.jobs.max(1);
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("cannot start {jobs} worker threads: {e}");
            return Outcome::ConfigError as i32;
        }
    };
    let result = pool.install(|| match &cli.command {
        Command::Run { config } => load(Some(config), &cli.overrides)
            .map_err(CliError::from)
            .and_then(|c| cmd_run(&c, cli.quiet)),
        Command::Verify { suite, config } => load(config.as_deref(), &cli.overrides)
            .map_err(CliError::from)
            .and_then(|c| cmd_verify(*suite, &c, cli.quiet)),
        Command::Sweep { config } => load(Some(config), &cli.overrides)
            .map_err(CliError::from)
            .and_then(|c| cmd_sweep(&c, cli.quiet)),
    });
    let outcome = match result {
        Ok(o) => o,
        Err(e) => {
            eprintln!("{e}");
            e.outcome()
        }
    };
    let status = match outcome {
        Outcome::Success => "ok",
        Outcome::ConfigError => "config error",
        Outcome::NumericalFailure => "numerical failure",
        Outcome::ToleranceViolation => "tolerance violation",
    };
    println!("status: {status} (exit {})", outcome as i32);
    outcome as i32
}
