use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

mod commands;
mod config;
mod output;

use config::{Command, RunConfig};

/// Fixed-point iteration experiments.
#[derive(Debug, Parser)]
#[command(name = "fixpoint", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// JSON config file, or `-` for stdin.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed` in the config.
    #[arg(long)]
    seed: Option<u64>,
}

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_HYPOTHESIS: u8 = 2;
pub const EXIT_NONCONVERGENCE: u8 = 3;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    pub fn hypothesis(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_HYPOTHESIS,
            message: message.into(),
        }
    }

    pub fn nonconvergence(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NONCONVERGENCE,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::config(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<fixpoint_core::Error> for Failure {
    fn from(e: fixpoint_core::Error) -> Self {
        use fixpoint_core::Error as E;
        let code = match e {
            E::Hypothesis(_) => EXIT_HYPOTHESIS,
            E::DomainViolation { .. } | E::Evaluation { .. } => EXIT_NONCONVERGENCE,
            _ => EXIT_CONFIG,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = RunConfig::load(&cli.config)?;
    cfg.check_command(cli.command)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = cli
        .out
        .or_else(|| cfg.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    commands::dispatch(cli.command, &cfg, &out)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.code)
        }
    }
}
