//! Run configuration: one flat JSON document, unknown keys rejected.

use std::io::Read;
use std::path::{Path, PathBuf};

use fixpoint_core::schedule::{Schedule, Sequence};
use fixpoint_core::{SchemeKind, Stopping};
use serde::Deserialize;

use crate::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Compare,
    Stability,
    Dde,
    Bounds,
    Certify,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Compare => "compare",
            Command::Stability => "stability",
            Command::Dde => "dde",
            Command::Bounds => "bounds",
            Command::Certify => "certify",
        }
    }
}

/// A schedule entry: a constant, `"harmonic"` (`1/(n+1)`), or an explicit
/// table whose tail repeats.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum SequenceSpec {
    Constant(f64),
    Named(String),
    Table {
        values: Vec<f64>,
        #[serde(default)]
        divergent_sum: bool,
    },
}

impl SequenceSpec {
    fn build(&self) -> Result<Sequence, Failure> {
        match self {
            SequenceSpec::Constant(c) => Ok(Sequence::constant(*c)?),
            SequenceSpec::Named(name) if name == "harmonic" => Ok(Sequence::Harmonic),
            SequenceSpec::Named(name) => Err(Failure::config(format!("unknown sequence {name:?}"))),
            SequenceSpec::Table { values, divergent_sum } => Ok(Sequence::table(values.clone(), *divergent_sum)?),
        }
    }
}

fn quarter() -> SequenceSpec {
    SequenceSpec::Constant(0.25)
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSpec {
    #[serde(default = "quarter")]
    pub alpha: SequenceSpec,
    #[serde(default = "quarter")]
    pub beta: SequenceSpec,
    #[serde(default = "quarter")]
    pub gamma: SequenceSpec,
}

impl Default for ScheduleSpec {
    fn default() -> Self {
        Self {
            alpha: quarter(),
            beta: quarter(),
            gamma: quarter(),
        }
    }
}

impl ScheduleSpec {
    pub fn build(&self) -> Result<Schedule, Failure> {
        Ok(Schedule::new(self.alpha.build()?, self.beta.build()?, self.gamma.build()?))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Must match the command on the command line when present.
    pub command: Option<Command>,
    pub problem: Option<String>,
    pub schemes: Option<Vec<String>>,
    #[serde(default)]
    pub schedule: ScheduleSpec,
    #[serde(default = "defaults::tol")]
    pub tol: f64,
    #[serde(default = "defaults::max_iter")]
    pub max_iter: usize,
    /// When false every scheme takes exactly `max_iter` steps.
    #[serde(default = "defaults::stop_at_tol")]
    pub stop_at_tol: bool,
    #[serde(default = "defaults::horizon")]
    pub horizon: usize,
    #[serde(default = "defaults::h")]
    pub h: f64,
    #[serde(default)]
    pub seed: u64,
    pub output_dir: Option<PathBuf>,

    // Problem overrides.
    pub x0: Option<f64>,
    pub t0: Option<f64>,
    pub b: Option<f64>,

    // stability
    #[serde(default = "defaults::perturbation_c")]
    pub perturbation_c: f64,
    #[serde(default = "defaults::perturbation_q")]
    pub perturbation_q: f64,

    // bounds
    pub delta: Option<f64>,
    #[serde(default = "defaults::initial_err")]
    pub initial_err: f64,
    #[serde(default = "defaults::n_max")]
    pub n_max: usize,

    // certify
    #[serde(default = "defaults::samples")]
    pub samples: usize,
    #[serde(default = "defaults::l_grid")]
    pub l_grid: Vec<f64>,
}

mod defaults {
    pub fn tol() -> f64 {
        1e-12
    }
    pub fn max_iter() -> usize {
        100
    }
    pub fn stop_at_tol() -> bool {
        true
    }
    pub fn horizon() -> usize {
        200
    }
    pub fn h() -> f64 {
        0.01
    }
    pub fn perturbation_c() -> f64 {
        0.1
    }
    pub fn perturbation_q() -> f64 {
        2.0
    }
    pub fn initial_err() -> f64 {
        1.0
    }
    pub fn n_max() -> usize {
        50
    }
    pub fn samples() -> usize {
        10_000
    }
    pub fn l_grid() -> Vec<f64> {
        vec![0.0]
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Failure> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| Failure::config(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads from a path, or stdin for `-`.
    pub fn load(path: &Path) -> Result<Self, Failure> {
        let text = if path == Path::new("-") {
            let mut s = String::new();
            std::io::stdin()
                .read_to_string(&mut s)
                .map_err(|e| Failure::config(format!("reading stdin: {e}")))?;
            s
        } else {
            std::fs::read_to_string(path).map_err(|e| Failure::config(format!("reading {}: {e}", path.display())))?
        };
        Self::parse(&text)
    }

    fn validate(&self) -> Result<(), Failure> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Failure::config(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("tol", self.tol)?;
        positive("h", self.h)?;
        if self.max_iter == 0 {
            return Err(Failure::config("max_iter must be at least 1"));
        }
        if self.samples < 2 {
            return Err(Failure::config("samples must be at least 2"));
        }
        if self.initial_err.is_nan() || self.initial_err < 0.0 {
            return Err(Failure::config("initial_err must be non-negative"));
        }
        self.schedule.build()?;
        self.scheme_kinds()?;
        Ok(())
    }

    pub fn stopping(&self) -> Stopping {
        if self.stop_at_tol {
            Stopping::AtTolerance
        } else {
            Stopping::FullRun
        }
    }

    pub fn check_command(&self, cmd: Command) -> Result<(), Failure> {
        match self.command {
            Some(c) if c != cmd => Err(Failure::config(format!(
                "config is for command {:?} but {:?} was requested",
                c.name(),
                cmd.name()
            ))),
            _ => Ok(()),
        }
    }

    pub fn scheme_kinds(&self) -> Result<Vec<SchemeKind>, Failure> {
        match &self.schemes {
            None => Ok(SchemeKind::ALL.to_vec()),
            Some(names) if names.is_empty() => Err(Failure::config("schemes must not be empty")),
            Some(names) => names
                .iter()
                .map(|n| n.parse().map_err(|e| Failure::config(format!("{e}"))))
                .collect(),
        }
    }
}
