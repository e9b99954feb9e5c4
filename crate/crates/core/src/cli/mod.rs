//! Command-line front end: configuration, experiment dispatch, reports and
//! plot-ready tables, and the end-to-end verification suite.
//!
//! A run reads a JSON configuration (see [`RunConfig`]), executes one
//! [`Experiment`], and writes `report.json` plus one table per data
//! section into the output directory. Exit codes: 0 for a passing or
//! complete run, 2 for an inconclusive one, 1 for failures and errors.

pub mod config;
pub mod output;
mod run;
pub mod verify;

use std::path::Path;

use clap::ValueEnum;
use serde::Serialize;
use thiserror::Error;

pub use config::{
    parse_config, parse_config_str, BilliardsBlock, ConfigError, PerturbationBlock, RunConfig,
    SeedNeeds, SpectralBlock,
};
pub use output::{csv_to_json, DataFile, Format};
pub use run::run;

use crate::billiards::BilliardError;
use crate::geometry::GeometryError;
use crate::perturbation::{Certificate, PerturbationError};
use crate::spectral::SpectralError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
    #[error(transparent)]
    Billiard(#[from] BilliardError),
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    PairMake,
    BilliardTrace,
    BilliardLengths,
    BilliardDichotomy,
    SpectrumEigs,
    SpectrumTrace,
    PerturbRates,
    PerturbCheck,
    Certify,
    Scan,
    VerifyAll,
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::PairMake => "pair-make",
            Experiment::BilliardTrace => "billiard-trace",
            Experiment::BilliardLengths => "billiard-lengths",
            Experiment::BilliardDichotomy => "billiard-dichotomy",
            Experiment::SpectrumEigs => "spectrum-eigs",
            Experiment::SpectrumTrace => "spectrum-trace",
            Experiment::PerturbRates => "perturb-rates",
            Experiment::PerturbCheck => "perturb-check",
            Experiment::Certify => "certify",
            Experiment::Scan => "scan",
            Experiment::VerifyAll => "verify-all",
        }
    }

    pub const ALL: [Experiment; 11] = [
        Experiment::PairMake,
        Experiment::BilliardTrace,
        Experiment::BilliardLengths,
        Experiment::BilliardDichotomy,
        Experiment::SpectrumEigs,
        Experiment::SpectrumTrace,
        Experiment::PerturbRates,
        Experiment::PerturbCheck,
        Experiment::Certify,
        Experiment::Scan,
        Experiment::VerifyAll,
    ];

    /// Seeds the experiment consumes; each must be set in the config or by
    /// `--seed`.
    pub fn seed_needs(&self) -> SeedNeeds {
        use Experiment::*;
        SeedNeeds {
            billiards: matches!(
                self,
                BilliardTrace | BilliardLengths | BilliardDichotomy | Certify | VerifyAll
            ),
            perturbation: matches!(self, Scan | VerifyAll),
        }
    }
}

impl std::str::FromStr for Experiment {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| format!("unknown experiment {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Pass,
    /// A data-producing run with no verdict attached.
    Complete,
    /// A soft criterion missed its target.
    Warn,
    Inconclusive,
    Fail,
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Pass | Status::Complete | Status::Warn => 0,
            Status::Inconclusive => 2,
            Status::Fail => 1,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Complete => "COMPLETE",
            Status::Warn => "WARN",
            Status::Inconclusive => "INCONCLUSIVE",
            Status::Fail => "FAIL",
        }
    }

    pub fn from_pass(pass: bool) -> Self {
        if pass {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

/// One stage of a run and its results.
#[derive(Debug, Clone, Serialize)]
pub struct Step {
    pub name: String,
    pub status: Status,
    pub result: serde_json::Value,
}

impl Step {
    pub fn new(name: impl Into<String>, status: Status, result: impl Serialize) -> Self {
        Self {
            name: name.into(),
            status,
            result: serde_json::to_value(result).expect("step results serialize"),
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Timing {
    pub total_seconds: f64,
    pub steps: Vec<(String, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub experiment: Experiment,
    pub format: Format,
    pub config: RunConfig,
    pub steps: Vec<Step>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    /// Files written next to the report.
    pub files: Vec<String>,
    /// Empty sections and other remarks.
    pub notes: Vec<String>,
    pub status: Status,
    pub exit_code: i32,
    /// Wall-clock data; excluded from determinism comparisons.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timing: Option<Timing>,
    #[serde(skip)]
    pub data: Vec<DataFile>,
}

impl RunReport {
    /// Overall status: the worst step status, or `Complete` without steps.
    pub fn aggregate(steps: &[Step]) -> Status {
        steps
            .iter()
            .map(|s| s.status)
            .max()
            .unwrap_or(Status::Complete)
    }

    /// Render every output file, `report.json` last. Fills `files` and the
    /// notes on empty sections.
    pub fn render(&mut self) -> Vec<(String, Vec<u8>)> {
        let (mut files, empty) = output::render(&self.data, self.format);
        self.files = files.iter().map(|f| f.0.clone()).collect();
        self.files.push("report.json".into());
        for stem in empty {
            let note = format!("{stem}: empty section, no file written");
            if !self.notes.contains(&note) {
                self.notes.push(note);
            }
        }
        files.push(("report.json".into(), output::to_json_bytes(self)));
        files
    }

    /// All rendered bytes with timing removed: the content two runs with
    /// the same configuration must reproduce exactly.
    pub fn payload(&self) -> Vec<(String, Vec<u8>)> {
        let mut r = self.clone();
        r.timing = None;
        r.render()
    }

    pub fn emit(&mut self, out: &Path) -> Result<(), CliError> {
        let files = self.render();
        output::write_files(out, &files)
    }
}
