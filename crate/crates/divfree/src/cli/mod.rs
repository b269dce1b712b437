//! Scenario runner behind the `tool` binary.
//!
//! A run reads a JSON [`Config`], fills scenario defaults, refuses configs
//! that [`validate`] finds problems with, drives one scenario and writes
//! `report.json` plus CSV tables (and PGM rasters on request) into the
//! output directory. Exit status: 0 when every check passes, 1 when one
//! fails or a stage errors, 2 for configuration errors.

pub mod config;
pub mod io;
pub mod scenarios;
pub mod validate;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

pub use config::{Config, Schedule};
pub use validate::{validate, Problem, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    WhitneyDemo,
    C1Pipeline,
    CmgammaPipeline,
    SobolevDiagnostics,
    BesovCompression,
    KochSharpness,
    GlueDemo,
}

impl Scenario {
    pub const ALL: [Scenario; 7] = [
        Scenario::WhitneyDemo,
        Scenario::C1Pipeline,
        Scenario::CmgammaPipeline,
        Scenario::SobolevDiagnostics,
        Scenario::BesovCompression,
        Scenario::KochSharpness,
        Scenario::GlueDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::WhitneyDemo => "whitney-demo",
            Scenario::C1Pipeline => "c1-pipeline",
            Scenario::CmgammaPipeline => "cmgamma-pipeline",
            Scenario::SobolevDiagnostics => "sobolev-diagnostics",
            Scenario::BesovCompression => "besov-compression",
            Scenario::KochSharpness => "koch-sharpness",
            Scenario::GlueDemo => "glue-demo",
        }
    }

    /// The shipped configuration, used when no `--config` is given.
    pub fn default_config_json(self) -> &'static str {
        match self {
            Scenario::WhitneyDemo => include_str!("../../examples/configs/whitney_demo.json"),
            Scenario::C1Pipeline => include_str!("../../examples/configs/two_disks.json"),
            Scenario::CmgammaPipeline => include_str!("../../examples/configs/cmgamma.json"),
            Scenario::SobolevDiagnostics => include_str!("../../examples/configs/sobolev.json"),
            Scenario::BesovCompression => include_str!("../../examples/configs/besov.json"),
            Scenario::KochSharpness => include_str!("../../examples/configs/koch.json"),
            Scenario::GlueDemo => include_str!("../../examples/configs/three_disks.json"),
        }
    }

    pub fn default_config(self) -> Result<Config, CliError> {
        Config::from_json(self.default_config_json())
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },
    #[error("config rejected: {}", .0.iter().map(|p| p.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Problem>),
    #[error("stage {stage} failed: {message}")]
    Stage { stage: &'static str, message: String },
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn config(path: &str, message: impl Into<String>) -> CliError {
        CliError::Config { path: path.to_string(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Invalid(_) => 2,
            CliError::Stage { .. } | CliError::Io { .. } => 1,
        }
    }
}

/// Tags a library error with the scenario stage that raised it.
pub(crate) fn stage<E: fmt::Display>(stage: &'static str) -> impl Fn(E) -> CliError {
    move |e| CliError::Stage { stage, message: e.to_string() }
}

/// One acceptance assertion of a scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Check {
        Check { name: name.to_string(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub scenario: Scenario,
    /// The configuration after overrides and defaults.
    pub config: Config,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// Files written next to the report.
    pub files: Vec<String>,
    /// Measured quantities and constants.
    pub results: serde_json::Value,
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub gamma: Option<f64>,
}

impl Overrides {
    pub fn apply(&self, scenario: Scenario, mut config: Config) -> Config {
        if let Some(s) = self.seed {
            config.seed = s;
        }
        if let Some(g) = self.gamma {
            config.gamma = Some(g);
        }
        config.resolve(scenario)
    }
}

/// Runs a scenario and writes its files into `out`.
pub fn run(scenario: Scenario, config: Config, overrides: Overrides, out: &Path) -> Result<Report, CliError> {
    let config = overrides.apply(scenario, config);
    let problems = validate(scenario, &config).problems;
    if !problems.is_empty() {
        return Err(CliError::Invalid(problems));
    }
    let mut artifacts = io::Artifacts::create(out, config.rasters)?;
    let (checks, results) = scenarios::drive(scenario, &config, &mut artifacts)?;
    let mut report = Report {
        scenario,
        passed: checks.iter().all(|c| c.passed),
        config,
        checks,
        files: Vec::new(),
        results,
    };
    report.files = artifacts.written().to_vec();
    report.files.push("report.json".into());
    artifacts.json("report.json", &report)?;
    Ok(report)
}

/// Exit status of a finished run.
pub fn exit_code(outcome: &Result<Report, CliError>) -> i32 {
    match outcome {
        Ok(r) if r.passed => 0,
        Ok(_) => 1,
        Err(e) => e.exit_code(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_configs_parse_and_validate() {
        for s in Scenario::ALL {
            let c = s.default_config().unwrap_or_else(|e| panic!("{s}: {e}"));
            let report = validate(s, &c.resolve(s));
            assert!(report.problems.is_empty(), "{s}: {:?}", report.problems);
        }
    }

    #[test]
    fn names_round_trip_through_clap() {
        use clap::ValueEnum;
        for s in Scenario::ALL {
            assert_eq!(Scenario::from_str(s.name(), false).unwrap(), s);
            assert_eq!(serde_json::to_string(&s).unwrap(), format!("\"{}\"", s.name()));
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::config("grid", "bad").exit_code(), 2);
        assert_eq!(CliError::Invalid(vec![]).exit_code(), 2);
        assert_eq!(CliError::Stage { stage: "pipeline", message: "x".into() }.exit_code(), 1);
    }

    #[test]
    fn overrides_win() {
        let c = Scenario::KochSharpness.default_config().unwrap();
        let r = Overrides { seed: Some(9), gamma: Some(0.25) }.apply(Scenario::KochSharpness, c);
        assert_eq!((r.seed, r.gamma), (9, Some(0.25)));
    }
}
