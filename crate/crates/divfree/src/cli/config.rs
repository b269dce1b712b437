//! JSON run configuration.
//!
//! Every section rejects unknown keys. Optional parameters left out of a
//! file are filled per scenario by [`Config::resolve`], and the resolved
//! copy is what reports embed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CliError, Scenario};
use crate::fixtures::{random_disks, Disk};
use crate::geometry::{koch_curve, KochCurve, Shape};
use crate::grid::Grid;

/// `start, start * factor, ..., start * factor^(count - 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Schedule {
    pub start: f64,
    pub factor: f64,
    pub count: usize,
}

impl Schedule {
    pub fn values(&self) -> Vec<f64> {
        crate::fixtures::geometric(self.start, self.factor, self.count)
    }
}

/// Square grid `[lo_x, lo_x + side] x [lo_y, lo_y + side]` with `cells`
/// cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lo: [f64; 2],
    pub side: f64,
    pub cells: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { lo: [-1.0, -1.0], side: 2.0, cells: 256 }
    }
}

impl GridConfig {
    pub fn grid(&self) -> Result<Grid, CliError> {
        Grid::new(self.lo, self.side / self.cells as f64, [self.cells, self.cells])
            .map_err(|e| CliError::config("grid", e.to_string()))
    }

    /// The same box at another resolution.
    pub fn with_cells(&self, cells: usize) -> GridConfig {
        GridConfig { cells, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KochConfig {
    pub a: f64,
    pub order: u32,
}

impl KochConfig {
    pub fn curve(&self) -> Result<KochCurve, CliError> {
        koch_curve(self.a, self.order).map_err(|e| CliError::config("geometry.koch", e.to_string()))
    }
}

/// Seeded disks, drawn with the run seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomDisks {
    pub count: usize,
    /// Centers lie in `[lo, hi]^2`.
    pub lo: f64,
    pub hi: f64,
    pub radius: [f64; 2],
    pub separation: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryConfig {
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub disks: Vec<Disk>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub koch: Option<KochConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random: Option<RandomDisks>,
}

impl GeometryConfig {
    /// Listed disks followed by the seeded ones.
    pub fn all_disks(&self, seed: u64) -> Result<Vec<Disk>, CliError> {
        let mut out = self.disks.clone();
        if let Some(r) = &self.random {
            let drawn = random_disks(seed, r.count, r.lo, r.hi, (r.radius[0], r.radius[1]), r.separation)
                .map_err(|e| CliError::config("geometry.random", e.to_string()))?;
            out.extend(drawn);
        }
        Ok(out)
    }

    pub fn shapes(&self, seed: u64) -> Result<Vec<Shape>, CliError> {
        let mut out: Vec<Shape> = self.all_disks(seed)?.iter().map(Disk::shape).collect();
        if let Some(k) = &self.koch {
            out.push(k.curve()?.shape());
        }
        Ok(out)
    }

    pub fn is_empty(&self) -> bool {
        self.disks.is_empty() && self.koch.is_none() && self.random.is_none()
    }
}

/// Stream potential equal to each disk's value within `plateau_cells`
/// grid steps of it, fading to 0 over `width`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub plateau_cells: f64,
    pub width: f64,
}

impl Default for PotentialConfig {
    fn default() -> Self {
        PotentialConfig { plateau_cells: 2.0, width: 0.25 }
    }
}

/// Seeded smooth-function suite across resolutions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub seeds: u64,
    pub resolutions: Vec<usize>,
    /// Waves in each random trigonometric function.
    pub waves: usize,
    pub max_freq: f64,
    /// Allowed ratio between the largest and smallest suite constant.
    pub max_drift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BesovConfig {
    pub beta: f64,
    pub q: f64,
    /// Dyadic levels; defaults to the deepest level the grid resolves.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<usize>,
    pub points: usize,
    /// Exponent `s` in the `2^(s nu)` weight of the near-diagonal integral;
    /// defaults to `d`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dyadic_exponent: Option<f64>,
    /// Seeded sequences for the derivative-dropping reduction; 0 skips it.
    #[serde(default)]
    pub reductions: u64,
    /// Smoothness of the reduced sequences.
    #[serde(default = "default_reduction_beta")]
    pub reduction_beta: f64,
}

fn default_reduction_beta() -> f64 {
    1.5
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SharpnessConfig {
    /// Cutoff widths of the truncated candidates.
    pub widths: Vec<f64>,
    /// Potential gap every candidate has to show.
    pub min_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueConfig {
    /// Disk indices approximated by the first field; `K_1`.
    pub first: Vec<usize>,
    /// Disk indices approximated by the second field; `K_2` is the part not
    /// in `first`.
    pub second: Vec<usize>,
    /// Width of the cutoff around `K_1`.
    pub chi_width: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub grid: GridConfig,
    #[serde(default)]
    pub geometry: GeometryConfig,
    #[serde(default)]
    pub potential: PotentialConfig,
    /// Cover budgets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Schedule>,
    /// Cutoff widths; default to the budgets.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cutoffs: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    /// Dimension of the measure on `K`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<f64>,
    /// Side of the lattice for maximal-function norms.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lattice: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    /// Truncation schedule on the order-2-vanishing fixture.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Schedule>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<SuiteConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub besov: Option<BesovConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sharpness: Option<SharpnessConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub glue: Option<GlueConfig>,
    /// Write PGM rasters next to the report.
    #[serde(default)]
    pub rasters: bool,
}

impl Config {
    /// Parses JSON, naming the offending key on failure.
    pub fn from_json(text: &str) -> Result<Config, CliError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            CliError::config(if path == "." { "(root)" } else { &path }, e.into_inner().to_string())
        })
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(&path.display().to_string(), format!("cannot read config: {e}")))?;
        Config::from_json(&text)
    }

    /// Fills the parameters a scenario uses and leaves the rest untouched.
    pub fn resolve(mut self, scenario: Scenario) -> Config {
        use Scenario::*;
        let pipeline = matches!(scenario, C1Pipeline | CmgammaPipeline | GlueDemo);
        if pipeline || matches!(scenario, SobolevDiagnostics | BesovCompression) {
            self.eps.get_or_insert(Schedule { start: 0.5, factor: 0.5, count: 5 });
        }
        if pipeline {
            self.cutoffs = self.cutoffs.or(self.eps);
        }
        let m = match scenario {
            CmgammaPipeline | WhitneyDemo => 2,
            _ => 1,
        };
        if !matches!(scenario, BesovCompression | KochSharpness) {
            self.m.get_or_insert(m);
        }
        match scenario {
            CmgammaPipeline => {
                self.gamma.get_or_insert(0.5);
            }
            C1Pipeline | GlueDemo | WhitneyDemo => {
                self.gamma.get_or_insert(0.0);
            }
            KochSharpness => {
                if self.gamma.is_none() {
                    if let Some(curve) = self.geometry.koch.and_then(|k| k.curve().ok()) {
                        self.gamma = Some(1.0 / curve.theta - 1.0);
                    }
                }
                self.sharpness.get_or_insert(SharpnessConfig { widths: vec![0.25, 0.125, 0.0625], min_gap: 0.4 });
            }
            _ => {}
        }
        if !matches!(scenario, KochSharpness | WhitneyDemo) {
            self.p.get_or_insert(if scenario == BesovCompression { 2.0 } else { 3.0 });
        }
        if matches!(scenario, C1Pipeline | CmgammaPipeline | GlueDemo | SobolevDiagnostics) {
            self.lattice.get_or_insert(32);
        }
        if scenario == BesovCompression {
            let koch_dim = self.geometry.koch.and_then(|k| k.curve().ok()).map(|c| 1.0 / c.theta);
            let d = *self.d.get_or_insert(koch_dim.unwrap_or(1.0));
            let b = self.besov.get_or_insert(BesovConfig {
                beta: 0.5,
                q: 2.0,
                levels: None,
                points: 400,
                dyadic_exponent: None,
                reductions: 0,
                reduction_beta: default_reduction_beta(),
            });
            b.dyadic_exponent.get_or_insert(d);
            if b.levels.is_none() {
                if let Ok(g) = self.grid.grid() {
                    b.levels = Some(crate::besov::max_level(g.h()));
                }
            }
        }
        if scenario == GlueDemo && self.glue.is_none() {
            self.glue = Some(GlueConfig { first: vec![0, 1], second: vec![1, 2], chi_width: 0.4 });
        }
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedule_values() {
        let s = Schedule { start: 0.5, factor: 0.5, count: 3 };
        assert_eq!(s.values(), vec![0.5, 0.25, 0.125]);
    }

    #[test]
    fn unknown_keys_name_their_path() {
        let err = Config::from_json(r#"{"grid": {"lo": [0, 0], "side": 1, "cells": 8, "spacing": 2}}"#).unwrap_err();
        match err {
            CliError::Config { path, message } => {
                assert_eq!(path, "grid.spacing");
                assert!(message.contains("spacing"), "{message}");
            }
            e => panic!("{e}"),
        }
        let err = Config::from_json(r#"{"geometry": {"disks": [{"c": [0, 0], "r": "big"}]}}"#).unwrap_err();
        assert!(matches!(err, CliError::Config { ref path, .. } if path == "geometry.disks[0].r"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn shape_list_format() {
        let c = Config::from_json(r#"{"geometry": {"disks": [{"c": [0.1, 0.2], "r": 0.3}], "koch": {"a": 0.3, "order": 4}}}"#)
            .unwrap();
        assert_eq!(c.geometry.disks[0].center, [0.1, 0.2]);
        assert_eq!(c.geometry.disks[0].value, 0.0);
        assert_eq!(c.geometry.shapes(0).unwrap().len(), 2);
    }

    #[test]
    fn resolution_fills_scenario_defaults() {
        let c = Config::from_json("{}").unwrap().resolve(Scenario::C1Pipeline);
        assert_eq!(c.cutoffs, c.eps);
        assert_eq!((c.m, c.gamma, c.p), (Some(1), Some(0.0), Some(3.0)));
        let k = Config::from_json(r#"{"geometry": {"koch": {"a": 0.35, "order": 3}}}"#)
            .unwrap()
            .resolve(Scenario::KochSharpness);
        assert!((k.gamma.unwrap() - 0.321).abs() < 2e-3);
        // Explicit values survive.
        let g = Config::from_json(r#"{"gamma": 0.25, "geometry": {"koch": {"a": 0.35, "order": 3}}}"#)
            .unwrap()
            .resolve(Scenario::KochSharpness);
        assert_eq!(g.gamma, Some(0.25));
    }
}
