//! The scenario runner from code: load a shipped config, override the
//! seed, validate, run, and list the checks.
//!
//! `cargo run --release --example run_scenario -- glue-demo`

use std::error::Error;

use clap::ValueEnum;
use divfree::cli::{run, validate, Config, Overrides, Scenario};

fn main() -> Result<(), Box<dyn Error>> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "koch-sharpness".into());
    let scenario = Scenario::from_str(&name, false)?;
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/configs").join(match scenario {
        Scenario::WhitneyDemo => "whitney_demo.json",
        Scenario::C1Pipeline => "two_disks.json",
        Scenario::CmgammaPipeline => "cmgamma.json",
        Scenario::SobolevDiagnostics => "sobolev.json",
        Scenario::BesovCompression => "besov.json",
        Scenario::KochSharpness => "koch.json",
        Scenario::GlueDemo => "three_disks.json",
    });
    let config = Config::load(&path)?;
    let overrides = Overrides { seed: Some(11), gamma: None };

    let dry = validate(scenario, &overrides.apply(scenario, config.clone()));
    println!("{} problems at h = {}", dry.problems.len(), dry.spacing);

    let out = std::env::temp_dir().join(format!("divfree-{scenario}"));
    let report = run(scenario, config, overrides, &out)?;
    for c in &report.checks {
        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    println!("wrote {:?} to {}", report.files, out.display());
    Ok(())
}
