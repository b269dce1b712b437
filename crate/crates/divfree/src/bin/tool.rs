use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use divfree::cli::{self, CliError, Config, Overrides, Scenario};

#[derive(Parser)]
#[command(name = "tool", about = "Run or check divergence-free approximation scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario and write report.json and tables to the output directory.
    Run {
        #[command(flatten)]
        common: Common,
        /// Output directory; defaults to runs/<scenario>.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a config against its grid without running it; prints the problem list.
    Validate {
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Args)]
struct Common {
    #[arg(value_enum)]
    scenario: Scenario,
    /// JSON config; the shipped one for the scenario when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Hölder exponent, overriding the config.
    #[arg(long)]
    gamma: Option<f64>,
}

impl Common {
    fn load(&self) -> Result<Config, CliError> {
        match &self.config {
            Some(p) => Config::load(p),
            None => self.scenario.default_config(),
        }
    }

    fn overrides(&self) -> Overrides {
        Overrides { seed: self.seed, gamma: self.gamma }
    }
}

fn main() -> ExitCode {
    let code = match Cli::parse().command {
        Command::Run { common, out } => {
            let out = out.unwrap_or_else(|| PathBuf::from("runs").join(common.scenario.name()));
            let outcome = common.load().and_then(|c| cli::run(common.scenario, c, common.overrides(), &out));
            match &outcome {
                Ok(report) => {
                    for c in &report.checks {
                        println!("{} {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
                    }
                    println!("report written to {}", out.join("report.json").display());
                }
                Err(e) => eprintln!("error: {e}"),
            }
            cli::exit_code(&outcome)
        }
        Command::Validate { common } => match common.load() {
            Ok(c) => {
                let config = common.overrides().apply(common.scenario, c);
                let report = cli::validate(common.scenario, &config);
                match serde_json::to_string_pretty(&report) {
                    Ok(text) => {
                        println!("{text}");
                        0
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        1
                    }
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                e.exit_code()
            }
        },
    };
    ExitCode::from(code as u8)
}
