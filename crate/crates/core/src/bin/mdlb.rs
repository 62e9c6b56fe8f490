use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use mdl_bernoulli::experiment::{run_checks, run_loss, ExperimentConfig, RawConfig};

#[derive(Parser)]
#[command(name = "mdlb", version, about = "Exact expected losses of MDL, Bayes and ML prediction on Bernoulli classes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Loss curve for a scenario, written as CSV, with bound comparisons.
    #[command(alias = "run_loss", alias = "run-loss")]
    Loss(Common),
    /// One check suite (lemma1, lemma2, lemma3, intervals, condition14, oracle).
    #[command(alias = "run_checks", alias = "run-checks")]
    Check(Common),
}

/// Flags override values from the config file.
#[derive(Args)]
struct Common {
    /// Flat key = value config file.
    #[arg(long, short)]
    config: Option<PathBuf>,
    #[arg(long)]
    scenario: Option<String>,
    #[arg(long)]
    predictor: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    /// full, hoeffding or auto.
    #[arg(long)]
    window: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    #[arg(long)]
    threads: Option<String>,
    #[arg(long)]
    suite: Option<String>,
    /// Any other config key, e.g. `--set N=3`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn config(&self) -> Result<ExperimentConfig> {
        let mut raw = match &self.config {
            Some(path) => RawConfig::from_file(path)?,
            None => RawConfig::default(),
        };
        for pair in &self.set {
            raw.set_pair(pair)?;
        }
        let flags = [
            ("scenario", &self.scenario),
            ("predictor", &self.predictor),
            ("horizon", &self.horizon),
            ("window", &self.window),
            ("out", &self.out),
            ("threads", &self.threads),
            ("suite", &self.suite),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                raw.set(key, v)?;
            }
        }
        Ok(ExperimentConfig::from_raw(&raw)?)
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Loss(c) => {
            let outcome = run_loss(&c.config()?).context("loss run failed")?;
            for line in outcome.summary_lines() {
                println!("{line}");
            }
            Ok(outcome.passed())
        }
        Command::Check(c) => {
            let config = c.config()?;
            let suite = config.suite.context("check needs --suite")?;
            let outcome = run_checks(&config, suite).with_context(|| format!("suite {suite} failed to run"))?;
            for line in outcome.summary_lines() {
                println!("{line}");
            }
            Ok(outcome.passed())
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
