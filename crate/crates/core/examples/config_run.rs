//! Drives a loss run and a check suite from a config string, the same way
//! the `mdlb` binary does from a file.
//!
//! cargo run --release --example config_run -- [out_dir]

use mdl_bernoulli::experiment::{run_checks, run_loss, ExperimentConfig, RawConfig, Suite};

const CONFIG: &str = r#"
# Bayes mixture on the binary fractions of length <= 8
scenario = "qbstar", max_len = 8, theta0 = 1/2
predictor = bayes
horizon = 10000
window = full
"#;

fn main() -> anyhow::Result<()> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "out".into());
    let mut raw = RawConfig::parse(CONFIG)?;
    raw.set("out", &out)?;
    let config = ExperimentConfig::from_raw(&raw)?;

    let loss = run_loss(&config)?;
    for line in loss.summary_lines() {
        println!("{line}");
    }
    let checks = run_checks(&config, Suite::Intervals)?;
    for line in checks.summary_lines() {
        println!("{line}");
    }
    Ok(())
}
