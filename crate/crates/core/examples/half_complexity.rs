//! Cumulative MDL loss on all binary fractions up to a given length, set
//! against half the complexity of the true parameter.
//!
//! cargo run --release --example half_complexity -- [max_len] [horizon] [theta0 ...]

use std::time::Instant;

use mdl_bernoulli::loss::{cumulative_loss, EngineOptions};
use mdl_bernoulli::scenarios::qbstar_class;
use mdl_bernoulli::{Dyadic, Predictor};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let max_len: u32 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(12);
    let horizon: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(100_000);
    let truths: Vec<Dyadic> = if args.len() > 2 {
        args[2..].iter().map(|s| s.parse()).collect::<Result<_, _>>()?
    } else {
        ["1/2", "3/16", "5/32"].iter().map(|s| s.parse().unwrap()).collect()
    };

    let opts = EngineOptions::default();
    for theta0 in truths {
        let class = qbstar_class(max_len, &theta0)?;
        let start = Instant::now();
        let curve = cumulative_loss(&class, Predictor::Mdl, horizon, &opts)?;
        let half = 0.5 * class.kw0();
        println!(
            "theta0={theta0} Kw={} cumulative_lower={:.6} cumulative_upper={:.6} half_kw={half} {} ({:.1?})",
            class.kw0(),
            curve.lower(),
            curve.upper(),
            if curve.lower() <= half { "below" } else { "ABOVE" },
            start.elapsed()
        );
    }
    Ok(())
}
