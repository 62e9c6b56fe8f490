//! Cumulative loss of MDL on the fair-coin class whose alternatives crowd
//! towards 1/2, split by where the observed fraction falls.
//!
//! cargo run --release --example prop4_lower_bound -- [N] [horizon]

use std::time::Instant;

use mdl_bernoulli::intervals::Partition;
use mdl_bernoulli::loss::{interval_contributions, EngineOptions, WindowPolicy};
use mdl_bernoulli::scenarios::prop4_class;
use mdl_bernoulli::Predictor;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n: u32 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(3);
    let horizon: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(1 << 18);

    let class = prop4_class(n, None)?;
    let partition = Partition::prop4(n)?;
    let opts = EngineOptions::with_window(WindowPolicy::Hoeffding);
    let start = Instant::now();
    let (curve, contrib) = interval_contributions(&class, Predictor::Mdl, horizon, &opts, &partition)?;

    let bound = ((1u64 << n) as f64 - 5.0) / 84.0;
    println!("N={n} horizon={horizon} threads={} time={:.1?}", opts.threads, start.elapsed());
    println!("cumulative_lower={:.6} cumulative_upper={:.6} bound={bound:.6}", curve.lower(), curve.upper());
    for (k, c) in contrib.by_observation().iter().enumerate() {
        println!("  C({k}) = {c:.6}{}", if *c > 1.0 / 84.0 { "  > 1/84" } else { "" });
    }
    Ok(())
}
