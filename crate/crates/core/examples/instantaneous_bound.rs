//! Per-step expected loss of MDL and ML next to the logarithmic
//! instantaneous bound, which holds even where the cumulative loss is large.
//!
//! cargo run --release --example instantaneous_bound -- [horizon]

use mdl_bernoulli::loss::{cumulative_loss, instantaneous_bound, instantaneous_bound_violations, EngineOptions, WindowPolicy};
use mdl_bernoulli::scenarios::{prop4_class, qbstar_class};
use mdl_bernoulli::Predictor;

fn main() -> anyhow::Result<()> {
    let horizon: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(10_000);
    let opts = EngineOptions::with_window(WindowPolicy::Full);

    for (name, class) in [("prop4 N=3", prop4_class(3, None)?), ("qbstar L10 3/16", qbstar_class(10, &"3/16".parse()?)?)] {
        for pred in [Predictor::Mdl, Predictor::Ml] {
            let kw0 = if pred == Predictor::Ml { 0.0 } else { class.kw0() };
            let curve = cumulative_loss(&class, pred, horizon, &opts)?;
            println!("{name} {pred}: violations={}", instantaneous_bound_violations(&curve, kw0).len());
            let mut n = 4;
            while n <= horizon {
                let p = curve.points[n as usize - 1];
                println!("  n={n:6} loss={:.3e} bound={:.3e}", p.window_loss, instantaneous_bound(kw0, n));
                n *= 4;
            }
        }
    }
    Ok(())
}
