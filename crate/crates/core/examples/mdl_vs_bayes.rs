//! MDL, Bayes mixture and maximum likelihood on the same class, with the
//! mixture's cumulative loss compared against `Kw(θ₀)·ln 2`.
//!
//! cargo run --release --example mdl_vs_bayes -- [max_len] [theta0] [horizon]

use std::time::Instant;

use mdl_bernoulli::loss::{cumulative_loss, EngineOptions, WindowPolicy};
use mdl_bernoulli::scenarios::qbstar_class;
use mdl_bernoulli::{Dyadic, Predictor};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let max_len: u32 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(8);
    let theta0: Dyadic = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or_else(|| "1/2".parse().unwrap());
    let horizon: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(10_000);

    let class = qbstar_class(max_len, &theta0)?;
    println!("{} parameters, theta0={theta0}, Kw(theta0)={}, kraft sum={}", class.len(), class.kw0(), class.kraft_sum());
    let opts = EngineOptions::with_window(WindowPolicy::Full);
    for predictor in Predictor::ALL {
        let start = Instant::now();
        let curve = cumulative_loss(&class, predictor, horizon, &opts)?;
        println!("{predictor:>5}: cumulative loss through n={horizon} is {:.6} ({:.1?})", curve.lower(), start.elapsed());
        if predictor == Predictor::Bayes {
            let bound = class.kw0() * std::f64::consts::LN_2;
            let worst = curve.cumulative_upper.iter().cloned().fold(0.0, f64::max);
            println!("       mixture bound Kw·ln2 = {bound:.6}, largest partial sum {worst:.6}");
        }
    }
    Ok(())
}
