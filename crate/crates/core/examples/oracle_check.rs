//! The fast loss engine against exact rational arithmetic on small classes.
//!
//! cargo run --release --example oracle_check -- [n_max]

use mdl_bernoulli::experiment::oracle_scenarios;
use mdl_bernoulli::loss::{oracle_agreement, oracle_expected_loss};
use mdl_bernoulli::scenarios::prop4_class;
use mdl_bernoulli::Predictor;

fn main() -> anyhow::Result<()> {
    let n_max: u64 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(32);

    let class = prop4_class(2, None)?;
    println!("exact MDL loss on prop4-N2 at n=5: {}", oracle_expected_loss(&class, Predictor::Mdl, 5)?);

    for spec in oracle_scenarios()? {
        let s = spec.resolve()?;
        for p in Predictor::ALL {
            let rows = oracle_agreement(&s.class, p, n_max)?;
            let worst = rows.iter().max_by(|a, b| a.rel_error.total_cmp(&b.rel_error)).expect("n_max >= 1");
            println!("{:<16} {:<5} max rel error {:.2e} at n={}", s.label, p.to_string(), worst.rel_error, worst.n);
        }
    }
    Ok(())
}
