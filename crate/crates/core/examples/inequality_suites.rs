//! Numerical sweeps of the entropy, binomial and series inequalities,
//! printed as the same reports the `check` command writes.
//!
//! cargo run --release --example inequality_suites -- [n_max] [seed]

use mdl_bernoulli::experiment::{lemma3_grid, LEMMA2_THETAS};
use mdl_bernoulli::info::{
    check_lemma1, check_lemma2, check_lemma3, kl, lemma1_random_grid, series, write_reports_csv, SeriesKind,
};

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n_max: u64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(500);
    let seed: u64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(1);

    println!("D(0.3 || 0.5) = {:.12}", kl(0.3, 0.5).value);
    println!("D(0.3 || 0)   = {}", kl(0.3, 0.0).value);
    let s = series(SeriesKind::SqrtWeighted, 0.5)?;
    println!("sum sqrt(n) e^(-n/4) = {:.12} + [0, {:.1e}] ({} terms)", s.partial_sum, s.tail_bound, s.terms);

    let mut reports = check_lemma1(&lemma1_random_grid(2_000, seed));
    reports.extend(check_lemma2(n_max, &LEMMA2_THETAS));
    reports.extend(check_lemma3(&lemma3_grid())?);
    write_reports_csv(std::io::stdout(), &reports)?;
    Ok(())
}
