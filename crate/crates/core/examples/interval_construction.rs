//! The nested dyadic intervals around a true parameter, the complexity gaps
//! between each complement and its interval, and the resulting bound term.
//!
//! cargo run --release --example interval_construction -- [theta0] [k_max] [max_len]

use mdl_bernoulli::intervals::{build_construction, delta_profile, theorem6_rhs, write_construction_csv};
use mdl_bernoulli::scenarios::qbstar_class;
use mdl_bernoulli::Dyadic;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let theta0: Dyadic = args.first().map(|s| s.parse()).transpose()?.unwrap_or("3/16".parse()?);
    let k_max: u32 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(6);
    let max_len: u32 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(10);

    let steps = build_construction(&theta0, k_max)?;
    write_construction_csv(std::io::stdout(), &steps)?;

    let class = qbstar_class(max_len.max(theta0.length()), &theta0)?;
    let profile = delta_profile(&class, k_max)?;
    println!();
    for e in &profile.entries {
        let name = |i: Option<usize>| i.map(|i| format!("{} (Kw {})", class.value(i), class.kw(i))).unwrap_or("-".into());
        println!("k={:2} cheapest in I: {:<16} in J: {:<16} gap={}", e.k, name(e.theta_i), name(e.theta_j), e.delta);
    }
    let rhs = theorem6_rhs(&profile, class.kw0());
    println!("Kw(theta0) + sum of gap terms = {:.6} (last term {:.2e})", rhs.value, rhs.last_increment);
    Ok(())
}
