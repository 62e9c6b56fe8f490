//! Finite binary fractions, their lengths and prefix-code complexities, and
//! the Kraft sum of the code as the length limit grows.
//!
//! cargo run --release --example dyadic_codes -- [max_len]

use mdl_bernoulli::coding::{enumerate_qbstar, kraft_sum_of, kw_example};
use mdl_bernoulli::Dyadic;

fn main() -> anyhow::Result<()> {
    let max_len: u32 = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(4);

    println!("{:>8} {:>10} {:>4} {:>4}", "theta", "bits", "len", "Kw");
    for t in enumerate_qbstar(max_len)? {
        let bits: String = t.to_bits().map(|b| b.iter().map(|d| char::from(b'0' + d)).collect()).unwrap_or_default();
        let bits = if bits.is_empty() { t.to_string() } else { format!("0.{bits}") };
        println!("{:>8} {:>10} {:>4} {:>4}", t.to_string(), bits, t.length(), kw_example(&t));
    }

    // the same value written three ways
    let a: Dyadic = "0.0011".parse()?;
    let b: Dyadic = "3/16".parse()?;
    let c: Dyadic = "3/2^4".parse()?;
    assert!(a == b && b == c);
    println!("0.0011 = 3/16 = 3/2^4, length {}", a.length());

    for len in 1..=14 {
        let kraft = kraft_sum_of(enumerate_qbstar(len)?.iter().map(kw_example));
        println!("max_len={len:2} kraft_sum={kraft:.6}");
    }
    Ok(())
}
