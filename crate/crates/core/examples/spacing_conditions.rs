//! Whether cheap parameters keep their distance from the truth, on the
//! binary-fraction class and on the crowded fair-coin class, and the spacing
//! parameters of a few smooth distortions of the binary fractions.
//!
//! cargo run --release --example spacing_conditions -- [a] [b]

use mdl_bernoulli::intervals::{condition14_check, corollary9_bound_params, Polynomial};
use mdl_bernoulli::scenarios::{distorted_class, prop4_class, qbstar_class};
use mdl_bernoulli::Dyadic;

fn main() -> anyhow::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let a: f64 = args.first().map(|s| s.parse()).transpose()?.unwrap_or(1.0);
    let b: f64 = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(0.0);

    for (name, class) in [
        ("qbstar L10 theta0=1/2", qbstar_class(10, &"1/2".parse()?)?),
        ("qbstar L10 theta0=3/16", qbstar_class(10, &"3/16".parse()?)?),
        ("prop4 N=3", prop4_class(3, None)?),
    ] {
        let r = condition14_check(&class, a, b, 24)?;
        let witness = r.witness.map(|(k, i)| format!(" witness k={k} theta={} Kw={}", class.value(i), class.kw(i)));
        println!("{name}: passed={} checked={} vacuous={}{}", r.passed, r.checked.len(), r.vacuous.len(), witness.unwrap_or_default());
    }

    for (name, coeffs, t0, eps) in [
        ("t", vec![0.0, 1.0], "3/8", 0.1),
        ("t^2", vec![0.0, 0.0, 1.0], "1/2", 0.125),
        ("(t-1/2)^3+1/2", vec![0.375, 0.75, -1.5, 1.0], "1/2", 0.125),
    ] {
        let poly = Polynomial::new(coeffs);
        let t0d: Dyadic = t0.parse()?;
        let p = corollary9_bound_params(&poly, t0d.to_f64(), eps)?;
        let (class, _) = distorted_class(&poly, 8, &t0d, eps)?;
        let r = condition14_check(&class, p.a, p.b, 24)?;
        println!(
            "phi={name} t0={t0}: order={} c={} a={} b={:.4}, class size {} condition passed={}",
            p.order,
            p.c,
            p.a,
            p.b,
            class.len(),
            r.passed
        );
    }
    Ok(())
}
