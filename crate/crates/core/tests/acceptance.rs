//! End-to-end acceptance run: one PASS/FAIL line per criterion.
//!
//! Built with `harness = false` so the verdict lines are always printed.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mdl_bernoulli::experiment::{lemma3_grid, oracle_scenarios, LEMMA2_THETAS};
use mdl_bernoulli::info::{check_lemma1, check_lemma2, check_lemma3, lemma1_random_grid, InequalityReport};
use mdl_bernoulli::intervals::{
    build_construction, check_construction, condition14_check, corollary9_bound_params, random_truths, HalfOpen,
    Partition, Polynomial, StepType,
};
use mdl_bernoulli::loss::{
    self, cumulative_loss, instantaneous_bound_violations, interval_contributions, EngineOptions, LossCurve,
    WindowPolicy,
};
use mdl_bernoulli::scenarios::{prop4_class, qbstar_class};
use mdl_bernoulli::{Dyadic, Predictor};

type Verdict = anyhow::Result<(bool, String)>;

fn d(s: &str) -> Dyadic {
    s.parse().expect("dyadic literal")
}

fn opts(window: WindowPolicy, threads: usize) -> EngineOptions {
    EngineOptions::with_window(window).threads(threads)
}

fn csv_bytes(curve: &LossCurve, label: &str) -> anyhow::Result<Vec<u8>> {
    let mut buf = Vec::new();
    curve.write_csv(&mut buf, label)?;
    Ok(buf)
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed <= Duration::from_secs(limit_secs)
}

/// Curve CSVs of the determinism-checked runs, at one thread.
#[derive(Default)]
struct Artifacts {
    prop4: Option<Vec<u8>>,
    half_kw: Vec<(Dyadic, Vec<u8>)>,
}

const PROP4_HORIZON: u64 = 1 << 18;
const HALF_KW_HORIZON: u64 = 100_000;
const HALF_KW_TRUTHS: [&str; 3] = ["1/2", "3/16", "5/32"];

fn prop4_run(threads: usize) -> anyhow::Result<(LossCurve, loss::Contributions)> {
    let class = prop4_class(3, None)?;
    let partition = Partition::prop4(3)?;
    Ok(interval_contributions(&class, Predictor::Mdl, PROP4_HORIZON, &opts(WindowPolicy::Hoeffding, threads), &partition)?)
}

fn criteria_1_2(art: &mut Artifacts) -> (Verdict, Verdict) {
    let start = Instant::now();
    let run = match prop4_run(1) {
        Ok(r) => r,
        Err(e) => return (Err(anyhow::anyhow!("{e}")), Err(e)),
    };
    let elapsed = start.elapsed();
    let (curve, contrib) = run;
    let bound = 3.0 / 84.0;
    let c1 = Ok((
        curve.lower() >= bound && within(elapsed, 600),
        format!("cumulative_lower={:.6} >= {bound:.6}, {elapsed:.1?}", curve.lower()),
    ));
    let c = contrib.by_observation();
    let total: f64 = c.iter().sum();
    let per_interval = [5, 6, 7].iter().all(|&k| c[k] > 1.0 / 84.0);
    let sum_ok = (total - curve.lower()).abs() <= 1e-9;
    let c2 = Ok((
        per_interval && sum_ok,
        format!(
            "C(5)={:.6} C(6)={:.6} C(7)={:.6} > {:.6}; |sum C - cumulative_lower|={:.2e}",
            c[5],
            c[6],
            c[7],
            1.0 / 84.0,
            (total - curve.lower()).abs()
        ),
    ));
    art.prop4 = csv_bytes(&curve, "prop4-N3").ok();
    (c1, c2)
}

fn criterion_3() -> Verdict {
    let start = Instant::now();
    let mut notes = Vec::new();
    let mut ok = true;
    for class in [prop4_class(3, None)?, qbstar_class(10, &d("3/16"))?] {
        let curve = cumulative_loss(&class, Predictor::Mdl, 10_000, &opts(WindowPolicy::Full, 1))?;
        let v = instantaneous_bound_violations(&curve, class.kw0());
        ok &= v.is_empty();
        notes.push(format!("theta0={} kw0={} violations={}", class.theta0(), class.kw0(), v.len()));
    }
    let elapsed = start.elapsed();
    Ok((ok && within(elapsed, 120), format!("{}, {elapsed:.1?}", notes.join("; "))))
}

fn criterion_4() -> Verdict {
    let start = Instant::now();
    let class = qbstar_class(8, &d("1/2"))?;
    let bound = 3.0 * std::f64::consts::LN_2;
    let curve = cumulative_loss(&class, Predictor::Bayes, 10_000, &opts(WindowPolicy::Full, 1))?;
    let every_n = curve.cumulative_upper.iter().all(|&s| s <= bound);
    let elapsed = start.elapsed();
    Ok((
        class.kw0() == 3.0 && class.kraft_sum() <= 1.0 && every_n && within(elapsed, 120),
        format!(
            "kw0={} kraft_sum={:.6} max partial sum={:.6} <= {bound:.6}, {elapsed:.1?}",
            class.kw0(),
            class.kraft_sum(),
            curve.upper()
        ),
    ))
}

fn half_kw_run(theta0: &Dyadic, threads: usize) -> anyhow::Result<(LossCurve, f64)> {
    let class = qbstar_class(12, theta0)?;
    let curve = cumulative_loss(&class, Predictor::Mdl, HALF_KW_HORIZON, &opts(WindowPolicy::Auto, threads))?;
    Ok((curve, class.kw0()))
}

fn criterion_5(art: &mut Artifacts) -> Verdict {
    let mut notes = Vec::new();
    let mut ok = true;
    for t in HALF_KW_TRUTHS {
        let theta0 = d(t);
        let (curve, kw0) = half_kw_run(&theta0, 1)?;
        ok &= curve.lower() <= 0.5 * kw0;
        notes.push(format!("theta0={t}: {:.6} <= {}", curve.lower(), 0.5 * kw0));
        art.half_kw.push((theta0.clone(), csv_bytes(&curve, &format!("qbstar-L12-{t}"))?));
    }
    Ok((ok, notes.join("; ")))
}

fn all_pass(reports: &[InequalityReport]) -> (bool, usize, usize) {
    let grid = reports.iter().map(|r| r.grid_size).sum();
    let violations = reports.iter().map(|r| r.violations).sum();
    (reports.iter().all(InequalityReport::passed), grid, violations)
}

fn criterion_6() -> Verdict {
    let l1 = check_lemma1(&lemma1_random_grid(10_000, 1));
    let enough = l1.iter().all(|r| r.grid_size >= 10_000);
    let l2 = check_lemma2(2000, &LEMMA2_THETAS);
    let l3 = check_lemma3(&lemma3_grid())?;
    let (p1, g1, v1) = all_pass(&l1);
    let (p2, g2, v2) = all_pass(&l2);
    let (p3, g3, v3) = all_pass(&l3);
    Ok((
        p1 && enough && p2 && p3,
        format!("lemma1 {v1}/{g1} violations; lemma2 {v2}/{g2}; lemma3 {v3}/{g3}"),
    ))
}

fn criterion_7() -> Verdict {
    let iv = |l: &str, r: &str| HalfOpen::new(d(l), d(r));
    let steps = build_construction(&d("3/16"), 4)?;
    use StepType::{Center as C, Left as L};
    let types: Vec<StepType> = steps.iter().map(|s| s.step).collect();
    // worked by hand from the 3/8, 5/8 band rule
    let expected = [
        (iv("0", "1/2"), vec![iv("1/2", "1")]),
        (iv("1/8", "3/8"), vec![iv("0", "1/8"), iv("3/8", "1/2")]),
        (iv("1/8", "1/4"), vec![iv("1/4", "3/8")]),
        (iv("5/32", "7/32"), vec![iv("1/8", "5/32"), iv("7/32", "1/4")]),
    ];
    let figure = types == [L, C, L, C] && steps.iter().zip(&expected).all(|(s, (j, i))| s.j == *j && s.i == *i);
    let reports = check_construction(&random_truths(100, 10, 2024), 20)?;
    let (p, g, v) = all_pass(&reports);
    let t: String = types.iter().map(|s| s.to_string()).collect();
    Ok((figure && p, format!("steps={t} figure endpoints {}; invariants {v}/{g} violations", if figure { "match" } else { "differ" })))
}

fn criterion_8() -> Verdict {
    let mut ok = true;
    let mut notes = Vec::new();
    for t in ["1/2", "3/16"] {
        let r = condition14_check(&qbstar_class(10, &d(t))?, 1.0, 0.0, 24)?;
        ok &= r.passed;
        notes.push(format!("qbstar theta0={t} passed={} checked={}", r.passed, r.checked.len()));
    }
    let p4 = prop4_class(3, None)?;
    let r = condition14_check(&p4, 1.0, 0.0, 24)?;
    let witness = r.witness.map(|(k, i)| (k, p4.value(i), p4.kw(i)));
    ok &= !r.passed && witness.is_some();
    notes.push(format!("prop4 passed={} witness={witness:?}", r.passed));

    let id = corollary9_bound_params(&Polynomial::new(vec![0.0, 1.0]), 0.375, 0.1)?;
    let sq = corollary9_bound_params(&Polynomial::new(vec![0.0, 0.0, 1.0]), 0.5, 0.125)?;
    let cube = corollary9_bound_params(&Polynomial::new(vec![0.375, 0.75, -1.5, 1.0]), 0.5, 0.125)?;
    let close = |x: f64, y: f64| (x - y).abs() <= 1e-12;
    let cor9 = (id.order, id.a) == (1, 1.0)
        && close(id.c, 1.0)
        && close(id.b, 1.0)
        && (sq.order, sq.a) == (1, 1.0)
        && close(sq.c, 0.75)
        && (cube.order, cube.a) == (3, 3.0)
        && close(cube.c, 6.0);
    ok &= cor9;
    notes.push(format!("cor9 (n,c): ({},{}) ({},{}) ({},{})", id.order, id.c, sq.order, sq.c, cube.order, cube.c));
    Ok((ok, notes.join("; ")))
}

fn criterion_9() -> Verdict {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for spec in oracle_scenarios()? {
        let s = spec.resolve()?;
        for p in Predictor::ALL {
            for row in loss::oracle_agreement(&s.class, p, 32)? {
                worst = worst.max(row.rel_error);
                cases += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Ok((worst <= 1e-10 && within(elapsed, 60), format!("{cases} cases, max relative error {worst:.2e}, {elapsed:.1?}")))
}

fn criterion_10(art: &Artifacts) -> Verdict {
    let mut same = true;
    let base = art.prop4.as_ref().ok_or_else(|| anyhow::anyhow!("criterion 1 produced no curve"))?;
    let (curve, _) = prop4_run(8)?;
    same &= *base == csv_bytes(&curve, "prop4-N3")?;
    if art.half_kw.len() != HALF_KW_TRUTHS.len() {
        anyhow::bail!("criterion 5 produced no curves");
    }
    for (theta0, bytes) in &art.half_kw {
        let (curve, _) = half_kw_run(theta0, 8)?;
        same &= *bytes == csv_bytes(&curve, &format!("qbstar-L12-{theta0}"))?;
    }
    Ok((same, format!("{} CSVs compared at 1 and 8 threads", 1 + art.half_kw.len())))
}

fn main() -> ExitCode {
    // `cargo test` passes harness flags such as filters; a filter that does
    // not name this target skips the run.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if args.iter().any(|a| !"acceptance".contains(a.as_str())) {
        return ExitCode::SUCCESS;
    }
    let mut art = Artifacts::default();
    let mut results: Vec<(u32, Verdict)> = Vec::new();
    let (c1, c2) = criteria_1_2(&mut art);
    results.push((1, c1));
    results.push((2, c2));
    results.push((3, criterion_3()));
    results.push((4, criterion_4()));
    results.push((5, criterion_5(&mut art)));
    results.push((6, criterion_6()));
    results.push((7, criterion_7()));
    results.push((8, criterion_8()));
    results.push((9, criterion_9()));
    results.push((10, criterion_10(&art)));

    let mut failed = 0;
    for (id, r) in results {
        let (pass, detail) = match r {
            Ok(v) => v,
            Err(e) => (false, format!("error: {e:#}")),
        };
        if !pass {
            failed += 1;
        }
        println!("criterion {id}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
