//! Information-theoretic primitives and the inequality suites built on them.
//!
//! Divergences are in nats. Three families of inequalities are checked
//! numerically over grids, each producing an [`InequalityReport`]:
//!
//! * entropy inequalities sandwiching `D(θ‖θ̃)` between multiples of
//!   `(θ - θ̃)²`;
//! * Stirling envelopes around the binomial probability `p(k/n | n)`;
//! * integral estimates for `Σ √n e^{-z²n}` and `Σ n^{-1/2} e^{-z²n}`.

use std::f64::consts::{LN_2, PI};
use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{log1pmx, CompensatedSum};

/// Relative slack below which an inequality counts as violated.
pub const SLACK_TOLERANCE: f64 = -1e-12;

/// Kullback-Leibler divergence `D(α‖θ)` in nats, with the flags recording
/// which boundary conventions were needed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KlValue {
    pub value: f64,
    /// `0 · ln 0 = 0` was applied to at least one term.
    pub zero_times_log_zero: bool,
    /// Some term was `x · ln(x / 0)` with `x > 0`.
    pub infinite: bool,
}

impl KlValue {
    pub fn is_finite(&self) -> bool {
        !self.infinite
    }
}

fn kl_term(x: f64, y: f64, flags: &mut KlValue) -> f64 {
    if x == 0.0 {
        flags.zero_times_log_zero = true;
        0.0
    } else if y == 0.0 {
        flags.infinite = true;
        f64::INFINITY
    } else {
        x * (x / y).ln()
    }
}

/// `D(α‖θ) = α ln(α/θ) + (1-α) ln((1-α)/(1-θ))`.
///
/// In the interior the near-diagonal case is evaluated as
/// `α·g(u) + (1-α)·g(v) + (α-θ)²/(θ(1-θ))` with `g(x) = ln(1+x) - x`, which
/// keeps full relative accuracy when `α ≈ θ`.
pub fn kl(alpha: f64, theta: f64) -> KlValue {
    debug_assert!((0.0..=1.0).contains(&alpha) && (0.0..=1.0).contains(&theta));
    let mut out = KlValue { value: 0.0, zero_times_log_zero: false, infinite: false };
    if alpha == theta {
        return out;
    }
    let interior = alpha > 0.0 && alpha < 1.0 && theta > 0.0 && theta < 1.0;
    let diff = alpha - theta;
    if interior && diff.abs() <= 0.5 * theta.min(1.0 - theta) {
        let u = diff / theta;
        let v = -diff / (1.0 - theta);
        out.value = alpha * log1pmx(u) + (1.0 - alpha) * log1pmx(v) + diff * diff / (theta * (1.0 - theta));
        out.value = out.value.max(0.0);
        return out;
    }
    let a = kl_term(alpha, theta, &mut out);
    let b = kl_term(1.0 - alpha, 1.0 - theta, &mut out);
    out.value = if out.infinite { f64::INFINITY } else { (a + b).max(0.0) };
    out
}

/// Pass/fail record for one inequality over a verification grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lemma: String,
    pub statement: String,
    pub grid_size: usize,
    pub violations: usize,
    /// Smallest relative slack `(bound side - other side) / magnitude`.
    pub worst_slack: f64,
}

impl InequalityReport {
    pub fn new(lemma: &str, statement: &str) -> Self {
        Self {
            lemma: lemma.to_string(),
            statement: statement.to_string(),
            grid_size: 0,
            violations: 0,
            worst_slack: f64::INFINITY,
        }
    }

    /// Records a point with signed relative slack.
    pub fn record(&mut self, slack: f64) {
        self.grid_size += 1;
        if slack.is_nan() || slack < SLACK_TOLERANCE {
            self.violations += 1;
        }
        if slack.is_nan() {
            self.worst_slack = f64::NEG_INFINITY;
        } else {
            self.worst_slack = self.worst_slack.min(slack);
        }
    }

    /// Records `lhs <= rhs`.
    pub fn record_le(&mut self, lhs: f64, rhs: f64) {
        self.record(relative_slack(lhs, rhs));
    }

    /// Order-independent merge of two partial reports on the same statement.
    pub fn merge(&mut self, other: &Self) {
        self.grid_size += other.grid_size;
        self.violations += other.violations;
        self.worst_slack = self.worst_slack.min(other.worst_slack);
    }

    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

fn relative_slack(lhs: f64, rhs: f64) -> f64 {
    if lhs == rhs {
        return 0.0;
    }
    if rhs == f64::INFINITY || lhs == f64::NEG_INFINITY {
        return f64::INFINITY;
    }
    let scale = lhs.abs().max(rhs.abs());
    (rhs - lhs) / scale
}

/// Writes reports as CSV rows `lemma,statement,grid_size,violations,worst_slack`.
pub fn write_reports_csv<W: Write>(out: W, reports: &[InequalityReport]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in reports {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

// --- entropy inequalities -------------------------------------------------

pub const LEMMA1_STATEMENTS: [&str; 6] = ["i", "ii", "iii", "iii-sym", "iv", "iv-sym"];

/// The argument closer to `1/2`; ties go to `theta`.
fn closer_to_half(theta: f64, theta_t: f64) -> f64 {
    if (theta_t - 0.5).abs() < (theta - 0.5).abs() { theta_t } else { theta }
}

fn in_unit_open(x: f64) -> bool {
    x > 0.0 && x < 1.0
}

/// Which entropy-inequality statements apply to `(θ, θ̃)`.
pub fn lemma1_domains(theta: f64, theta_t: f64) -> [bool; 6] {
    if !in_unit_open(theta) || !in_unit_open(theta_t) {
        return [false; 6];
    }
    let q = 0.25..=0.75;
    let sym = 1.0 - theta;
    [
        true,
        q.contains(&theta) && q.contains(&theta_t),
        theta <= 0.5 && theta_t <= 0.5,
        theta >= 0.5 && theta_t >= 0.5,
        theta <= 0.25 && theta_t >= theta / 3.0 && theta_t <= 3.0 * theta,
        theta >= 0.75 && theta_t >= 1.0 - 3.0 * sym && theta_t <= 1.0 - sym / 3.0,
    ]
}

/// Checks every applicable statement at every grid point. Points outside a
/// statement's domain are excluded from that statement's report.
pub fn check_lemma1(grid: &[(f64, f64)]) -> Vec<InequalityReport> {
    let mut reports: Vec<_> = LEMMA1_STATEMENTS.iter().map(|s| InequalityReport::new("lemma1", s)).collect();
    for &(theta, theta_t) in grid {
        let dom = lemma1_domains(theta, theta_t);
        if !dom.iter().any(|&b| b) {
            continue;
        }
        let d = kl(theta, theta_t).value;
        let sq = (theta - theta_t) * (theta - theta_t);
        let star = closer_to_half(theta, theta_t);
        let var = 2.0 * star * (1.0 - star);
        if dom[0] {
            reports[0].record_le(2.0 * sq, d);
        }
        if dom[1] {
            reports[1].record_le(d, 8.0 / 3.0 * sq);
        }
        for i in [2, 3] {
            if dom[i] {
                reports[i].record_le(sq / var, d);
            }
        }
        for i in [4, 5] {
            if dom[i] {
                reports[i].record_le(d, 3.0 * sq / var);
            }
        }
    }
    reports
}

/// Random pairs drawn from each statement's domain, `per_statement` each.
pub fn lemma1_random_grid(per_statement: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let open = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| loop {
        let x = rng.gen_range(lo..=hi);
        if in_unit_open(x) {
            return x;
        }
    };
    let mut grid = Vec::with_capacity(6 * per_statement);
    for _ in 0..per_statement {
        grid.push((open(&mut rng, 0.0, 1.0), open(&mut rng, 0.0, 1.0)));
        grid.push((rng.gen_range(0.25..=0.75), rng.gen_range(0.25..=0.75)));
        grid.push((open(&mut rng, 0.0, 0.5), open(&mut rng, 0.0, 0.5)));
        grid.push((open(&mut rng, 0.5, 1.0), open(&mut rng, 0.5, 1.0)));
        let t = open(&mut rng, 0.0, 0.25);
        grid.push((t, rng.gen_range(t / 3.0..=3.0 * t)));
        let t = open(&mut rng, 0.75, 1.0);
        let s = 1.0 - t;
        let lo = (1.0 - 3.0 * s).max(f64::MIN_POSITIVE);
        grid.push((t, open(&mut rng, lo, 1.0 - s / 3.0)));
    }
    grid
}

// --- binomial probabilities -----------------------------------------------

/// `ln(n!) - ln(√(2πn) (n/e)^n)` for integers.
fn stirling_error(n: u64) -> f64 {
    const TABLE: [f64; 16] = [
        0.0,
        0.0810614667953272582196702,
        0.0413406959554092940938221,
        0.02767792568499833914878929,
        0.02079067210376509311152277,
        0.01664469118982119216319487,
        0.01387612882307074799874573,
        0.01189670994589177009505572,
        0.010411265261972096497478567,
        0.009255462182712732917728637,
        0.008330563433362871256469318,
        0.007573675487951840794972024,
        0.006942840107209529865664152,
        0.006408994188004207068439631,
        0.005951370112758847735624416,
        0.005554733551962801371038690,
    ];
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < 16 {
        return TABLE[n as usize];
    }
    let x = n as f64;
    let xx = x * x;
    (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
}

/// Deviance `x ln(x/m) + m - x`, accurate when `x ≈ m`.
fn deviance(x: f64, m: f64) -> f64 {
    if x == 0.0 {
        return m;
    }
    let t = (m - x) / x;
    if t.abs() > 0.5 {
        return x * (x / m).ln() + m - x;
    }
    // with m/x = 1 + t: x ln(x/m) + m - x = -x (ln(1+t) - t)
    -x * log1pmx(t)
}

/// `ln p(k/n | n)` for true parameter `theta0`, with Stirling-error
/// corrections and deviance terms so large `n` keeps relative accuracy.
pub fn ln_binom_pmf(n: u64, k: u64, theta0: f64) -> f64 {
    debug_assert!(k <= n);
    if theta0 == 0.0 {
        return if k == 0 { 0.0 } else { f64::NEG_INFINITY };
    }
    if theta0 == 1.0 {
        return if k == n { 0.0 } else { f64::NEG_INFINITY };
    }
    if k == 0 {
        return n as f64 * (-theta0).ln_1p();
    }
    if k == n {
        return n as f64 * theta0.ln();
    }
    let nf = n as f64;
    let kf = k as f64;
    let rest = nf - kf;
    let lc = stirling_error(n) - stirling_error(k) - stirling_error(n - k)
        - deviance(kf, nf * theta0)
        - deviance(rest, nf * (1.0 - theta0));
    let lf = (2.0 * PI).ln() + kf.ln() + (-kf / nf).ln_1p();
    lc - 0.5 * lf
}

/// `C(n,k) θ₀^k (1-θ₀)^(n-k)`, computed in the log domain.
pub fn binom_pmf(n: u64, k: u64, theta0: f64) -> f64 {
    ln_binom_pmf(n, k, theta0).exp()
}

/// Checks both Stirling envelopes for `2 <= n <= n_max`, `1 <= k <= n-1`.
/// Slack is the log-ratio between envelope and probability.
pub fn check_lemma2(n_max: u64, theta0s: &[f64]) -> Vec<InequalityReport> {
    let mut upper = InequalityReport::new("lemma2", "upper");
    let mut lower = InequalityReport::new("lemma2", "lower");
    for &theta0 in theta0s {
        let parts: Vec<(InequalityReport, InequalityReport)> = (2..=n_max)
            .into_par_iter()
            .map(|n| {
                let mut up = InequalityReport::new("lemma2", "upper");
                let mut lo = InequalityReport::new("lemma2", "lower");
                let nf = n as f64;
                for k in 1..n {
                    let alpha = k as f64 / nf;
                    let lp = ln_binom_pmf(n, k, theta0);
                    let expo = -nf * kl(alpha, theta0).value;
                    let var = alpha * (1.0 - alpha) * nf;
                    let ln_up = expo - 0.5 * (2.0 * PI * var).ln();
                    let ln_lo = expo - 0.5 * (8.0 * var).ln();
                    up.record(ln_up - lp);
                    lo.record(lp - ln_lo);
                }
                (up, lo)
            })
            .collect();
        for (u, l) in &parts {
            upper.merge(u);
            lower.merge(l);
        }
    }
    vec![upper, lower]
}

// --- integral estimates ---------------------------------------------------

/// Target bound on the omitted tail of the series.
pub const SERIES_TAIL_TARGET: f64 = 1e-15;
/// Largest number of terms a series evaluation may take.
pub const SERIES_MAX_TERMS: f64 = 1e9;

/// A truncated series with a certified bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub partial_sum: f64,
    pub tail_bound: f64,
    pub terms: u64,
}

/// Which of the two series.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `Σ_{n>=1} √n e^{-z²n}`
    SqrtWeighted,
    /// `Σ_{n>=1} n^{-1/2} e^{-z²n}`
    InvSqrtWeighted,
}

impl SeriesKind {
    fn term(self, n: f64, z2: f64) -> f64 {
        match self {
            Self::SqrtWeighted => n.sqrt() * (-z2 * n).exp(),
            Self::InvSqrtWeighted => (-z2 * n).exp() / n.sqrt(),
        }
    }

    /// Bound on `Σ_{m>n} term(m)` via the ratio of consecutive terms, which
    /// for `m >= n + 1` is at most `ρ = √(1 + 1/(n+1)) e^{-z²}` (first kind)
    /// or `e^{-z²}` (second kind).
    fn tail(self, n: f64, z2: f64) -> f64 {
        let decay = (-z2).exp();
        let rho = match self {
            Self::SqrtWeighted => (1.0 + 1.0 / (n + 1.0)).sqrt() * decay,
            Self::InvSqrtWeighted => decay,
        };
        if rho >= 1.0 {
            return f64::INFINITY;
        }
        self.term(n + 1.0, z2) / (1.0 - rho)
    }
}

/// Rough number of terms until the tail bound falls below the target.
fn series_terms_needed(z: f64) -> f64 {
    let z2 = z * z;
    let one_minus = -(-z2).exp_m1();
    let mut n: f64 = 1.0 / z2;
    for _ in 0..50 {
        let next = ((n + 1.0).sqrt() / (one_minus * SERIES_TAIL_TARGET)).ln() / z2;
        if (next - n).abs() < 1e-6 * n {
            break;
        }
        n = next.max(1.0);
    }
    n
}

pub fn series(kind: SeriesKind, z: f64) -> Result<SeriesValue> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::InvalidArgument(format!("series needs z > 0, got {z}")));
    }
    let needed = series_terms_needed(z);
    if needed > SERIES_MAX_TERMS {
        // bisection for the smallest feasible z
        let (mut lo, mut hi) = (z, 1.0f64.max(z));
        while series_terms_needed(hi) > SERIES_MAX_TERMS {
            hi *= 2.0;
        }
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if series_terms_needed(mid) > SERIES_MAX_TERMS { lo = mid } else { hi = mid }
        }
        return Err(Error::SeriesTooLong { z, needed, min_feasible_z: hi });
    }
    let z2 = z * z;
    let mut sum = CompensatedSum::new();
    let mut n = 0u64;
    loop {
        n += 1;
        let nf = n as f64;
        sum.add(kind.term(nf, z2));
        // the tail bound is only meaningful once terms are decreasing
        if nf * z2 > 0.5 {
            let tail = kind.tail(nf, z2);
            if tail < SERIES_TAIL_TARGET {
                return Ok(SeriesValue { partial_sum: sum.value(), tail_bound: tail, terms: n });
            }
        }
    }
}

pub const LEMMA3_STATEMENTS: [&str; 3] = ["i-lower", "i-upper", "ii"];

/// Checks the integral estimates at every `z`; lower bounds use the partial
/// sum, upper bounds the partial sum plus its tail bound.
pub fn check_lemma3(zs: &[f64]) -> Result<Vec<InequalityReport>> {
    let mut reports: Vec<_> = LEMMA3_STATEMENTS.iter().map(|s| InequalityReport::new("lemma3", s)).collect();
    for &z in zs {
        let s1 = series(SeriesKind::SqrtWeighted, z)?;
        let s2 = series(SeriesKind::InvSqrtWeighted, z)?;
        let main = PI.sqrt() / (2.0 * z * z * z);
        let corr = 1.0 / (z * (2.0 * std::f64::consts::E).sqrt());
        reports[0].record_le(main - corr, s1.partial_sum);
        reports[1].record_le(s1.partial_sum + s1.tail_bound, main + corr);
        reports[2].record_le(s2.partial_sum + s2.tail_bound, PI.sqrt() / z);
    }
    Ok(reports)
}

/// `ln 2`, re-exported for the selection rule's bits-to-nats conversion.
pub const NATS_PER_BIT: f64 = LN_2;
