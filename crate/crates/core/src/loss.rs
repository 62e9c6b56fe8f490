//! Exact expected square loss `E(pred - θ₀)²` under `Binomial(n, θ₀)`.
//!
//! Each `n` is evaluated independently: binomial probabilities by a ratio
//! recurrence seeded at the mode, selections by a lower envelope over the
//! code lengths (which are affine in the number of ones). Points are computed
//! in parallel over fixed chunks of `n`; every sum that crosses points is
//! formed sequentially in ascending `n`, so results do not depend on the
//! thread count.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::info::{kl, ln_binom_pmf};
use crate::intervals::Partition;
use crate::model::{near_tie_tolerance, posterior_mean, ParamClass, Predictor, Scorer};
use crate::numeric::CompensatedSum;

/// Points per parallel work unit.
pub const CHUNK: u64 = 4096;
/// `Auto` enumerates every `k` up to this `n`.
pub const AUTO_FULL_LIMIT: u64 = 10_000;
pub const DEFAULT_BUDGET: f64 = 1e11;
/// Binomial terms below `e^-700` are dropped and charged to the tail.
const LN_CUT: f64 = -700.0;
/// Posterior members more than `e^-80` below the best are dropped.
const BAYES_BAND_NATS: f64 = 80.0;
const RESEED_EVERY: u64 = 1024;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowPolicy {
    /// Every `k = 0..=n`.
    Full,
    /// `|k/n - θ₀| <= c_n/√n` with `c_n = √ln(2n²)`.
    Hoeffding,
    /// `Full` up to [`AUTO_FULL_LIMIT`], `Hoeffding` beyond.
    Auto,
}

impl WindowPolicy {
    fn is_full_at(self, n: u64) -> bool {
        match self {
            Self::Full => true,
            Self::Hoeffding => false,
            Self::Auto => n <= AUTO_FULL_LIMIT,
        }
    }
}

impl FromStr for WindowPolicy {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "full" => Ok(Self::Full),
            "hoeffding" => Ok(Self::Hoeffding),
            "auto" => Ok(Self::Auto),
            other => Err(Error::Config(format!("unknown window policy {other:?} (full, hoeffding, auto)"))),
        }
    }
}

impl fmt::Display for WindowPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Full => "full",
            Self::Hoeffding => "hoeffding",
            Self::Auto => "auto",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineOptions {
    pub window: WindowPolicy,
    pub threads: usize,
    /// Maximum estimated work, in evaluated `(n, k, θ)` terms.
    pub budget: f64,
}

impl Default for EngineOptions {
    fn default() -> Self {
        let threads = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
        Self { window: WindowPolicy::Auto, threads, budget: DEFAULT_BUDGET }
    }
}

impl EngineOptions {
    pub fn with_window(window: WindowPolicy) -> Self {
        Self { window, ..Self::default() }
    }

    pub fn threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LossPoint {
    pub n: u64,
    /// Exact expectation restricted to the retained `k`.
    pub window_loss: f64,
    /// Upper bound on the contribution of the omitted `k`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossCurve {
    pub predictor: Predictor,
    pub points: Vec<LossPoint>,
    /// Running `Σ window_loss`; a lower bound on the infinite sum.
    pub cumulative_lower: Vec<f64>,
    /// Running `Σ (window_loss + tail_bound)`; bounds the partial sum only.
    pub cumulative_upper: Vec<f64>,
    /// Set when the sum continues past the last point; nothing is claimed
    /// about terms beyond it.
    pub beyond_horizon: bool,
}

impl LossCurve {
    fn from_points(predictor: Predictor, points: Vec<LossPoint>) -> Self {
        let mut lower = CompensatedSum::new();
        let mut upper = CompensatedSum::new();
        let mut cl = Vec::with_capacity(points.len());
        let mut cu = Vec::with_capacity(points.len());
        for p in &points {
            lower.add(p.window_loss);
            upper.add(p.window_loss);
            upper.add(p.tail_bound);
            cl.push(lower.value());
            cu.push(upper.value().max(lower.value()));
        }
        Self { predictor, points, cumulative_lower: cl, cumulative_upper: cu, beyond_horizon: true }
    }

    pub fn horizon(&self) -> u64 {
        self.points.last().map(|p| p.n).unwrap_or(0)
    }

    pub fn lower(&self) -> f64 {
        self.cumulative_lower.last().copied().unwrap_or(0.0)
    }

    pub fn upper(&self) -> f64 {
        self.cumulative_upper.last().copied().unwrap_or(0.0)
    }

    /// Columns `n, window_loss, tail_bound, cumulative_lower,
    /// cumulative_upper, predictor, scenario`.
    pub fn write_csv<W: Write>(&self, out: W, scenario: &str) -> Result<()> {
        let mut w = csv::Writer::from_writer(std::io::BufWriter::new(out));
        w.write_record(["n", "window_loss", "tail_bound", "cumulative_lower", "cumulative_upper", "predictor", "scenario"])?;
        let name = self.predictor.name();
        for (i, p) in self.points.iter().enumerate() {
            w.write_record([
                p.n.to_string(),
                p.window_loss.to_string(),
                p.tail_bound.to_string(),
                self.cumulative_lower[i].to_string(),
                self.cumulative_upper[i].to_string(),
                name.to_string(),
                scenario.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Losses split by the partition label of the prediction (rows) and of the
/// observed fraction `k/n` (columns), summed over `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct Contributions {
    labels: usize,
    cells: Vec<f64>,
}

impl Contributions {
    pub fn label_count(&self) -> usize {
        self.labels
    }

    /// Prediction in segment `k`, observed fraction in segment `j`.
    pub fn get(&self, k: usize, j: usize) -> f64 {
        self.cells[k * self.labels + j]
    }

    /// `C(k)` by location of the prediction.
    pub fn by_prediction(&self) -> Vec<f64> {
        (0..self.labels).map(|k| (0..self.labels).map(|j| self.get(k, j)).collect::<CompensatedSum>().value()).collect()
    }

    /// `C(j)` by location of the observed fraction.
    pub fn by_observation(&self) -> Vec<f64> {
        (0..self.labels).map(|j| (0..self.labels).map(|k| self.get(k, j)).collect::<CompensatedSum>().value()).collect()
    }

    pub fn total(&self) -> f64 {
        self.cells.iter().copied().collect::<CompensatedSum>().value()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LossRun {
    pub curve: LossCurve,
    pub contributions: Option<Contributions>,
}

/// `k` range of the window at `n` and the bound on its complement's
/// probability.
fn window_range(policy: WindowPolicy, n: u64, theta0: f64) -> (u64, u64, f64) {
    if policy.is_full_at(n) {
        return (0, n, 0.0);
    }
    let nf = n as f64;
    let c2 = (2.0 * nf * nf).ln();
    let half = (c2 * nf).sqrt();
    // widened slightly so rounding never shrinks the window
    let slack = 1e-9 * nf + 1e-9;
    let lo = (nf * theta0 - half - slack).ceil().max(0.0) as u64;
    let hi = ((nf * theta0 + half + slack).floor().max(0.0) as u64).min(n);
    let mass = (2.0 * (-2.0 * c2).exp()).min(1.0);
    (lo.min(hi), hi, mass)
}

/// Binomial probabilities for `k` in `[lo, hi]`, with the retained sub-range
/// after dropping terms below `e^LN_CUT` and the number of dropped terms.
fn binomial_window(n: u64, theta0: f64, lo: u64, hi: u64, buf: &mut Vec<f64>) -> (u64, u64, u64) {
    buf.clear();
    if theta0 == 0.0 || theta0 == 1.0 {
        let k = if theta0 == 0.0 { 0 } else { n };
        if k < lo || k > hi {
            return (1, 0, 0);
        }
        buf.push(1.0);
        return (k, k, 0);
    }
    let cut = LN_CUT.exp();
    let mode = (((n + 1) as f64 * theta0).floor() as u64).min(n).clamp(lo, hi);
    let r = theta0 / (1.0 - theta0);
    // downward from the mode
    let mut down = Vec::new();
    let mut p = ln_binom_pmf(n, mode, theta0).exp();
    let mut k = mode;
    let mut first = mode;
    while k > lo {
        k -= 1;
        p = if (mode - k) % RESEED_EVERY == 0 {
            ln_binom_pmf(n, k, theta0).exp()
        } else {
            p * (k + 1) as f64 / ((n - k) as f64 * r)
        };
        if p < cut {
            break;
        }
        down.push(p);
        first = k;
    }
    down.reverse();
    buf.extend_from_slice(&down);
    let mut p = ln_binom_pmf(n, mode, theta0).exp();
    buf.push(p);
    let mut last = mode;
    let mut k = mode;
    while k < hi {
        k += 1;
        p = if (k - mode) % RESEED_EVERY == 0 {
            ln_binom_pmf(n, k, theta0).exp()
        } else {
            p * (n - k + 1) as f64 / k as f64 * r
        };
        if p < cut {
            break;
        }
        buf.push(p);
        last = k;
    }
    let dropped = (hi - lo + 1) - (last - first + 1);
    (first, last, dropped)
}

/// Streaming argmin of the code length for ascending `k` at fixed `n`.
struct Envelope<'a> {
    scorer: Scorer<'a>,
    interior: Vec<usize>,
    hull: Vec<usize>,
    slope: Vec<f64>,
    icept: Vec<f64>,
    ptr: usize,
    n: u64,
    /// Below this `k` the current hull line wins without re-checking.
    settled_until: u64,
}

impl<'a> Envelope<'a> {
    fn new(scorer: Scorer<'a>) -> Self {
        let class = scorer.class;
        let interior = (0..class.len()).filter(|&i| class.value(i) > 0.0 && class.value(i) < 1.0).collect();
        Self { scorer, interior, hull: vec![], slope: vec![], icept: vec![], ptr: 0, n: 0, settled_until: 0 }
    }

    /// Lower envelope of the lines `L_i(k) = a_i k + b_i` for `k` in
    /// `[first, last]`; slopes decrease with `θ`.
    ///
    /// Only members that can beat `θ₀` somewhere in the range enter: the
    /// winner at `α` has `2n(θ - α)² <= n·D(α‖θ) + Kw ln 2 <= n·D(α‖θ₀) +
    /// Kw(θ₀) ln 2`, and the right side is largest at an end of the range.
    fn prepare(&mut self, n: u64, first: u64, last: u64) {
        let class = self.scorer.class;
        self.n = n;
        self.ptr = 0;
        self.settled_until = 0;
        self.hull.clear();
        self.slope.clear();
        self.icept.clear();
        let nf = n as f64;
        let t0 = class.theta0();
        let reach = |k: u64| nf * kl(k as f64 / nf, t0).value;
        let budget = reach(first).max(reach(last)) + self.scorer.penalty(class.true_index());
        let r = (budget / (2.0 * nf)).sqrt() * (1.0 + 1e-9) + 1e-12;
        let (a_lo, a_hi) = (first as f64 / nf - r, last as f64 / nf + r);
        let lo = self.interior.partition_point(|&i| class.value(i) < a_lo);
        let hi = self.interior.partition_point(|&i| class.value(i) <= a_hi);
        for idx in lo..hi {
            let i = self.interior[idx];
            let a = class.ln_comp(i) - class.ln_theta(i);
            let b = -nf * class.ln_comp(i) + self.scorer.penalty(i);
            if let Some(&sa) = self.slope.last() {
                if a >= sa {
                    // equal slope in floating point; keep the lower line
                    if b < *self.icept.last().expect("paired") {
                        self.hull.pop();
                        self.slope.pop();
                        self.icept.pop();
                    } else {
                        continue;
                    }
                }
            }
            while self.hull.len() >= 2 {
                let m = self.hull.len();
                let (a1, b1) = (self.slope[m - 2], self.icept[m - 2]);
                let (a2, b2) = (self.slope[m - 1], self.icept[m - 1]);
                // line 2 is useless if line 3 overtakes line 1 no later than line 2 does
                if (b - b1) * (a1 - a2) <= (b2 - b1) * (a1 - a) {
                    self.hull.pop();
                    self.slope.pop();
                    self.icept.pop();
                } else {
                    break;
                }
            }
            self.hull.push(i);
            self.slope.push(a);
            self.icept.push(b);
        }
    }

    fn select(&mut self, k: u64) -> usize {
        let n = self.n;
        if k == 0 || k == n || self.hull.is_empty() {
            return self.scorer.select(n, k);
        }
        if k < self.settled_until {
            return self.hull[self.ptr];
        }
        let sc = self.scorer;
        while self.ptr + 1 < self.hull.len()
            && sc.code_length(self.hull[self.ptr + 1], n, k) <= sc.code_length(self.hull[self.ptr], n, k)
        {
            self.ptr += 1;
        }
        let best = self.hull[self.ptr];
        let lb = sc.code_length(best, n, k);
        let tol = 1e3 * near_tie_tolerance(sc.magnitude(best, n, k));
        let close = |j: usize| sc.code_length(j, n, k) - lb <= tol;
        let near_prev = self.ptr > 0 && close(self.hull[self.ptr - 1]);
        let near_next = self.ptr + 1 < self.hull.len() && close(self.hull[self.ptr + 1]);
        if near_prev || near_next {
            return sc.select(n, k);
        }
        // skip re-evaluation until two steps before the next crossing
        self.settled_until = match self.ptr + 1 < self.hull.len() {
            true => {
                let j = self.ptr;
                let x = (self.icept[j + 1] - self.icept[j]) / (self.slope[j] - self.slope[j + 1]);
                let x = x - 1e-6 * (1.0 + x.abs()) - 2.0;
                if x.is_finite() && x > k as f64 { x.floor() as u64 } else { 0 }
            }
            false => n,
        };
        best
    }
}

/// Posterior mean restricted to members that can carry weight.
struct BayesBand<'a> {
    scorer: Scorer<'a>,
}

impl<'a> BayesBand<'a> {
    fn predict(&self, n: u64, k: u64) -> Result<f64> {
        let class = self.scorer.class;
        let sc = self.scorer;
        if n == 0 {
            return crate::model::bayes_predict(class, crate::model::SufficientStat { n, ones: k });
        }
        let alpha = k as f64 / n as f64;
        let ps = class.params();
        let pos = ps.partition_point(|p| p.value < alpha);
        let mut upper = f64::INFINITY;
        for i in [pos.wrapping_sub(1), pos] {
            if i < class.len() {
                upper = upper.min(sc.code_length(i, n, k));
            }
        }
        let (lo, hi) = if upper.is_finite() {
            let ln = |c: u64, x: f64| if c == 0 { 0.0 } else { -(c as f64) * x.ln() };
            let entropy = ln(k, alpha) + ln(n - k, 1.0 - alpha);
            let gap = (upper - entropy).max(0.0);
            let r = ((BAYES_BAND_NATS + gap) / (2.0 * n as f64)).sqrt() * (1.0 + 1e-9) + 1e-12;
            (ps.partition_point(|p| p.value < alpha - r), ps.partition_point(|p| p.value <= alpha + r))
        } else {
            (0, class.len())
        };
        let lw: Vec<(usize, f64)> = (lo..hi).map(|i| (i, -sc.code_length(i, n, k))).collect();
        let max = lw.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
        if max == f64::NEG_INFINITY {
            return crate::model::bayes_predict(class, crate::model::SufficientStat { n, ones: k });
        }
        posterior_mean(class, lw.into_iter(), max)
    }
}

enum Rule<'a> {
    Select(Envelope<'a>),
    Bayes(BayesBand<'a>),
}

struct Labels<'p> {
    partition: &'p Partition,
    params: Vec<usize>,
}

struct PointOutput {
    point: LossPoint,
}

fn evaluate_point(
    class: &ParamClass,
    rule: &mut Rule<'_>,
    policy: WindowPolicy,
    n: u64,
    buf: &mut Vec<f64>,
    labels: Option<&Labels<'_>>,
    cells: Option<&mut Vec<CompensatedSum>>,
) -> Result<PointOutput> {
    let theta0 = class.theta0();
    let worst = theta0.max(1.0 - theta0).powi(2);
    let (lo, hi, outside) = window_range(policy, n, theta0);
    let (first, last, dropped) = binomial_window(n, theta0, lo, hi, buf);
    let cut_mass = dropped as f64 * LN_CUT.exp() * (1.0 + 1e-6);
    let tail_bound = (outside + cut_mass).min(1.0) * worst;
    let mut sum = CompensatedSum::new();
    if first <= last {
        if let Rule::Select(env) = rule {
            env.prepare(n, first, last);
        }
        let mut alpha_labels = labels.map(|l| l.partition.thresholds(n));
        let mut seg = 0usize;
        let mut cells = cells;
        for k in first..=last {
            let p = buf[(k - first) as usize];
            let (pred, sel) = match rule {
                Rule::Select(env) => {
                    let i = env.select(k);
                    (class.value(i), Some(i))
                }
                Rule::Bayes(b) => (b.predict(n, k)?, None),
            };
            let d = pred - theta0;
            let term = p * d * d;
            sum.add(term);
            if let (Some(l), Some(th), Some(cells)) = (labels, alpha_labels.as_mut(), cells.as_deref_mut()) {
                while seg + 1 < th.len() && th[seg + 1].0 <= k {
                    seg += 1;
                }
                let row = match sel {
                    Some(i) => l.params[i],
                    None => l.partition.label_of_f64(pred),
                };
                let count = l.partition.label_count();
                cells[row * count + th[seg].1].add(term);
            }
        }
    }
    Ok(PointOutput { point: LossPoint { n, window_loss: sum.value(), tail_bound } })
}

fn make_rule(class: &ParamClass, predictor: Predictor) -> Rule<'_> {
    match predictor {
        Predictor::Mdl => Rule::Select(Envelope::new(Scorer::mdl(class))),
        Predictor::Ml => Rule::Select(Envelope::new(Scorer::ml(class))),
        Predictor::Bayes => Rule::Bayes(BayesBand { scorer: Scorer::mdl(class) }),
    }
}

/// Expected square loss at a single `n >= 1`.
pub fn instantaneous_loss(class: &ParamClass, predictor: Predictor, n: u64, window: WindowPolicy) -> Result<LossPoint> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let mut rule = make_rule(class, predictor);
    let mut buf = Vec::new();
    Ok(evaluate_point(class, &mut rule, window, n, &mut buf, None, None)?.point)
}

/// Rough number of evaluated terms for a run.
pub fn estimate_cost(class: &ParamClass, predictor: Predictor, horizon: u64, window: WindowPolicy) -> f64 {
    let size = class.len() as f64;
    let theta0 = class.theta0();
    let spread = (theta0 * (1.0 - theta0)).sqrt().max(1e-3);
    let mut total = 0.0;
    // integrate in geometric blocks of n
    let mut n = 1u64;
    while n <= horizon {
        let next = (n * 2).min(horizon + 1);
        let count = (next - n) as f64;
        let nf = n as f64;
        let (lo, hi, _) = window_range(window, n, theta0);
        // the cut at e^-700 keeps about √(700·2n)·spread terms
        let width = ((hi - lo + 1) as f64).min((1400.0 * nf).sqrt() * spread * 2.0 + 1.0);
        let per_k = match predictor {
            Predictor::Bayes => (size * (2.0 * (BAYES_BAND_NATS / (2.0 * nf)).sqrt()).min(1.0)).max(2.0),
            _ => 2.0,
        };
        let per_n = match predictor {
            Predictor::Bayes => 0.0,
            _ => size,
        };
        total += count * (width * per_k + per_n);
        n = next;
    }
    total
}

/// Curve for `n = 1..=horizon`, optionally split by a partition.
pub fn run(
    class: &ParamClass,
    predictor: Predictor,
    horizon: u64,
    options: &EngineOptions,
    partition: Option<&Partition>,
) -> Result<LossRun> {
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let estimate = estimate_cost(class, predictor, horizon, options.window);
    if estimate > options.budget {
        return Err(Error::OverBudget { estimate, budget: options.budget });
    }
    let labels = partition.map(|p| Labels {
        partition: p,
        params: class.params().iter().map(|q| p.label_of_param(q)).collect(),
    });
    let cell_count = partition.map(|p| p.label_count().pow(2)).unwrap_or(0);
    let chunks: Vec<(u64, u64)> = (0..horizon.div_ceil(CHUNK))
        .map(|c| (c * CHUNK + 1, ((c + 1) * CHUNK).min(horizon)))
        .collect();
    let work = |&(start, end): &(u64, u64)| -> Result<(Vec<LossPoint>, Vec<CompensatedSum>)> {
        let mut rule = make_rule(class, predictor);
        let mut buf = Vec::new();
        let mut cells = vec![CompensatedSum::new(); cell_count];
        let mut points = Vec::with_capacity((end - start + 1) as usize);
        for n in start..=end {
            let cells_ref = if labels.is_some() { Some(&mut cells) } else { None };
            let out = evaluate_point(class, &mut rule, options.window, n, &mut buf, labels.as_ref(), cells_ref)?;
            points.push(out.point);
        }
        Ok((points, cells))
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(options.threads.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    let results: Vec<Result<(Vec<LossPoint>, Vec<CompensatedSum>)>> =
        pool.install(|| chunks.par_iter().map(work).collect());
    let mut points = Vec::with_capacity(horizon as usize);
    let mut cells = vec![CompensatedSum::new(); cell_count];
    for r in results {
        let (p, c) = r?;
        points.extend(p);
        for (acc, part) in cells.iter_mut().zip(&c) {
            acc.merge(part);
        }
    }
    let contributions = partition.map(|p| Contributions {
        labels: p.label_count(),
        cells: cells.iter().map(|c| c.value()).collect(),
    });
    Ok(LossRun { curve: LossCurve::from_points(predictor, points), contributions })
}

pub fn cumulative_loss(class: &ParamClass, predictor: Predictor, horizon: u64, options: &EngineOptions) -> Result<LossCurve> {
    Ok(run(class, predictor, horizon, options, None)?.curve)
}

pub fn interval_contributions(
    class: &ParamClass,
    predictor: Predictor,
    horizon: u64,
    options: &EngineOptions,
    partition: &Partition,
) -> Result<(LossCurve, Contributions)> {
    let r = run(class, predictor, horizon, options, Some(partition))?;
    Ok((r.curve, r.contributions.expect("partition given")))
}

/// `ln2·Kw/(2n) + √(2 ln2·Kw·ln n)/n + 6 ln n/n`.
pub fn instantaneous_bound(kw0: f64, n: u64) -> f64 {
    let nf = n as f64;
    let l2 = std::f64::consts::LN_2;
    l2 * kw0 / (2.0 * nf) + (2.0 * l2 * kw0 * nf.ln()).sqrt() / nf + 6.0 * nf.ln() / nf
}

/// Points whose full-window loss exceeds [`instantaneous_bound`], for
/// `n >= 3`. Points carrying a tail are compared with their upper value.
pub fn instantaneous_bound_violations(curve: &LossCurve, kw0: f64) -> Vec<u64> {
    curve
        .points
        .iter()
        .filter(|p| p.n >= 3 && p.window_loss + p.tail_bound > instantaneous_bound(kw0, p.n))
        .map(|p| p.n)
        .collect()
}

fn big_pow(x: &BigRational, e: u64) -> BigRational {
    num_traits::pow(x.clone(), e as usize)
}

fn integral_kw(kw: f64) -> Option<u32> {
    (kw.fract() == 0.0 && (0.0..=4096.0).contains(&kw)).then_some(kw as u32)
}

/// Brute-force rational expectation at `n <= 32`. Needs exact dyadic
/// values and integral complexities.
pub fn oracle_expected_loss(class: &ParamClass, predictor: Predictor, n: u64) -> Result<BigRational> {
    if n > 32 {
        return Err(Error::TooLarge { what: "oracle n", value: n, limit: 32 });
    }
    let mut values = Vec::with_capacity(class.len());
    let mut weights = Vec::with_capacity(class.len());
    for p in class.params() {
        let d = p.exact.as_ref().ok_or_else(|| Error::NotExact(format!("{} is not a finite binary fraction", p.value)))?;
        let kw = integral_kw(p.kw).ok_or_else(|| Error::NotExact(format!("complexity {} is not an integer", p.kw)))?;
        values.push(d.to_rational());
        let w = match predictor {
            Predictor::Ml => BigRational::one(),
            _ => BigRational::new(BigInt::one(), BigInt::one() << kw),
        };
        weights.push(w);
    }
    let one = BigRational::one();
    let t0 = values[class.true_index()].clone();
    let mut total = BigRational::zero();
    let mut binom = BigUint::one();
    for k in 0..=n {
        if k > 0 {
            binom = binom * BigUint::from(n - k + 1) / BigUint::from(k);
        }
        let prob = BigRational::from_integer(BigInt::from(binom.clone())) * big_pow(&t0, k) * big_pow(&(&one - &t0), n - k);
        if prob.is_zero() {
            continue;
        }
        let like: Vec<BigRational> =
            values.iter().zip(&weights).map(|(v, w)| w * big_pow(v, k) * big_pow(&(&one - v), n - k)).collect();
        let pred = match predictor {
            Predictor::Bayes => {
                let den: BigRational = like.iter().fold(BigRational::zero(), |a, b| a + b);
                let num: BigRational = like.iter().zip(&values).fold(BigRational::zero(), |a, (l, v)| a + l * v);
                num / den
            }
            _ => {
                let mut best = 0;
                for i in 1..like.len() {
                    let better = match like[i].cmp(&like[best]) {
                        std::cmp::Ordering::Greater => true,
                        std::cmp::Ordering::Equal => {
                            let kw = |j: usize| if predictor == Predictor::Ml { 0.0 } else { class.kw(j) };
                            kw(i) < kw(best)
                        }
                        std::cmp::Ordering::Less => false,
                    };
                    if better {
                        best = i;
                    }
                }
                values[best].clone()
            }
        };
        let d = pred - &t0;
        total += prob * &d * &d;
    }
    Ok(total)
}

/// Engine value against the rational oracle at one `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleRow {
    pub n: u64,
    pub engine: f64,
    pub oracle: f64,
    /// `|engine - oracle| / oracle`, zero when both vanish.
    pub rel_error: f64,
}

/// Full-window engine losses compared with [`oracle_expected_loss`] for
/// `n = 1..=n_max`.
pub fn oracle_agreement(class: &ParamClass, predictor: Predictor, n_max: u64) -> Result<Vec<OracleRow>> {
    let options = EngineOptions { window: WindowPolicy::Full, threads: 1, budget: DEFAULT_BUDGET };
    let curve = cumulative_loss(class, predictor, n_max, &options)?;
    curve
        .points
        .iter()
        .map(|p| {
            let exact = rational_to_f64(&oracle_expected_loss(class, predictor, p.n)?);
            let diff = (p.window_loss - exact).abs();
            let rel_error = if diff == 0.0 { 0.0 } else { diff / exact.abs() };
            Ok(OracleRow { n: p.n, engine: p.window_loss, oracle: exact, rel_error })
        })
        .collect()
}

pub fn rational_to_f64(x: &BigRational) -> f64 {
    if x.is_zero() {
        return 0.0;
    }
    // scale so the quotient has ~64 significant bits
    let shift = x.numer().bits() as i64 - x.denom().bits() as i64 - 64;
    let (num, den) = if shift > 0 {
        (x.numer().clone(), x.denom().clone() << shift as usize)
    } else {
        (x.numer().clone() << (-shift) as usize, x.denom().clone())
    };
    let q = (num / den).to_f64().expect("fits");
    q * (shift as f64).exp2()
}
