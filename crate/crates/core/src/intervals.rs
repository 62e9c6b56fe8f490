//! Nested dyadic intervals contracting to `θ₀`, the complexity gaps `Δ(k)`
//! they induce, and checkers for the spacing condition on classes.

use std::fmt;
use std::io::Write;

use serde::Serialize;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::info::InequalityReport;
use crate::model::{Param, ParamClass};

/// Half-open `[left, right)` with exact endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HalfOpen {
    pub left: Dyadic,
    pub right: Dyadic,
}

impl HalfOpen {
    pub fn new(left: Dyadic, right: Dyadic) -> Self {
        debug_assert!(left <= right);
        Self { left, right }
    }

    pub fn measure(&self) -> Dyadic {
        self.right.checked_sub(&self.left).expect("left <= right")
    }

    pub fn contains(&self, x: &Dyadic) -> bool {
        &self.left <= x && x < &self.right
    }

    pub fn contains_f64(&self, x: f64) -> bool {
        self.left.cmp_f64(x).is_le() && self.right.cmp_f64(x).is_gt()
    }

    pub fn contains_param(&self, p: &Param) -> bool {
        match &p.exact {
            Some(d) => self.contains(d),
            None => self.contains_f64(p.value),
        }
    }

    /// `sup |x - θ|` over the interval.
    pub fn sup_distance(&self, theta: &Dyadic) -> Dyadic {
        self.left.abs_diff(theta).max(self.right.abs_diff(theta))
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        other.left <= self.left && self.right <= other.right
    }
}

impl fmt::Display for HalfOpen {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {})", self.left, self.right)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StepType {
    #[serde(rename = "l")]
    Left,
    #[serde(rename = "c")]
    Center,
    #[serde(rename = "r")]
    Right,
}

impl fmt::Display for StepType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Left => "l",
            Self::Center => "c",
            Self::Right => "r",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalStep {
    pub k: u32,
    pub step: StepType,
    /// Width of `J_{k-1}`, `2^{-k+1}`.
    pub d: Dyadic,
    pub j: HalfOpen,
    /// One or two pieces.
    pub i: Vec<HalfOpen>,
}

impl IntervalStep {
    pub fn i_measure(&self) -> Dyadic {
        self.i.iter().fold(Dyadic::zero(), |acc, p| acc.checked_add(&p.measure()).expect("within [0,1]"))
    }

    pub fn i_contains_param(&self, p: &Param) -> bool {
        self.i.iter().any(|piece| piece.contains_param(p))
    }
}

fn frac(l: &Dyadic, d: &Dyadic, eighths: u64) -> Dyadic {
    l.checked_add(&d.mul(&Dyadic::new(eighths, 3).expect("eighths <= 8"))).expect("inside J")
}

/// The construction `J_0 = [0,1) ⊃ J_1 ⊃ …` around `θ₀` up to step `k_max`.
pub fn build_construction(theta0: &Dyadic, k_max: u32) -> Result<Vec<IntervalStep>> {
    if theta0.is_zero() || theta0.is_one() {
        return Err(Error::BoundaryTruth(theta0.to_string()));
    }
    if k_max == 0 {
        return Err(Error::InvalidArgument("k_max must be at least 1".into()));
    }
    let mut steps = Vec::with_capacity(k_max as usize);
    let mut j = HalfOpen::new(Dyadic::zero(), Dyadic::one());
    for k in 1..=k_max {
        let l = j.left.clone();
        let r = j.right.clone();
        let d = j.measure();
        let (step, next, i) = if *theta0 < frac(&l, &d, 3) {
            let mid = frac(&l, &d, 4);
            (StepType::Left, HalfOpen::new(l, mid.clone()), vec![HalfOpen::new(mid, r)])
        } else if *theta0 < frac(&l, &d, 5) {
            let a = frac(&l, &d, 2);
            let b = frac(&l, &d, 6);
            (StepType::Center, HalfOpen::new(a.clone(), b.clone()), vec![HalfOpen::new(l, a), HalfOpen::new(b, r)])
        } else {
            let mid = frac(&l, &d, 4);
            (StepType::Right, HalfOpen::new(mid.clone(), r), vec![HalfOpen::new(l, mid)])
        };
        steps.push(IntervalStep { k, step, d, j: next.clone(), i });
        j = next;
    }
    Ok(steps)
}

pub const CONSTRUCTION_STATEMENTS: [&str; 5] = ["measure", "truth-in-J", "nested", "sup-distance", "disjoint"];

/// Exact invariant sweep over the construction for each `θ₀`: both `J_k` and
/// `I_k` have measure `2^-k`, `θ₀ ∈ J_k ⊂ J_{k-1}`, pieces of `I_k` lie
/// within `2^{-k+1}` of `θ₀` and are disjoint from `J_k`.
pub fn check_construction(truths: &[Dyadic], k_max: u32) -> Result<Vec<InequalityReport>> {
    let mut reports: Vec<_> =
        CONSTRUCTION_STATEMENTS.iter().map(|s| InequalityReport::new("construction", s)).collect();
    let mark = |r: &mut InequalityReport, ok: bool| r.record(if ok { 0.0 } else { -1.0 });
    for theta0 in truths {
        let steps = build_construction(theta0, k_max)?;
        let mut prev = HalfOpen::new(Dyadic::zero(), Dyadic::one());
        for s in &steps {
            let w = Dyadic::pow2_neg(s.k);
            mark(&mut reports[0], s.d == prev.measure() && s.i_measure() == w && s.j.measure() == w);
            mark(&mut reports[1], s.j.contains(theta0));
            let bound = Dyadic::pow2_neg(s.k - 1);
            let mut nested = s.j.is_subset_of(&prev);
            let mut close = true;
            let mut disjoint = true;
            for piece in &s.i {
                nested &= piece.is_subset_of(&prev);
                close &= piece.sup_distance(theta0) <= bound;
                disjoint &= piece.right <= s.j.left || s.j.right <= piece.left;
            }
            mark(&mut reports[2], nested);
            mark(&mut reports[3], close);
            mark(&mut reports[4], disjoint);
            prev = s.j.clone();
        }
    }
    Ok(reports)
}

/// `count` odd-numerator dyadics of length `1..=max_len` (at most 63),
/// reproducible from `seed`.
pub fn random_truths(count: usize, max_len: u32, seed: u64) -> Vec<Dyadic> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.gen_range(1..=max_len.clamp(1, 63));
            let m = 2 * rng.gen_range(0..(1u64 << (len - 1))) + 1;
            Dyadic::new(m, len).expect("odd numerator below 2^len")
        })
        .collect()
}

/// CSV with columns `k, type, d, J, I`.
pub fn write_construction_csv<W: Write>(out: W, steps: &[IntervalStep]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "type", "d", "J", "I"])?;
    for s in steps {
        let i = s.i.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" u ");
        w.write_record([s.k.to_string(), s.step.to_string(), s.d.to_string(), s.j.to_string(), i])?;
    }
    w.flush()?;
    Ok(())
}

/// Indices of class members inside `interval`, exploiting sortedness.
fn members(class: &ParamClass, interval: &HalfOpen) -> std::ops::Range<usize> {
    let ps = class.params();
    fn below(p: &Param, x: &Dyadic) -> bool {
        match &p.exact {
            Some(d) => d < x,
            None => x.cmp_f64(p.value).is_gt(),
        }
    }
    let lo = ps.partition_point(|p| below(p, &interval.left));
    let hi = ps.partition_point(|p| below(p, &interval.right));
    lo..hi.max(lo)
}

/// Lowest complexity in the index range, ties to the smaller value.
fn min_kw(class: &ParamClass, range: std::ops::Range<usize>) -> Option<usize> {
    range.fold(None, |best: Option<usize>, i| match best {
        Some(b) if class.kw(b) <= class.kw(i) => Some(b),
        _ => Some(i),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaEntry {
    pub k: u32,
    /// Cheapest member of `I_k`, if any.
    pub theta_i: Option<usize>,
    /// Cheapest member of `J_k`.
    pub theta_j: Option<usize>,
    /// `+∞` when `I_k` holds no member.
    pub delta: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeltaProfile {
    pub entries: Vec<DeltaEntry>,
}

impl DeltaProfile {
    /// Steps where `Δ(k) = 0`: a false parameter at most as complex as the
    /// cheapest one near `θ₀`.
    pub fn zero_delta_steps(&self) -> Vec<u32> {
        self.entries.iter().filter(|e| e.delta == 0.0).map(|e| e.k).collect()
    }
}

/// Exact position of the true parameter; a float value is taken at its
/// exact binary value.
pub fn exact_truth(class: &ParamClass) -> Result<Dyadic> {
    match &class.true_param().exact {
        Some(d) => Ok(d.clone()),
        None => Dyadic::from_f64(class.theta0()),
    }
}

/// `Δ(k) = max(Kw(θ^I_k) - Kw(θ^J_k), 0)` for `k = 1..=k_max` around the
/// class's true parameter.
pub fn delta_profile(class: &ParamClass, k_max: u32) -> Result<DeltaProfile> {
    let steps = build_construction(&exact_truth(class)?, k_max)?;
    Ok(delta_profile_for(class, &steps))
}

pub fn delta_profile_for(class: &ParamClass, steps: &[IntervalStep]) -> DeltaProfile {
    let entries = steps
        .iter()
        .map(|s| {
            let theta_i = s
                .i
                .iter()
                .filter_map(|piece| min_kw(class, members(class, piece)))
                .min_by(|&a, &b| class.kw(a).total_cmp(&class.kw(b)).then(a.cmp(&b)));
            let theta_j = min_kw(class, members(class, &s.j));
            let delta = match (theta_i, theta_j) {
                (None, _) => f64::INFINITY,
                (Some(i), Some(j)) => (class.kw(i) - class.kw(j)).max(0.0),
                (Some(i), None) => class.kw(i).max(0.0),
            };
            DeltaEntry { k: s.k, theta_i, theta_j, delta }
        })
        .collect();
    DeltaProfile { entries }
}

/// CSV with columns `k, theta_I, theta_J, kw_I, kw_J, delta`.
pub fn write_delta_csv<W: Write>(out: W, class: &ParamClass, profile: &DeltaProfile) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["k", "theta_I", "theta_J", "kw_I", "kw_J", "delta"])?;
    let show = |i: Option<usize>| i.map(|i| param_label(class.param(i))).unwrap_or_else(|| "none".into());
    let kw = |i: Option<usize>| i.map(|i| class.kw(i).to_string()).unwrap_or_else(|| "inf".into());
    for e in &profile.entries {
        let delta = if e.delta.is_infinite() { "inf".to_string() } else { e.delta.to_string() };
        w.write_record([e.k.to_string(), show(e.theta_i), show(e.theta_j), kw(e.theta_i), kw(e.theta_j), delta])?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn param_label(p: &Param) -> String {
    match &p.exact {
        Some(d) => d.to_string(),
        None => p.value.to_string(),
    }
}

/// `Kw(θ₀) + Σ 2^{-Δ(k)} √Δ(k)` truncated at the profile length.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Theorem6Rhs {
    pub value: f64,
    /// Last summand, to judge convergence of the truncated sum.
    pub last_increment: f64,
    /// Steps contributing `0` only because `Δ(k) = 0`.
    pub zero_delta_steps: Vec<u32>,
}

pub fn gap_term(delta: f64) -> f64 {
    if delta == 0.0 || delta.is_infinite() { 0.0 } else { (-delta).exp2() * delta.sqrt() }
}

pub fn theorem6_rhs(profile: &DeltaProfile, kw0: f64) -> Theorem6Rhs {
    let terms: Vec<f64> = profile.entries.iter().map(|e| gap_term(e.delta)).collect();
    Theorem6Rhs {
        value: kw0 + terms.iter().sum::<f64>(),
        last_increment: terms.last().copied().unwrap_or(0.0),
        zero_delta_steps: profile.zero_delta_steps(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Condition14Report {
    pub passed: bool,
    /// First `k` with a member too cheap for its distance, and that member.
    pub witness: Option<(u32, usize)>,
    pub checked: Vec<u32>,
    /// Steps whose neighbourhood holds no member besides `θ₀`.
    pub vacuous: Vec<u32>,
}

/// `|θ - θ₀| <= 2^-k`, exactly when both are dyadic.
fn within(p: &Param, theta0: &Param, k: u32) -> bool {
    match (&p.exact, &theta0.exact) {
        (Some(a), Some(b)) => a.abs_diff(b) <= Dyadic::pow2_neg(k),
        _ => (p.value - theta0.value).abs() <= (-(k as f64)).exp2(),
    }
}

/// Checks `min{Kw(θ) : θ ≠ θ₀, |θ - θ₀| <= 2^-k} >= (k - b)/a` for every
/// integer `a·Kw(θ₀) + b < k <= k_max`. The witness is the cheapest violator,
/// preferring the one farthest from `θ₀`.
pub fn condition14_check(class: &ParamClass, a: f64, b: f64, k_max: u32) -> Result<Condition14Report> {
    if !(a >= 1.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
        return Err(Error::InvalidArgument(format!("need a >= 1 and b >= 0, got a={a}, b={b}")));
    }
    let t0 = class.true_index();
    let theta0 = class.true_param();
    let k_min = (a * class.kw0() + b).floor() as i64 + 1;
    let mut report = Condition14Report { passed: true, witness: None, checked: vec![], vacuous: vec![] };
    for k in k_min.max(0) as u32..=k_max {
        report.checked.push(k);
        let near: Vec<usize> = (0..class.len()).filter(|&i| i != t0 && within(class.param(i), theta0, k)).collect();
        if near.is_empty() {
            report.vacuous.push(k);
            continue;
        }
        let need = (k as f64 - b) / a;
        let dist = |i: usize| (class.value(i) - theta0.value).abs();
        let cheapest = near
            .iter()
            .copied()
            .min_by(|&x, &y| {
                class.kw(x).total_cmp(&class.kw(y)).then(dist(y).total_cmp(&dist(x))).then(x.cmp(&y))
            })
            .expect("non-empty");
        if class.kw(cheapest) < need {
            report.passed = false;
            report.witness = Some((k, cheapest));
            break;
        }
    }
    Ok(report)
}

/// Real polynomial with ascending coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct Polynomial {
    pub coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut coeffs = coeffs;
        while coeffs.len() > 1 && coeffs.last() == Some(&0.0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Self { coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::new(vec![0.0]);
        }
        Self::new(self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0.0)
    }

    /// `min |p|` on `[lo, hi]`: zero if `p` changes sign or vanishes there.
    pub fn min_abs_on(&self, lo: f64, hi: f64) -> f64 {
        const SAMPLES: usize = 4096;
        let xs: Vec<f64> = (0..=SAMPLES).map(|i| lo + (hi - lo) * i as f64 / SAMPLES as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        if ys.iter().any(|&y| y == 0.0) || ys.windows(2).any(|w| w[0].signum() != w[1].signum()) {
            return 0.0;
        }
        let (imin, _) = ys.iter().enumerate().min_by(|a, b| a.1.abs().total_cmp(&b.1.abs())).expect("samples");
        // golden-section refinement of |p| around the best sample
        let (mut a, mut b) = (xs[imin.saturating_sub(1)], xs[(imin + 1).min(SAMPLES)]);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let f = |x: f64| self.eval(x).abs();
        for _ in 0..100 {
            let c = b - g * (b - a);
            let d = a + g * (b - a);
            if f(c) < f(d) { b = d } else { a = c }
        }
        ys[imin].abs().min(f(0.5 * (a + b)))
    }
}

/// Spacing parameters for a distorted class `φ(Q)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DistortionParams {
    /// Smallest derivative order not vanishing near `t₀`.
    pub order: usize,
    /// Lower bound of `|φ^(order)|` on `[t₀ - ε, t₀ + ε]`.
    pub c: f64,
    pub a: f64,
    pub b: f64,
}

pub const DERIVATIVE_ZERO_TOL: f64 = 1e-12;

/// Finds the smallest `n` with `φ^(m)(t₀) = 0` for `1 <= m < n` and
/// `|φ^(n)| >= c > 0` on `[t₀-ε, t₀+ε]`; then `a = n`,
/// `b = lb(n!) - lb c + 1`.
pub fn corollary9_bound_params(poly: &Polynomial, t0: f64, eps: f64) -> Result<DistortionParams> {
    if !(t0 > 0.0 && t0 < 1.0) {
        return Err(Error::InvalidArgument(format!("t0 = {t0} must lie in (0, 1)")));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    let degree = poly.degree();
    let mut deriv = poly.derivative();
    let mut lb_factorial = 0.0;
    for n in 1..=degree.max(1) {
        lb_factorial += (n as f64).log2();
        let c = deriv.min_abs_on(t0 - eps, t0 + eps);
        if c > DERIVATIVE_ZERO_TOL {
            return Ok(DistortionParams { order: n, c, a: n as f64, b: lb_factorial - c.log2() + 1.0 });
        }
        if deriv.eval(t0).abs() > DERIVATIVE_ZERO_TOL {
            break;
        }
        deriv = deriv.derivative();
    }
    Err(Error::NoQualifyingOrder { degree })
}

/// Whether `φ'` keeps one sign on a uniform grid over `[0, 1]`, vanishing
/// at isolated grid points at most. A grid check, not a proof.
pub fn monotone_on_grid(poly: &Polynomial, points: usize) -> bool {
    let d = poly.derivative();
    let slopes: Vec<f64> = (0..=points).map(|i| d.eval(i as f64 / points as f64)).collect();
    let one_sign = slopes.iter().all(|&s| s >= 0.0) || slopes.iter().all(|&s| s <= 0.0);
    one_sign && !slopes.windows(2).any(|w| w[0] == 0.0 && w[1] == 0.0)
}

/// A labelled partition of `[0, 1]` into half-open segments, the point `1`
/// belonging to the last one. Used to split losses by interval.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Ascending left endpoints, the first being `0`, with labels.
    segments: Vec<(Dyadic, usize)>,
    labels: usize,
}

impl Partition {
    pub fn new(mut segments: Vec<(Dyadic, usize)>) -> Result<Self> {
        segments.sort_by(|a, b| a.0.cmp(&b.0));
        if segments.first().map(|s| !s.0.is_zero()).unwrap_or(true) {
            return Err(Error::InvalidArgument("partition must start at 0".into()));
        }
        if segments.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::InvalidArgument("partition has an empty segment".into()));
        }
        let labels = segments.iter().map(|s| s.1).max().expect("non-empty") + 1;
        Ok(Self { segments, labels })
    }

    /// `I_0 = [0, θ_{2^N-1})`, `I_k = [θ_k, θ_{k-1})`, `I_1 = [θ_1, 1]` for
    /// `θ_k = 1/2 + 2^{-k-1}`.
    pub fn prop4(n: u32) -> Result<Self> {
        if !(1..=8).contains(&n) {
            return Err(Error::TooLarge { what: "N", value: n as u64, limit: 8 });
        }
        let half = Dyadic::new(1u32, 1)?;
        let mut segs = vec![(Dyadic::zero(), 0)];
        for k in 1..(1u32 << n) {
            segs.push((half.checked_add(&Dyadic::pow2_neg(k + 1)).expect("below 1"), k as usize));
        }
        Self::new(segs)
    }

    /// Pieces of `I_1, …, I_{k_max}` labelled `k`, and `J_{k_max}` labelled
    /// `k_max + 1`.
    pub fn from_construction(steps: &[IntervalStep]) -> Result<Self> {
        let last = steps.last().ok_or_else(|| Error::InvalidArgument("empty construction".into()))?;
        let mut segs: Vec<(Dyadic, usize)> = steps
            .iter()
            .flat_map(|s| s.i.iter().filter(|p| p.left < p.right).map(move |p| (p.left.clone(), s.k as usize)))
            .collect();
        segs.push((last.j.left.clone(), last.k as usize + 1));
        Self::new(segs)
    }

    pub fn label_count(&self) -> usize {
        self.labels
    }

    pub fn segments(&self) -> &[(Dyadic, usize)] {
        &self.segments
    }

    pub fn label_of(&self, x: &Dyadic) -> usize {
        let idx = self.segments.partition_point(|s| &s.0 <= x);
        self.segments[idx - 1].1
    }

    pub fn label_of_f64(&self, x: f64) -> usize {
        let idx = self.segments.partition_point(|s| s.0.cmp_f64(x).is_le());
        self.segments[idx.max(1) - 1].1
    }

    pub fn label_of_param(&self, p: &Param) -> usize {
        match &p.exact {
            Some(d) => self.label_of(d),
            None => self.label_of_f64(p.value),
        }
    }

    /// For each segment, the smallest `k` with `k/n` at or beyond its left
    /// endpoint; ascending.
    pub fn thresholds(&self, n: u64) -> Vec<(u64, usize)> {
        self.segments.iter().map(|(l, label)| (l.ceil_times(n), *label)).collect()
    }

    /// Label of each `k/n`, `k = 0..=n`, given `thresholds(n)`.
    pub fn alpha_labels(&self, n: u64) -> impl Iterator<Item = usize> {
        let th = self.thresholds(n);
        let mut seg = 0;
        (0..=n).map(move |k| {
            while seg + 1 < th.len() && th[seg + 1].0 <= k {
                seg += 1;
            }
            th[seg].1
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coding::{enumerate_qbstar, kw_example};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn iv(l: &str, r: &str) -> HalfOpen {
        HalfOpen::new(d(l), d(r))
    }

    fn qbstar(max_len: u32, theta0: &str) -> ParamClass {
        let params: Vec<Param> = enumerate_qbstar(max_len).unwrap().into_iter().map(|t| {
            let kw = kw_example(&t);
            Param::exact(t, kw)
        }).collect();
        let t0 = d(theta0);
        let idx = params.iter().position(|p| p.exact.as_ref() == Some(&t0)).unwrap();
        ParamClass::new(params, idx).unwrap()
    }

    fn prop4(n: u32) -> ParamClass {
        let half = d("1/2");
        let mut params = vec![Param::exact(half.clone(), n as f64)];
        for k in 1..(1u32 << n) {
            params.push(Param::exact(half.checked_add(&Dyadic::pow2_neg(k + 1)).unwrap(), n as f64));
        }
        ParamClass::from_unsorted(params.clone(), &params[0]).unwrap()
    }

    #[test]
    fn figure_example() {
        let steps = build_construction(&d("3/16"), 6).unwrap();
        let types: String = steps.iter().map(|s| s.step.to_string()).collect();
        assert_eq!(types, "lclccc");
        assert_eq!(steps[0].j, iv("0", "1/2"));
        assert_eq!(steps[0].i, vec![iv("1/2", "1")]);
        assert_eq!(steps[1].j, iv("1/8", "3/8"));
        assert_eq!(steps[1].i, vec![iv("0", "1/8"), iv("3/8", "1/2")]);
        assert_eq!(steps[2].j, iv("1/8", "1/4"));
        assert_eq!(steps[2].i, vec![iv("1/4", "3/8")]);
        assert_eq!(steps[3].j, iv("5/32", "7/32"));
        assert_eq!(steps[3].i, vec![iv("1/8", "5/32"), iv("7/32", "1/4")]);
    }

    #[test]
    fn centre_start() {
        let steps = build_construction(&d("1/2"), 1).unwrap();
        assert_eq!(steps[0].step, StepType::Center);
        assert_eq!(steps[0].j, iv("1/4", "3/4"));
        assert!(build_construction(&Dyadic::zero(), 3).is_err());
        assert!(build_construction(&Dyadic::one(), 3).is_err());
    }

    fn check_invariants(theta0: &Dyadic, k_max: u32) {
        let steps = build_construction(theta0, k_max).unwrap();
        let mut prev = HalfOpen::new(Dyadic::zero(), Dyadic::one());
        for s in &steps {
            let w = Dyadic::pow2_neg(s.k);
            assert_eq!(s.d, prev.measure());
            assert_eq!(s.i_measure(), w, "θ₀={theta0} k={}", s.k);
            assert_eq!(s.j.measure(), w);
            assert!(s.j.contains(theta0));
            assert!(s.j.is_subset_of(&prev));
            let bound = Dyadic::pow2_neg(s.k - 1);
            for piece in &s.i {
                assert!(piece.is_subset_of(&prev));
                assert!(piece.sup_distance(theta0) <= bound);
                // disjoint from J
                assert!(piece.right <= s.j.left || s.j.right <= piece.left);
            }
            prev = s.j.clone();
        }
    }

    #[test]
    fn sweep_agrees_with_direct_checks() {
        let truths = random_truths(40, 10, 11);
        for t in &truths {
            check_invariants(t, 20);
        }
        let reports = check_construction(&truths, 20).unwrap();
        assert!(reports.iter().all(|r| r.passed() && r.grid_size == 40 * 20));
    }

    #[test]
    fn invariants_on_random_truths() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let len = rng.gen_range(1..=10u32);
            let m = 2 * rng.gen_range(0..(1u64 << (len - 1))) + 1;
            check_invariants(&Dyadic::new(m, len).unwrap(), 20);
        }
    }

    #[test]
    fn bands_are_exclusive() {
        // θ₀ at band boundaries of the first step
        for (t, expect) in [("3/8", StepType::Center), ("5/8", StepType::Right), ("1/4", StepType::Left)] {
            assert_eq!(build_construction(&d(t), 1).unwrap()[0].step, expect, "{t}");
        }
    }

    #[test]
    fn delta_examples() {
        let c = qbstar(12, "3/16");
        let p = delta_profile(&c, 12).unwrap();
        // I_1 = [1/2,1): cheapest 1/2 (Kw 3); J_1 = [0,1/2): cheapest 0 (Kw 2)
        assert_eq!(p.entries[0].delta, 1.0);
        assert_eq!(c.value(p.entries[0].theta_i.unwrap()), 0.5);
        assert_eq!(c.value(p.entries[0].theta_j.unwrap()), 0.0);

        let single = ParamClass::new(vec![Param::exact(d("3/16"), 8.0)], 0).unwrap();
        let p = delta_profile(&single, 10).unwrap();
        assert!(p.entries.iter().all(|e| e.delta.is_infinite()));
        assert_eq!(theorem6_rhs(&p, 8.0).value, 8.0);

        let c = prop4(3);
        let p = delta_profile(&c, 10).unwrap();
        for e in &p.entries {
            assert!(e.delta == 0.0 || e.delta.is_infinite());
            assert_eq!(e.delta == 0.0, e.theta_i.is_some());
        }
        assert!(!p.zero_delta_steps().is_empty());
    }

    #[test]
    fn delta_minimizers_match_linear_scan() {
        for theta0 in ["3/16", "1/2", "5/32", "1/1024"] {
            let c = qbstar(10, theta0);
            let steps = build_construction(&d(theta0), 16).unwrap();
            let p = delta_profile_for(&c, &steps);
            for (s, e) in steps.iter().zip(&p.entries) {
                let scan_i = (0..c.len()).filter(|&i| s.i_contains_param(c.param(i))).map(|i| c.kw(i)).fold(f64::INFINITY, f64::min);
                let scan_j = (0..c.len()).filter(|&i| s.j.contains_param(c.param(i))).map(|i| c.kw(i)).fold(f64::INFINITY, f64::min);
                match e.theta_i {
                    Some(i) => {
                        assert!(s.i_contains_param(c.param(i)));
                        assert_eq!(c.kw(i), scan_i);
                    }
                    None => assert!(scan_i.is_infinite()),
                }
                let j = e.theta_j.unwrap();
                assert!(s.j.contains_param(c.param(j)));
                assert_eq!(c.kw(j), scan_j);
                assert!(c.kw(j) <= c.kw0());
            }
        }
    }

    #[test]
    fn rhs_sum_of_linear_gaps() {
        let entries = (1..=60).map(|k| DeltaEntry { k, theta_i: None, theta_j: None, delta: k as f64 }).collect();
        let r = theorem6_rhs(&DeltaProfile { entries }, 0.0);
        // Σ_{k>=1} 2^-k √k, summed in extended precision elsewhere
        assert!((r.value - 1.3472537527357507).abs() < 1e-14, "{}", r.value);
        assert!(r.last_increment < 1e-15);
    }

    #[test]
    fn condition14_examples() {
        for t in ["1/2", "3/16"] {
            let c = qbstar(10, t);
            let r = condition14_check(&c, 1.0, 0.0, 24).unwrap();
            assert!(r.passed, "{t}: {:?}", r.witness);
            assert!(r.vacuous.contains(&24));
        }
        let c = prop4(3);
        let r = condition14_check(&c, 1.0, 0.0, 24).unwrap();
        assert!(!r.passed);
        let (k, i) = r.witness.unwrap();
        assert_eq!(k, 4);
        assert_eq!(c.param(i).exact, Some(d("9/16")));
    }

    #[test]
    fn condition14_monotone_in_parameters() {
        let c = qbstar(8, "3/16");
        for (a, b) in [(1.0, 0.0), (1.0, 3.0), (2.0, 0.0), (1.5, 1.0)] {
            let base = condition14_check(&c, a, b, 16).unwrap();
            if base.passed {
                for (da, db) in [(0.0, 1.0), (0.5, 0.0), (1.0, 2.0)] {
                    assert!(condition14_check(&c, a + da, b + db, 16).unwrap().passed);
                }
            }
        }
        let p = prop4(3);
        assert!(!condition14_check(&p, 1.0, 0.0, 16).unwrap().passed);
        // large b moves every checked k beyond the class resolution
        assert!(condition14_check(&p, 1.0, 20.0, 30).unwrap().passed);
    }

    #[test]
    fn corollary9_examples() {
        let id = Polynomial::new(vec![0.0, 1.0]);
        let r = corollary9_bound_params(&id, 0.375, 0.1).unwrap();
        assert_eq!((r.order, r.c, r.a, r.b), (1, 1.0, 1.0, 1.0));

        let sq = Polynomial::new(vec![0.0, 0.0, 1.0]);
        let r = corollary9_bound_params(&sq, 0.5, 0.125).unwrap();
        assert_eq!(r.order, 1);
        assert!((r.c - 0.75).abs() < 1e-12);

        // (t - 1/2)^3 + 1/2 = 3/8 + 3/4 t - 3/2 t^2 + t^3
        let cube = Polynomial::new(vec![0.375, 0.75, -1.5, 1.0]);
        let r = corollary9_bound_params(&cube, 0.5, 0.125).unwrap();
        assert_eq!(r.order, 3);
        assert!((r.c - 6.0).abs() < 1e-12);
        assert!((r.b - (6f64.log2() - 6f64.log2() + 1.0)).abs() < 1e-12);

        let flat = Polynomial::new(vec![0.5]);
        assert!(matches!(corollary9_bound_params(&flat, 0.5, 0.1), Err(Error::NoQualifyingOrder { .. })));
        assert!(monotone_on_grid(&cube, 1000));
        assert!(monotone_on_grid(&id, 100));
        assert!(!monotone_on_grid(&Polynomial::new(vec![0.5, -1.0, 1.0]), 100));
    }

    #[test]
    fn partitions() {
        let p = Partition::prop4(3).unwrap();
        assert_eq!(p.label_count(), 8);
        assert_eq!(p.label_of(&d("1/2")), 0);
        assert_eq!(p.label_of(&d("3/4")), 1);
        assert_eq!(p.label_of(&Dyadic::one()), 1);
        assert_eq!(p.label_of(&d("5/8")), 2);
        assert_eq!(p.label_of(&d("11/16")), 2);
        assert_eq!(p.label_of_f64(0.7), 2);
        let labels: Vec<usize> = p.alpha_labels(8).collect();
        // k/8 for k = 0..=8
        assert_eq!(labels, vec![0, 0, 0, 0, 0, 2, 1, 1, 1]);

        let steps = build_construction(&d("3/16"), 4).unwrap();
        let q = Partition::from_construction(&steps).unwrap();
        assert_eq!(q.label_count(), 6);
        assert_eq!(q.label_of(&d("3/4")), 1);
        assert_eq!(q.label_of(&d("1/16")), 2);
        assert_eq!(q.label_of(&d("3/16")), 5);
        assert_eq!(q.label_of(&d("7/32")), 4);
        assert_eq!(q.label_of(&Dyadic::one()), 1);
    }

    #[test]
    fn csv_dumps() {
        let steps = build_construction(&d("3/16"), 2).unwrap();
        let mut buf = Vec::new();
        write_construction_csv(&mut buf, &steps).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("k,type,d,J,I\n1,l,1,\"[0, 1/2)\",\"[1/2, 1)\"\n"));
        let c = qbstar(6, "3/16");
        let mut buf = Vec::new();
        write_delta_csv(&mut buf, &c, &delta_profile(&c, 3).unwrap()).unwrap();
        assert!(String::from_utf8(buf).unwrap().contains("1,1/2,0,3,2,1\n"));
    }
}
