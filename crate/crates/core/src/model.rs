//! Parameter classes and the three predictors.
//!
//! All selection goes through the code length
//! `L(θ) = -k ln θ - (n-k) ln(1-θ) + Kw(θ) ln 2`, which differs from the
//! penalized divergence `n·D(α‖θ) + Kw(θ) ln 2` only by the common term
//! `n·H(α)`. Near-ties in `f64` are re-evaluated in double-double precision;
//! remaining exact ties go to the lower complexity, then the smaller value.

use std::fmt;
use std::str::FromStr;

use crate::coding::kraft_sum_of;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::numeric::{DoubleDouble, LN2_DD};

/// One class member.
#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub value: f64,
    /// Exact value when the parameter is a finite binary fraction.
    pub exact: Option<Dyadic>,
    /// Complexity in bits.
    pub kw: f64,
}

impl Param {
    pub fn exact(theta: Dyadic, kw: f64) -> Self {
        Self { value: theta.to_f64(), exact: Some(theta), kw }
    }

    pub fn float(value: f64, kw: f64) -> Self {
        Self { value, exact: None, kw }
    }

    pub fn weight(&self) -> f64 {
        (-self.kw).exp2()
    }

    fn label(&self) -> String {
        match &self.exact {
            Some(d) => d.to_string(),
            None => self.value.to_string(),
        }
    }
}

/// A finite, strictly increasing list of parameters with a designated true
/// member `θ₀`.
#[derive(Debug, Clone)]
pub struct ParamClass {
    params: Vec<Param>,
    true_index: usize,
    ln_theta: Vec<f64>,
    ln_comp: Vec<f64>,
}

impl ParamClass {
    pub fn new(params: Vec<Param>, true_index: usize) -> Result<Self> {
        if params.is_empty() {
            return Err(Error::EmptyClass);
        }
        if true_index >= params.len() {
            return Err(Error::BadTrueIndex { index: true_index, len: params.len() });
        }
        for p in &params {
            if !(0.0..=1.0).contains(&p.value) {
                return Err(Error::OutOfUnitInterval(p.label()));
            }
            if !(p.kw.is_finite() && p.kw >= 0.0) {
                return Err(Error::BadComplexity(p.kw));
            }
        }
        for (i, w) in params.windows(2).enumerate() {
            let increasing = match (&w[0].exact, &w[1].exact) {
                (Some(a), Some(b)) => a < b,
                _ => w[0].value < w[1].value,
            };
            if !increasing {
                return Err(Error::NotIncreasing { index: i + 1 });
            }
        }
        let ln_theta = params.iter().map(|p| p.value.ln()).collect();
        let ln_comp = params.iter().map(|p| (-p.value).ln_1p()).collect();
        Ok(Self { params, true_index, ln_theta, ln_comp })
    }

    /// Sorts `params` by value first; `true_value` selects `θ₀`.
    pub fn from_unsorted(mut params: Vec<Param>, true_value: &Param) -> Result<Self> {
        params.sort_by(|a, b| match (&a.exact, &b.exact) {
            (Some(x), Some(y)) => x.cmp(y),
            _ => a.value.total_cmp(&b.value),
        });
        let idx = params
            .iter()
            .position(|p| p.exact == true_value.exact && p.value == true_value.value)
            .ok_or_else(|| Error::NotInClass(true_value.label()))?;
        Self::new(params, idx)
    }

    pub fn len(&self) -> usize {
        self.params.len()
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty()
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    pub fn param(&self, i: usize) -> &Param {
        &self.params[i]
    }

    pub fn value(&self, i: usize) -> f64 {
        self.params[i].value
    }

    pub fn kw(&self, i: usize) -> f64 {
        self.params[i].kw
    }

    pub fn true_index(&self) -> usize {
        self.true_index
    }

    pub fn theta0(&self) -> f64 {
        self.params[self.true_index].value
    }

    pub fn true_param(&self) -> &Param {
        &self.params[self.true_index]
    }

    pub fn kw0(&self) -> f64 {
        self.params[self.true_index].kw
    }

    /// Every value is an exact finite binary fraction.
    pub fn is_exact(&self) -> bool {
        self.params.iter().all(|p| p.exact.is_some())
    }

    pub fn kraft_sum(&self) -> f64 {
        kraft_sum_of(self.params.iter().map(|p| p.kw))
    }

    pub fn index_of(&self, theta: &Dyadic) -> Option<usize> {
        self.params
            .binary_search_by(|p| match &p.exact {
                Some(d) => d.cmp(theta),
                None => theta.cmp_f64(p.value).reverse(),
            })
            .ok()
    }

    /// The same class with every complexity replaced by `kw`.
    pub fn with_uniform_kw(&self, kw: f64) -> Result<Self> {
        let params = self.params.iter().map(|p| Param { kw, ..p.clone() }).collect();
        Self::new(params, self.true_index)
    }

    pub(crate) fn ln_theta(&self, i: usize) -> f64 {
        self.ln_theta[i]
    }

    pub(crate) fn ln_comp(&self, i: usize) -> f64 {
        self.ln_comp[i]
    }
}

/// Length `n` and number of ones of the observed string.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SufficientStat {
    pub n: u64,
    pub ones: u64,
}

impl SufficientStat {
    pub fn new(n: u64, ones: u64) -> Result<Self> {
        if ones > n {
            return Err(Error::InvalidArgument(format!("{ones} ones in a string of length {n}")));
        }
        Ok(Self { n, ones })
    }

    /// Observed fraction of ones; `0` for the empty string.
    pub fn alpha(&self) -> f64 {
        if self.n == 0 { 0.0 } else { self.ones as f64 / self.n as f64 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Predictor {
    Mdl,
    Bayes,
    Ml,
}

impl Predictor {
    pub const ALL: [Predictor; 3] = [Predictor::Mdl, Predictor::Bayes, Predictor::Ml];

    pub fn name(self) -> &'static str {
        match self {
            Self::Mdl => "mdl",
            Self::Bayes => "bayes",
            Self::Ml => "ml",
        }
    }
}

impl fmt::Display for Predictor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Predictor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "mdl" => Ok(Self::Mdl),
            "bayes" => Ok(Self::Bayes),
            "ml" => Ok(Self::Ml),
            other => Err(Error::Config(format!("unknown predictor {other:?} (mdl, bayes, ml)"))),
        }
    }
}

/// `-count · ln p` with `0 · ln 0 = 0`.
#[inline]
fn neg_count_ln(count: u64, ln_p: f64) -> f64 {
    if count == 0 { 0.0 } else { -(count as f64) * ln_p }
}

/// Absolute `f64` difference between two code lengths below which the order
/// is re-decided in double-double precision.
#[inline]
pub(crate) fn near_tie_tolerance(magnitude: f64) -> f64 {
    1e-12 + 1e-14 * magnitude
}

/// Double-double differences at or below this (relative) size are exact ties.
const EXACT_TIE_RELATIVE: f64 = 1e-26;

/// Code-length evaluation for MDL (`use_kw`) or maximum likelihood.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Scorer<'a> {
    pub class: &'a ParamClass,
    pub use_kw: bool,
}

impl<'a> Scorer<'a> {
    pub fn mdl(class: &'a ParamClass) -> Self {
        Self { class, use_kw: true }
    }

    pub fn ml(class: &'a ParamClass) -> Self {
        Self { class, use_kw: false }
    }

    #[inline]
    pub fn kw(&self, i: usize) -> f64 {
        if self.use_kw { self.class.kw(i) } else { 0.0 }
    }

    #[inline]
    pub fn penalty(&self, i: usize) -> f64 {
        self.kw(i) * std::f64::consts::LN_2
    }

    /// `L(θ_i)` for `k` ones out of `n`, possibly `+∞`.
    #[inline]
    pub fn code_length(&self, i: usize, n: u64, k: u64) -> f64 {
        neg_count_ln(k, self.class.ln_theta(i)) + neg_count_ln(n - k, self.class.ln_comp(i)) + self.penalty(i)
    }

    #[inline]
    pub fn magnitude(&self, i: usize, n: u64, k: u64) -> f64 {
        neg_count_ln(k, self.class.ln_theta(i)).abs()
            + neg_count_ln(n - k, self.class.ln_comp(i)).abs()
            + self.penalty(i)
    }

    fn code_length_dd(&self, i: usize, n: u64, k: u64) -> DoubleDouble {
        let theta = self.class.value(i);
        let mut acc = LN2_DD.mul_f64(self.kw(i));
        if k > 0 {
            acc = acc - DoubleDouble::from_f64(theta).ln().mul_f64(k as f64);
        }
        if n > k {
            acc = acc - DoubleDouble::diff(1.0, theta).ln().mul_f64((n - k) as f64);
        }
        acc
    }

    /// Tie-break order among exact ties: lower complexity, then smaller value.
    fn tie_key(&self, i: usize) -> (f64, usize) {
        (self.kw(i), i)
    }

    fn pick_tie(&self, tied: impl Iterator<Item = usize>) -> usize {
        tied.min_by(|&a, &b| {
            let (ka, ia) = self.tie_key(a);
            let (kb, ib) = self.tie_key(b);
            ka.total_cmp(&kb).then(ia.cmp(&ib))
        })
        .expect("at least one candidate")
    }

    /// Exact argmin of the code length with the deterministic tie-break.
    pub fn select(&self, n: u64, k: u64) -> usize {
        self.select_among(n, k, 0..self.class.len())
    }

    /// Argmin over `candidates` only.
    pub fn select_among(&self, n: u64, k: u64, candidates: impl Iterator<Item = usize> + Clone) -> usize {
        let mut best = f64::INFINITY;
        let mut best_tol = 0.0;
        for i in candidates.clone() {
            let l = self.code_length(i, n, k);
            if l < best {
                best = l;
                best_tol = near_tie_tolerance(self.magnitude(i, n, k));
            }
        }
        if best.is_infinite() {
            return self.pick_tie(candidates);
        }
        let near: Vec<usize> = candidates
            .filter(|&i| {
                let l = self.code_length(i, n, k);
                l.is_finite() && l - best <= best_tol + near_tie_tolerance(self.magnitude(i, n, k))
            })
            .collect();
        if near.len() == 1 {
            return near[0];
        }
        let precise: Vec<(usize, DoubleDouble)> = near.iter().map(|&i| (i, self.code_length_dd(i, n, k))).collect();
        let min = precise.iter().map(|(_, l)| *l).fold(DoubleDouble::from_f64(f64::INFINITY), |a, b| {
            if (b - a).hi < 0.0 || a.hi.is_infinite() { b } else { a }
        });
        let tie = EXACT_TIE_RELATIVE * (1.0 + min.hi.abs());
        self.pick_tie(precise.iter().filter(|(_, l)| (*l - min).hi <= tie).map(|(i, _)| *i))
    }

    /// Whether `θ_i` beats (or ties) `θ_j`: `L(θ_j) - L(θ_i) >= 0`.
    pub fn beats(&self, i: usize, j: usize, n: u64, k: u64) -> bool {
        let li = self.code_length(i, n, k);
        let lj = self.code_length(j, n, k);
        if li.is_infinite() {
            return lj.is_infinite();
        }
        if lj.is_infinite() {
            return true;
        }
        let diff = lj - li;
        let tol = near_tie_tolerance(self.magnitude(i, n, k)) + near_tie_tolerance(self.magnitude(j, n, k));
        if diff.abs() > tol {
            return diff > 0.0;
        }
        let d = self.code_length_dd(j, n, k) - self.code_length_dd(i, n, k);
        d.hi >= -EXACT_TIE_RELATIVE * (1.0 + li.abs())
    }
}

/// Static MDL estimate: argmin of `n·D(α‖θ) + Kw(θ) ln 2`. For `n = 0` this
/// is the minimum-complexity member.
pub fn mdl_select(class: &ParamClass, stat: SufficientStat) -> usize {
    Scorer::mdl(class).select(stat.n, stat.ones)
}

/// Maximum likelihood estimate: MDL with every complexity set to zero.
pub fn ml_select(class: &ParamClass, stat: SufficientStat) -> usize {
    Scorer::ml(class).select(stat.n, stat.ones)
}

/// `θ_i` beats `θ_j` when `n(D(α‖θ_j) - D(α‖θ_i)) >= ln 2 · (Kw(θ_i) - Kw(θ_j))`.
/// Two parameters with infinite divergence tie.
pub fn beats(class: &ParamClass, i: usize, j: usize, stat: SufficientStat) -> bool {
    Scorer::mdl(class).beats(i, j, stat.n, stat.ones)
}

/// Posterior-mean probability of a `1` under the Bayes mixture with prior
/// weights `2^-Kw`.
pub fn bayes_predict(class: &ParamClass, stat: SufficientStat) -> Result<f64> {
    let scorer = Scorer::mdl(class);
    let (n, k) = (stat.n, stat.ones);
    let lw: Vec<f64> = (0..class.len()).map(|i| -scorer.code_length(i, n, k)).collect();
    let max = lw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return Err(Error::PosteriorUnderflow);
    }
    posterior_mean(class, lw.iter().enumerate().map(|(i, &l)| (i, l)), max)
}

/// `Σ w_i θ_i / Σ w_i` with `w_i = exp(lw_i - shift)`.
pub(crate) fn posterior_mean(
    class: &ParamClass,
    log_weights: impl Iterator<Item = (usize, f64)>,
    shift: f64,
) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for (i, l) in log_weights {
        let w = (l - shift).exp();
        num += w * class.value(i);
        den += w;
    }
    if den == 0.0 || !den.is_finite() {
        return Err(Error::PosteriorUnderflow);
    }
    Ok((num / den).clamp(class.value(0), class.value(class.len() - 1)))
}
