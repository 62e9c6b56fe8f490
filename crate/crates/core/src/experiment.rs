//! Flat `key = value` configs and the two drivers behind `mdlb`: loss runs
//! that write a curve and compare it with the known bounds, and check suites
//! that write inequality reports.

use std::fmt;
use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::coding::{ComplexityAssignment, ComplexityRule};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::info::{self, InequalityReport};
use crate::intervals::{self, Polynomial};
use crate::loss::{self, EngineOptions, LossCurve, WindowPolicy, DEFAULT_BUDGET};
use crate::model::{Param, ParamClass, Predictor};
use crate::scenarios::{Scenario, ScenarioSpec, ScenarioSummary};

pub const KNOWN_KEYS: &[&str] = &[
    "scenario", "N", "kw0", "max_len", "theta0", "poly", "t0", "eps", "theta", "kw", "complexity", "true_theta",
    "true_index", "predictor", "horizon", "window", "out", "threads", "budget", "suite", "k_max", "a", "b", "seed",
    "n_max",
];

/// Keys that may appear more than once; all other keys keep their last value.
const REPEATABLE: &[&str] = &["theta", "kw"];

/// Ordered `key = value` pairs from a config file and overrides.
///
/// Lines hold one or more comma-separated pairs; `#` starts a comment and
/// values may be double-quoted (needed for values containing commas).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawConfig {
    entries: Vec<(String, String)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (lineno, line) in text.lines().enumerate() {
            for piece in split_line(line).map_err(|e| Error::Config(format!("line {}: {e}", lineno + 1)))? {
                let (k, v) = piece
                    .split_once('=')
                    .ok_or_else(|| Error::Config(format!("line {}: expected key = value, got {piece:?}", lineno + 1)))?;
                cfg.push(k.trim(), unquote(v.trim()))?;
            }
        }
        Ok(cfg)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    fn push(&mut self, key: &str, value: String) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(Error::Config(format!("unknown key {key:?}")));
        }
        self.entries.push((key.to_string(), value));
        Ok(())
    }

    /// Replaces every earlier value of `key`.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.entries.retain(|(k, _)| k != key);
        self.push(key, value.to_string())
    }

    /// Applies a `key=value` override.
    pub fn set_pair(&mut self, pair: &str) -> Result<()> {
        let (k, v) = pair.split_once('=').ok_or_else(|| Error::Config(format!("expected key=value, got {pair:?}")))?;
        self.set(k.trim(), &unquote(v.trim()))
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.iter().rev().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn get_all(&self, key: &str) -> Vec<&str> {
        self.entries.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()).collect()
    }

    fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(v) => v.parse().map(Some).map_err(|_| Error::Config(format!("bad value for {key}: {v:?}"))),
        }
    }

    fn required<T: FromStr>(&self, key: &str, what: &str) -> Result<T> {
        self.parsed(key)?.ok_or_else(|| Error::Config(format!("{what} needs `{key}`")))
    }

    fn check_repeats(&self) -> Result<()> {
        for key in KNOWN_KEYS.iter().filter(|k| !REPEATABLE.contains(k)) {
            let values = self.get_all(key);
            if values.windows(2).any(|w| w[0] != w[1]) {
                // overrides go through `set`, so conflicting repeats come from the file
                return Err(Error::Config(format!("key {key:?} given more than once")));
            }
        }
        Ok(())
    }
}

fn split_line(line: &str) -> std::result::Result<Vec<String>, String> {
    let mut pieces = Vec::new();
    let mut cur = String::new();
    let mut quoted = false;
    for c in line.chars() {
        match c {
            '"' => {
                quoted = !quoted;
                cur.push(c);
            }
            '#' if !quoted => break,
            ',' if !quoted => pieces.push(std::mem::take(&mut cur)),
            _ => cur.push(c),
        }
    }
    if quoted {
        return Err("unterminated quote".into());
    }
    pieces.push(cur);
    Ok(pieces.into_iter().map(|p| p.trim().to_string()).filter(|p| !p.is_empty()).collect())
}

fn unquote(v: &str) -> String {
    v.strip_prefix('"').and_then(|s| s.strip_suffix('"')).unwrap_or(v).to_string()
}

/// The check suites of [`run_checks`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Lemma1,
    Lemma2,
    Lemma3,
    Intervals,
    Condition14,
    Oracle,
}

impl Suite {
    pub const ALL: [Suite; 6] =
        [Self::Lemma1, Self::Lemma2, Self::Lemma3, Self::Intervals, Self::Condition14, Self::Oracle];

    pub fn name(self) -> &'static str {
        match self {
            Self::Lemma1 => "lemma1",
            Self::Lemma2 => "lemma2",
            Self::Lemma3 => "lemma3",
            Self::Intervals => "intervals",
            Self::Condition14 => "condition14",
            Self::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|x| x.name() == s.trim())
            .ok_or_else(|| Error::Config(format!("unknown suite {s:?} (lemma1, lemma2, lemma3, intervals, condition14, oracle)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub scenario: Option<ScenarioSpec>,
    pub predictor: Predictor,
    pub horizon: u64,
    pub window: WindowPolicy,
    pub out: PathBuf,
    pub threads: usize,
    pub budget: f64,
    pub suite: Option<Suite>,
    /// Truth for the interval suite when no scenario is given.
    pub theta0: Option<Dyadic>,
    pub k_max: u32,
    pub a: f64,
    pub b: f64,
    pub seed: u64,
    /// Largest `n` of the binomial sweep.
    pub n_max: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            scenario: None,
            predictor: Predictor::Mdl,
            horizon: 10_000,
            window: WindowPolicy::Auto,
            out: PathBuf::from("out"),
            threads: EngineOptions::default().threads,
            budget: DEFAULT_BUDGET,
            suite: None,
            theta0: None,
            k_max: 20,
            a: 1.0,
            b: 0.0,
            seed: 1,
            n_max: 2000,
        }
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> Result<Self> {
        raw.check_repeats()?;
        let d = Self::default();
        let cfg = Self {
            scenario: scenario_from_raw(raw)?,
            predictor: raw.parsed("predictor")?.unwrap_or(d.predictor),
            horizon: raw.parsed("horizon")?.unwrap_or(d.horizon),
            window: raw.parsed("window")?.unwrap_or(d.window),
            out: raw.get("out").map(PathBuf::from).unwrap_or(d.out),
            threads: raw.parsed("threads")?.unwrap_or(d.threads),
            budget: raw.parsed("budget")?.unwrap_or(d.budget),
            suite: raw.parsed("suite")?,
            theta0: raw.parsed("theta0")?,
            k_max: raw.parsed("k_max")?.unwrap_or(d.k_max),
            a: raw.parsed("a")?.unwrap_or(d.a),
            b: raw.parsed("b")?.unwrap_or(d.b),
            seed: raw.parsed("seed")?.unwrap_or(d.seed),
            n_max: raw.parsed("n_max")?.unwrap_or(d.n_max),
        };
        if cfg.horizon == 0 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if cfg.threads == 0 {
            return Err(Error::Config("threads must be at least 1".into()));
        }
        Ok(cfg)
    }

    pub fn engine_options(&self) -> EngineOptions {
        EngineOptions { window: self.window, threads: self.threads, budget: self.budget }
    }

    pub fn resolve_scenario(&self) -> Result<Scenario> {
        self.scenario.as_ref().ok_or_else(|| Error::Config("no scenario given".into()))?.resolve()
    }
}

fn parse_poly(s: &str) -> Result<Polynomial> {
    let coeffs: Vec<f64> = s
        .split([',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::Config(format!("bad polynomial coefficient {t:?}"))))
        .collect::<Result<_>>()?;
    if coeffs.is_empty() {
        return Err(Error::Config("poly needs at least one coefficient".into()));
    }
    Ok(Polynomial::new(coeffs))
}

fn scenario_from_raw(raw: &RawConfig) -> Result<Option<ScenarioSpec>> {
    let Some(name) = raw.get("scenario") else { return Ok(None) };
    let spec = match name {
        "prop4" => ScenarioSpec::Prop4 { n: raw.required("N", "prop4")?, kw0: raw.parsed("kw0")? },
        "qbstar" => ScenarioSpec::Qbstar {
            max_len: raw.required("max_len", "qbstar")?,
            theta0: raw.required("theta0", "qbstar")?,
        },
        "distorted" => ScenarioSpec::Distorted {
            poly: parse_poly(raw.get("poly").ok_or_else(|| Error::Config("distorted needs `poly`".into()))?)?,
            max_len: raw.required("max_len", "distorted")?,
            t0: raw.required("t0", "distorted")?,
            eps: raw.required("eps", "distorted")?,
        },
        "finite" => finite_from_raw(raw)?,
        other => {
            return Err(Error::Config(format!("unknown scenario {other:?} ({})", ScenarioSpec::NAMES.join(", "))))
        }
    };
    Ok(Some(spec))
}

/// `theta` entries with either matching `kw` entries or a `complexity` rule;
/// the truth is `true_theta`, or `true_index` into the listed order.
fn finite_from_raw(raw: &RawConfig) -> Result<ScenarioSpec> {
    let thetas: Vec<Dyadic> = raw
        .get_all("theta")
        .into_iter()
        .map(|t| t.parse().map_err(|_| Error::Config(format!("theta must be a dyadic literal, got {t:?}"))))
        .collect::<Result<_>>()?;
    if thetas.is_empty() {
        return Err(Error::Config("finite needs at least one `theta`".into()));
    }
    let kws = raw.get_all("kw");
    let assignment = match (raw.get("complexity"), kws.is_empty()) {
        (Some(rule), true) => ComplexityAssignment::from_rule(&rule.parse::<ComplexityRule>()?, thetas.iter().cloned()),
        (None, false) => {
            if kws.len() != thetas.len() {
                return Err(Error::Config(format!("{} theta entries but {} kw entries", thetas.len(), kws.len())));
            }
            let kws: Vec<f64> = kws
                .into_iter()
                .map(|k| k.parse().map_err(|_| Error::Config(format!("bad kw {k:?}"))))
                .collect::<Result<_>>()?;
            ComplexityAssignment::from_table(thetas.iter().cloned().zip(kws))?
        }
        (Some(_), false) => return Err(Error::Config("give either `kw` entries or `complexity`, not both".into())),
        (None, true) => return Err(Error::Config("finite needs `kw` entries or a `complexity` rule".into())),
    };
    if assignment.len() != thetas.len() {
        return Err(Error::Config("duplicate theta entries".into()));
    }
    let truth: Dyadic = match (raw.parsed::<Dyadic>("true_theta")?, raw.parsed::<usize>("true_index")?) {
        (Some(t), None) => t,
        (None, Some(i)) => thetas
            .get(i)
            .cloned()
            .ok_or(Error::BadTrueIndex { index: i, len: thetas.len() })?,
        _ => return Err(Error::Config("finite needs exactly one of `true_theta`, `true_index`".into())),
    };
    let mut params: Vec<Param> = assignment.iter().map(|(t, kw)| Param::exact(t.clone(), kw)).collect();
    params.sort_by(|a, b| a.exact.cmp(&b.exact));
    let true_index = params
        .iter()
        .position(|p| p.exact.as_ref() == Some(&truth))
        .ok_or_else(|| Error::NotInClass(truth.to_string()))?;
    Ok(ScenarioSpec::Finite { params, true_index })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    /// A lower bound the partial sum has not reached yet.
    NotReached,
    /// The bound's hypotheses do not hold for this run.
    Skipped,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Pass => "PASS",
            Self::Fail => "FAIL",
            Self::NotReached => "NOT_REACHED",
            Self::Skipped => "SKIPPED",
        })
    }
}

/// One bound comparison of a loss run.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundCheck {
    pub name: &'static str,
    /// How `value` should relate to `bound`: `ge`, `le` or `eq`.
    pub relation: &'static str,
    pub value: f64,
    pub bound: f64,
    pub verdict: Verdict,
    /// Whether a failure makes the run fail; observations are only reported.
    pub asserted: bool,
}

impl BoundCheck {
    pub fn line(&self) -> String {
        format!(
            "check={} value={} relation={} bound={} result={} asserted={}",
            self.name, self.value, self.relation, self.bound, self.verdict, self.asserted
        )
    }
}

#[derive(Debug, Clone)]
pub struct LossOutcome {
    pub summary: ScenarioSummary,
    pub predictor: Predictor,
    pub window: WindowPolicy,
    pub curve: LossCurve,
    pub csv: PathBuf,
    pub checks: Vec<BoundCheck>,
}

impl LossOutcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| !c.asserted || c.verdict != Verdict::Fail)
    }

    /// Machine-readable `key=value` lines.
    pub fn summary_lines(&self) -> Vec<String> {
        let s = &self.summary;
        let mut lines = vec![
            format!(
                "scenario={} size={} theta0={} kw0={} kraft_sum={} predictor={} window={} horizon={}",
                s.scenario,
                s.size,
                s.theta0,
                s.kw0,
                s.kraft_sum,
                self.predictor,
                self.window,
                self.curve.horizon()
            ),
            format!(
                "cumulative_lower={} cumulative_upper={} beyond_horizon={} csv={}",
                self.curve.lower(),
                self.curve.upper(),
                self.curve.beyond_horizon,
                self.csv.display()
            ),
        ];
        lines.extend(self.checks.iter().map(BoundCheck::line));
        lines.push(format!("status={}", if self.passed() { "PASS" } else { "FAIL" }));
        lines
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Bound comparisons for a finished curve.
pub fn bound_checks(scenario: &Scenario, curve: &LossCurve) -> Vec<BoundCheck> {
    let class = &scenario.class;
    let lower = curve.lower();
    let mut checks = Vec::new();
    if let (ScenarioSpec::Prop4 { n, .. }, Predictor::Mdl) = (&scenario.spec, curve.predictor) {
        if *n >= 3 {
            let bound = ((1u64 << n) - 5) as f64 / 84.0;
            checks.push(BoundCheck {
                name: "prop4_lower_bound",
                relation: "ge",
                value: lower,
                bound,
                verdict: if lower >= bound { Verdict::Pass } else { Verdict::NotReached },
                asserted: false,
            });
        }
    }
    match curve.predictor {
        Predictor::Mdl | Predictor::Ml => {
            // the maximum-likelihood case is the bound with all complexities zero
            let kw0 = if curve.predictor == Predictor::Ml { 0.0 } else { class.kw0() };
            let violations = loss::instantaneous_bound_violations(curve, kw0).len();
            checks.push(BoundCheck {
                name: "instantaneous_bound_violations",
                relation: "eq",
                value: violations as f64,
                bound: 0.0,
                verdict: if violations == 0 { Verdict::Pass } else { Verdict::Fail },
                asserted: true,
            });
        }
        Predictor::Bayes => {
            let bound = class.kw0() * std::f64::consts::LN_2;
            let sub_kraft = class.kraft_sum() <= 1.0;
            let value = curve.upper();
            checks.push(BoundCheck {
                name: "bayes_bound",
                relation: "le",
                value,
                bound,
                verdict: match (sub_kraft, value <= bound) {
                    (false, _) => Verdict::Skipped,
                    (true, true) => Verdict::Pass,
                    (true, false) => Verdict::Fail,
                },
                asserted: sub_kraft,
            });
        }
    }
    if curve.predictor == Predictor::Mdl {
        let bound = 0.5 * class.kw0();
        checks.push(BoundCheck {
            name: "half_kw_observation",
            relation: "le",
            value: lower,
            bound,
            verdict: if lower <= bound { Verdict::Pass } else { Verdict::Fail },
            asserted: false,
        });
    }
    checks
}

/// Runs the loss engine for the configured scenario, writes
/// `<out>/<scenario>_<predictor>.csv` and compares the curve with the bounds.
pub fn run_loss(config: &ExperimentConfig) -> Result<LossOutcome> {
    let scenario = config.resolve_scenario()?;
    let curve = loss::cumulative_loss(&scenario.class, config.predictor, config.horizon, &config.engine_options())?;
    ensure_dir(&config.out)?;
    let csv = config.out.join(format!("{}_{}.csv", scenario.label, config.predictor));
    curve.write_csv(File::create(&csv)?, &scenario.label)?;
    let checks = bound_checks(&scenario, &curve);
    Ok(LossOutcome { summary: scenario.summary(), predictor: config.predictor, window: config.window, curve, csv, checks })
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub reports: Vec<InequalityReport>,
    pub files: Vec<PathBuf>,
    /// Extra `key=value` lines (witnesses, step types, …).
    pub notes: Vec<String>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(InequalityReport::passed)
    }

    pub fn summary_lines(&self) -> Vec<String> {
        let mut lines: Vec<String> = self
            .reports
            .iter()
            .map(|r| {
                format!(
                    "suite={} lemma={} statement={} grid_size={} violations={} worst_slack={}",
                    self.suite, r.lemma, r.statement, r.grid_size, r.violations, r.worst_slack
                )
            })
            .collect();
        lines.extend(self.notes.iter().cloned());
        lines.extend(self.files.iter().map(|f| format!("csv={}", f.display())));
        lines.push(format!("status={}", if self.passed() { "PASS" } else { "FAIL" }));
        lines
    }
}

pub const LEMMA1_PER_STATEMENT: usize = 10_000;
pub const LEMMA2_THETAS: [f64; 9] = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];
pub const RANDOM_TRUTHS: usize = 100;
pub const ORACLE_MAX_N: u64 = 32;
pub const ORACLE_REL_TOL: f64 = 1e-10;

/// `z = 0.1, 0.2, …, 3.0`.
pub fn lemma3_grid() -> Vec<f64> {
    (1..=30).map(|i| i as f64 / 10.0).collect()
}

/// The small exact classes of the oracle suite: the two smallest symmetric
/// classes and the shortest fraction classes at every interior truth.
pub fn oracle_scenarios() -> Result<Vec<ScenarioSpec>> {
    let mut specs = vec![ScenarioSpec::Prop4 { n: 1, kw0: None }, ScenarioSpec::Prop4 { n: 2, kw0: None }];
    for max_len in [2u32, 3] {
        for theta0 in crate::coding::enumerate_qbstar(max_len)? {
            if !theta0.is_zero() && !theta0.is_one() {
                specs.push(ScenarioSpec::Qbstar { max_len, theta0 });
            }
        }
    }
    Ok(specs)
}

fn oracle_report(label: &str, class: &ParamClass, predictor: Predictor) -> Result<InequalityReport> {
    let mut report = InequalityReport::new("oracle", &format!("{label}/{predictor}"));
    for row in loss::oracle_agreement(class, predictor, ORACLE_MAX_N)? {
        // slack in units of the tolerance
        report.record((ORACLE_REL_TOL - row.rel_error) / ORACLE_REL_TOL);
    }
    Ok(report)
}

fn write_reports(path: PathBuf, reports: &[InequalityReport]) -> Result<PathBuf> {
    info::write_reports_csv(BufWriter::new(File::create(&path)?), reports)?;
    Ok(path)
}

/// Runs one check suite, writing its report CSVs under the output directory.
pub fn run_checks(config: &ExperimentConfig, suite: Suite) -> Result<SuiteOutcome> {
    ensure_dir(&config.out)?;
    let out = |name: &str| config.out.join(name);
    let mut notes = Vec::new();
    let mut files = Vec::new();
    let reports = match suite {
        Suite::Lemma1 => info::check_lemma1(&info::lemma1_random_grid(LEMMA1_PER_STATEMENT, config.seed)),
        Suite::Lemma2 => info::check_lemma2(config.n_max, &LEMMA2_THETAS),
        Suite::Lemma3 => info::check_lemma3(&lemma3_grid())?,
        Suite::Intervals => {
            let scenario = config.scenario.as_ref().map(|s| s.resolve()).transpose()?;
            let truth = match (&config.theta0, &scenario) {
                (Some(t), _) => Some(t.clone()),
                (None, Some(s)) => Some(intervals::exact_truth(&s.class)?),
                (None, None) => None,
            };
            let mut truths = intervals::random_truths(RANDOM_TRUTHS, 10, config.seed);
            if let Some(t) = &truth {
                let steps = intervals::build_construction(t, config.k_max)?;
                let types: String = steps.iter().map(|s| s.step.to_string()).collect();
                notes.push(format!("theta0={t} step_types={types}"));
                let path = out(&format!("construction_{}.csv", file_safe(&t.to_string())));
                intervals::write_construction_csv(BufWriter::new(File::create(&path)?), &steps)?;
                files.push(path);
                truths.insert(0, t.clone());
            }
            if let Some(s) = &scenario {
                let profile = intervals::delta_profile(&s.class, config.k_max)?;
                let rhs = intervals::theorem6_rhs(&profile, s.class.kw0());
                notes.push(format!(
                    "scenario={} gap_bound={} last_increment={} zero_gap_steps={}",
                    s.label,
                    rhs.value,
                    rhs.last_increment,
                    rhs.zero_delta_steps.len()
                ));
                let path = out(&format!("delta_{}.csv", s.label));
                intervals::write_delta_csv(BufWriter::new(File::create(&path)?), &s.class, &profile)?;
                files.push(path);
            }
            intervals::check_construction(&truths, config.k_max)?
        }
        Suite::Condition14 => {
            let s = config.resolve_scenario()?;
            let r = intervals::condition14_check(&s.class, config.a, config.b, config.k_max)?;
            let mut report = InequalityReport::new("condition14", &s.label);
            report.grid_size = r.checked.len();
            if !r.passed {
                report.violations = 1;
                report.worst_slack = -1.0;
            } else if report.grid_size > 0 {
                report.worst_slack = 0.0;
            }
            let witness = match r.witness {
                Some((k, i)) => format!("witness_k={k} witness_theta={} witness_kw={}", s.class.value(i), s.class.kw(i)),
                None => "witness=none".to_string(),
            };
            notes.push(format!(
                "scenario={} a={} b={} k_max={} checked={} vacuous={} {witness}",
                s.label,
                config.a,
                config.b,
                config.k_max,
                r.checked.len(),
                r.vacuous.len()
            ));
            vec![report]
        }
        Suite::Oracle => {
            let mut specs = oracle_scenarios()?;
            if let Some(s) = &config.scenario {
                specs.push(s.clone());
            }
            let mut reports = Vec::new();
            for spec in specs {
                let s = spec.resolve()?;
                for p in Predictor::ALL {
                    reports.push(oracle_report(&s.label, &s.class, p)?);
                }
            }
            reports
        }
    };
    files.insert(0, write_reports(out(&format!("{suite}.csv")), &reports)?);
    Ok(SuiteOutcome { suite, reports, files, notes })
}

fn file_safe(s: &str) -> String {
    s.replace(['/', '^'], "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_pairs_comments_and_quotes() {
        let raw = RawConfig::parse(
            "# prop4 run\nscenario = \"prop4\", N = 3   # trailing\n\npredictor=mdl\npoly = \"0.375, 0.75, -1.5, 1\"\n",
        )
        .unwrap();
        assert_eq!(raw.get("scenario"), Some("prop4"));
        assert_eq!(raw.get("N"), Some("3"));
        assert_eq!(raw.get("poly"), Some("0.375, 0.75, -1.5, 1"));
        assert!(RawConfig::parse("bogus = 1").is_err());
        assert!(RawConfig::parse("scenario").is_err());
        assert!(RawConfig::parse("scenario = \"prop4").is_err());
    }

    #[test]
    fn overrides_replace_file_values() {
        let mut raw = RawConfig::parse("scenario = prop4\nN = 3\nhorizon = 100").unwrap();
        raw.set_pair("horizon=7").unwrap();
        raw.set("predictor", "bayes").unwrap();
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.horizon, 7);
        assert_eq!(cfg.predictor, Predictor::Bayes);
        assert_eq!(cfg.scenario, Some(ScenarioSpec::Prop4 { n: 3, kw0: None }));
    }

    #[test]
    fn conflicting_repeats_and_bad_values_are_errors() {
        let raw = RawConfig::parse("horizon = 5\nhorizon = 6").unwrap();
        assert!(ExperimentConfig::from_raw(&raw).is_err());
        for text in ["horizon = 0", "window = wide", "predictor = map", "scenario = qbstar\nmax_len = 4", "suite = lemma9"] {
            assert!(ExperimentConfig::from_raw(&RawConfig::parse(text).unwrap()).is_err(), "{text}");
        }
    }

    #[test]
    fn finite_class_from_table() {
        let raw = RawConfig::parse("scenario = finite\ntheta = 3/4\nkw = 2\ntheta = 0.01\nkw = 1\ntrue_theta = 1/4").unwrap();
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        let s = cfg.resolve_scenario().unwrap();
        assert_eq!(s.class.len(), 2);
        assert_eq!(s.class.theta0(), 0.25);
        assert_eq!(s.class.kw0(), 1.0);

        let by_rule = RawConfig::parse("scenario = finite\ntheta = 1/2\ntheta = 1/4\ncomplexity = uniform:3\ntrue_index = 1")
            .unwrap();
        let s = ExperimentConfig::from_raw(&by_rule).unwrap().resolve_scenario().unwrap();
        assert_eq!(s.class.theta0(), 0.25);
        assert_eq!(s.class.kw0(), 3.0);

        for text in [
            "scenario = finite\ntheta = 1/2\ntrue_theta = 1/2",
            "scenario = finite\ntheta = 1/2\nkw = 1\nkw = 2\ntrue_theta = 1/2",
            "scenario = finite\ntheta = 0.3\nkw = 1\ntrue_theta = 0.3",
            "scenario = finite\ntheta = 1/2\nkw = 1\ntrue_theta = 1/4",
        ] {
            let r = ExperimentConfig::from_raw(&RawConfig::parse(text).unwrap()).and_then(|c| c.resolve_scenario());
            assert!(r.is_err(), "{text}");
        }
    }

    #[test]
    fn single_element_run_is_zero_and_passes() {
        let dir = tempfile::tempdir().unwrap();
        for pred in Predictor::ALL {
            let raw = RawConfig::parse("scenario = finite\ntheta = 3/8\nkw = 2\ntrue_index = 0\nhorizon = 50").unwrap();
            let mut cfg = ExperimentConfig::from_raw(&raw).unwrap();
            cfg.out = dir.path().to_path_buf();
            cfg.predictor = pred;
            let o = run_loss(&cfg).unwrap();
            assert_eq!(o.curve.upper(), 0.0);
            assert!(o.passed());
            assert!(o.checks.iter().all(|c| c.verdict == Verdict::Pass), "{:?}", o.checks);
            assert!(o.csv.exists());
        }
    }

    #[test]
    fn bayes_bound_asserted_only_for_sub_kraft_classes() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = ExperimentConfig {
            scenario: Some(ScenarioSpec::Qbstar { max_len: 4, theta0: "1/2".parse().unwrap() }),
            predictor: Predictor::Bayes,
            horizon: 200,
            out: dir.path().to_path_buf(),
            threads: 1,
            ..Default::default()
        };
        let o = run_loss(&cfg).unwrap();
        let c = o.checks.iter().find(|c| c.name == "bayes_bound").unwrap();
        assert!(c.asserted && c.verdict == Verdict::Pass);

        // Kw 0 for the truth breaks the Kraft sum
        cfg.scenario = Some(ScenarioSpec::Prop4 { n: 2, kw0: Some(0.0) });
        let o = run_loss(&cfg).unwrap();
        let c = o.checks.iter().find(|c| c.name == "bayes_bound").unwrap();
        assert_eq!(c.verdict, Verdict::Skipped);
        assert!(!c.asserted);
    }

    #[test]
    fn small_suites_write_reports() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            out: dir.path().to_path_buf(),
            theta0: Some("3/16".parse().unwrap()),
            k_max: 4,
            n_max: 60,
            ..Default::default()
        };
        let o = run_checks(&cfg, Suite::Intervals).unwrap();
        assert!(o.passed());
        assert!(o.notes[0].contains("step_types=lclc"), "{:?}", o.notes);
        assert_eq!(o.files.len(), 2);
        assert!(run_checks(&cfg, Suite::Lemma2).unwrap().passed());
        assert!(run_checks(&cfg, Suite::Lemma3).unwrap().passed());
        assert!(matches!(run_checks(&cfg, Suite::Condition14), Err(Error::Config(_))));
    }

    #[test]
    fn condition14_suite_reports_witness() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = ExperimentConfig {
            out: dir.path().to_path_buf(),
            scenario: Some(ScenarioSpec::Prop4 { n: 3, kw0: None }),
            k_max: 12,
            ..Default::default()
        };
        let o = run_checks(&cfg, Suite::Condition14).unwrap();
        assert!(!o.passed());
        assert!(o.notes[0].contains("witness_k=4"), "{:?}", o.notes);
    }
}
