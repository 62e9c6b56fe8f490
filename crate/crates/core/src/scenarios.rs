//! Named parameter classes.

use serde::Serialize;

use crate::coding::{enumerate_qbstar, kw_example};
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::intervals::{corollary9_bound_params, DistortionParams, Polynomial};
use crate::model::{Param, ParamClass};

pub const PROP4_MAX_N: u32 = 8;

/// `θ₀ = 1/2` and `θ_k = 1/2 + 2^{-k-1}` for `k = 1..2^N-1`, all with
/// complexity `N`; `kw0` overrides the complexity of `θ₀` alone.
pub fn prop4_class(n: u32, kw0: Option<f64>) -> Result<ParamClass> {
    if n == 0 || n > PROP4_MAX_N {
        return Err(Error::TooLarge { what: "N", value: n as u64, limit: PROP4_MAX_N as u64 });
    }
    let kw = n as f64;
    let half = Dyadic::new(1u32, 1)?;
    let mut params = vec![Param::exact(half.clone(), kw0.unwrap_or(kw))];
    for k in 1..(1u32 << n) {
        params.push(Param::exact(half.checked_add(&Dyadic::pow2_neg(k + 1)).expect("below 1"), kw));
    }
    // ascending order is θ₀, θ_{2^N-1}, …, θ_1
    params[1..].reverse();
    ParamClass::new(params, 0)
}

/// All finite binary fractions of length at most `max_len`, with the
/// example prefix-code complexities.
pub fn qbstar_class(max_len: u32, theta0: &Dyadic) -> Result<ParamClass> {
    let params: Vec<Param> = enumerate_qbstar(max_len)?
        .into_iter()
        .map(|t| {
            let kw = kw_example(&t);
            Param::exact(t, kw)
        })
        .collect();
    let idx = params
        .binary_search_by(|p| p.exact.as_ref().expect("exact").cmp(theta0))
        .map_err(|_| Error::NotInClass(format!("{theta0} (length {} > max_len {max_len})", theta0.length())))?;
    ParamClass::new(params, idx)
}

/// `φ(Q)` for the fractions `Q` of length at most `max_len`, with
/// `Kw(φ(t)) = Kw(t)` and `θ₀ = φ(t₀)`. Returns the spacing parameters of
/// `φ` around `t₀` alongside.
pub fn distorted_class(poly: &Polynomial, max_len: u32, t0: &Dyadic, eps: f64) -> Result<(ParamClass, DistortionParams)> {
    let ts = enumerate_qbstar(max_len)?;
    let t0_index = ts.binary_search(t0).map_err(|_| Error::NotInClass(t0.to_string()))?;
    let values: Vec<f64> = ts.iter().map(|t| poly.eval(t.to_f64())).collect();
    for (t, &v) in ts.iter().zip(&values) {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::MapOutOfRange(t.to_string()));
        }
    }
    let increasing = values.last() > values.first();
    for (i, w) in values.windows(2).enumerate() {
        let ok = if increasing { w[0] < w[1] } else { w[0] > w[1] };
        if !ok {
            return Err(Error::NotInjective(ts[i].to_string(), ts[i + 1].to_string()));
        }
    }
    let mut params: Vec<Param> = ts.iter().zip(&values).map(|(t, &v)| Param::float(v, kw_example(t))).collect();
    let mut true_index = t0_index;
    if !increasing {
        params.reverse();
        true_index = params.len() - 1 - t0_index;
    }
    let hint = corollary9_bound_params(poly, t0.to_f64(), eps)?;
    Ok((ParamClass::new(params, true_index)?, hint))
}

/// An arbitrary finite class; `true_index` refers to the order given.
pub fn finite_class(params: Vec<Param>, true_index: usize) -> Result<ParamClass> {
    let truth = params
        .get(true_index)
        .cloned()
        .ok_or(Error::BadTrueIndex { index: true_index, len: params.len() })?;
    let class = ParamClass::from_unsorted(params, &truth)?;
    Ok(class)
}

/// `N + Kw(θ₀)` for a class of `N` elements.
pub fn finite_bound(class: &ParamClass) -> f64 {
    class.len() as f64 + class.kw0()
}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSpec {
    Prop4 { n: u32, kw0: Option<f64> },
    Qbstar { max_len: u32, theta0: Dyadic },
    Distorted { poly: Polynomial, max_len: u32, t0: Dyadic, eps: f64 },
    Finite { params: Vec<Param>, true_index: usize },
}

impl ScenarioSpec {
    pub const NAMES: [&'static str; 4] = ["prop4", "qbstar", "distorted", "finite"];

    pub fn kind(&self) -> &'static str {
        match self {
            Self::Prop4 { .. } => "prop4",
            Self::Qbstar { .. } => "qbstar",
            Self::Distorted { .. } => "distorted",
            Self::Finite { .. } => "finite",
        }
    }

    /// Short name safe for file names, e.g. `qbstar-L12-3_16`.
    pub fn label(&self) -> String {
        let s = match self {
            Self::Prop4 { n, kw0: None } => format!("prop4-N{n}"),
            Self::Prop4 { n, kw0: Some(k) } => format!("prop4-N{n}-kw0{k}"),
            Self::Qbstar { max_len, theta0 } => format!("qbstar-L{max_len}-{theta0}"),
            Self::Distorted { max_len, t0, .. } => format!("distorted-L{max_len}-{t0}"),
            Self::Finite { params, .. } => format!("finite-{}", params.len()),
        };
        s.replace(['/', '^'], "_")
    }

    pub fn resolve(&self) -> Result<Scenario> {
        let (class, hint) = match self {
            Self::Prop4 { n, kw0 } => (prop4_class(*n, *kw0)?, None),
            Self::Qbstar { max_len, theta0 } => (qbstar_class(*max_len, theta0)?, None),
            Self::Distorted { poly, max_len, t0, eps } => {
                let (c, h) = distorted_class(poly, *max_len, t0, *eps)?;
                (c, Some(h))
            }
            Self::Finite { params, true_index } => (finite_class(params.clone(), *true_index)?, None),
        };
        Ok(Scenario { label: self.label(), spec: self.clone(), class, hint })
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub label: String,
    pub spec: ScenarioSpec,
    pub class: ParamClass,
    /// Spacing parameters for distorted classes.
    pub hint: Option<DistortionParams>,
}

impl Scenario {
    pub fn summary(&self) -> ScenarioSummary {
        ScenarioSummary {
            scenario: self.label.clone(),
            size: self.class.len(),
            theta0: self.class.theta0(),
            kw0: self.class.kw0(),
            kraft_sum: self.class.kraft_sum(),
            finite_bound: finite_bound(&self.class),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioSummary {
    pub scenario: String,
    pub size: usize,
    pub theta0: f64,
    pub kw0: f64,
    pub kraft_sum: f64,
    pub finite_bound: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn exact_values(c: &ParamClass) -> Vec<String> {
        c.params().iter().map(|p| p.exact.as_ref().unwrap().to_string()).collect()
    }

    #[test]
    fn prop4_examples() {
        let c = prop4_class(1, None).unwrap();
        assert_eq!(exact_values(&c), ["1/2", "3/4"]);
        assert!(c.params().iter().all(|p| p.kw == 1.0));
        let c = prop4_class(2, None).unwrap();
        assert_eq!(exact_values(&c), ["1/2", "9/16", "5/8", "3/4"]);
        assert!(c.params().iter().all(|p| p.kw == 2.0));
        assert_eq!(c.theta0(), 0.5);
        assert_eq!(prop4_class(3, None).unwrap().kraft_sum(), 1.0);
        assert!(prop4_class(9, None).is_err());
        let c = prop4_class(3, Some(2.0)).unwrap();
        assert_eq!(c.kw0(), 2.0);
        assert_eq!(c.kw(1), 3.0);
    }

    #[test]
    fn prop4_is_exact_up_to_n8() {
        for n in 1..=8 {
            let c = prop4_class(n, None).unwrap();
            assert_eq!(c.len(), 1 << n);
            assert!(c.is_exact());
            let top = c.param(1).exact.as_ref().unwrap();
            // θ_{2^N-1} = 1/2 + 2^{-2^N}
            assert_eq!(top.exponent(), 1 << n);
        }
    }

    #[test]
    fn qbstar_examples() {
        let c = qbstar_class(1, &d("1/2")).unwrap();
        let kws: Vec<f64> = c.params().iter().map(|p| p.kw).collect();
        assert_eq!(kws, [2.0, 3.0, 2.0]);
        assert_eq!(c.true_index(), 1);
        let c = qbstar_class(4, &d("3/16")).unwrap();
        assert_eq!(c.len(), 17);
        assert_eq!(c.kw0(), 8.0);
        let c = qbstar_class(2, &Dyadic::one()).unwrap();
        assert_eq!(c.true_index(), 4);
        assert!(matches!(qbstar_class(3, &d("1/16")), Err(Error::NotInClass(_))));
    }

    #[test]
    fn distorted_examples() {
        let id = Polynomial::new(vec![0.0, 1.0]);
        let (c, hint) = distorted_class(&id, 5, &d("3/16"), 0.1).unwrap();
        let q = qbstar_class(5, &d("3/16")).unwrap();
        assert_eq!(c.len(), q.len());
        for (a, b) in c.params().iter().zip(q.params()) {
            assert_eq!((a.value, a.kw), (b.value, b.kw));
        }
        assert_eq!(c.true_index(), q.true_index());
        assert_eq!(hint.a, 1.0);

        let sq = Polynomial::new(vec![0.0, 0.0, 1.0]);
        let (c, _) = distorted_class(&sq, 6, &d("1/2"), 0.125).unwrap();
        assert_eq!(c.theta0(), 0.25);
        assert_eq!(c.value(3), (3.0f64 / 64.0).powi(2));

        let cube = Polynomial::new(vec![0.375, 0.75, -1.5, 1.0]);
        let (_, hint) = distorted_class(&cube, 6, &d("1/2"), 0.125).unwrap();
        assert_eq!(hint.a, 3.0);

        let flip = Polynomial::new(vec![1.0, -1.0]);
        let (c, _) = distorted_class(&flip, 3, &d("1/8"), 0.1).unwrap();
        assert_eq!(c.theta0(), 0.875);

        let bump = Polynomial::new(vec![0.0, 4.0, -4.0]);
        assert!(matches!(distorted_class(&bump, 3, &d("1/4"), 0.1), Err(Error::NotInjective(..))));
        let big = Polynomial::new(vec![0.0, 2.0]);
        assert!(matches!(distorted_class(&big, 3, &d("1/4"), 0.1), Err(Error::MapOutOfRange(_))));
    }

    #[test]
    fn finite_examples() {
        let c = finite_class(vec![Param::float(0.7, 1.0), Param::float(0.3, 1.0)], 1).unwrap();
        assert_eq!(c.theta0(), 0.3);
        assert_eq!(finite_bound(&c), 3.0);
        let single = finite_class(vec![Param::float(0.4, 5.0)], 0).unwrap();
        assert_eq!(finite_bound(&single), 6.0);
        let grid: Vec<Param> = (1..=10).rev().map(|i| Param::float(i as f64 / 11.0, 4.0)).collect();
        let c = finite_class(grid, 0).unwrap();
        assert!(c.params().windows(2).all(|w| w[0].value < w[1].value));
        assert_eq!(c.theta0(), 10.0 / 11.0);
        assert!(finite_class(vec![Param::float(0.5, 1.0), Param::float(0.5, 2.0)], 0).is_err());
    }

    #[test]
    fn every_named_scenario_resolves() {
        let specs = [
            ScenarioSpec::Prop4 { n: 3, kw0: None },
            ScenarioSpec::Qbstar { max_len: 6, theta0: d("5/32") },
            ScenarioSpec::Distorted { poly: Polynomial::new(vec![0.0, 0.0, 1.0]), max_len: 5, t0: d("1/2"), eps: 0.1 },
            ScenarioSpec::Finite { params: vec![Param::float(0.3, 1.0), Param::float(0.7, 1.0)], true_index: 0 },
        ];
        for s in specs {
            let sc = s.resolve().unwrap();
            assert!(sc.class.true_index() < sc.class.len());
            assert!(!sc.label.contains('/'));
        }
    }
}
