//! Complexities `Kw(θ)` in bits and their Kraft sums.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::numeric::sum_round_up;

/// Largest `max_len` accepted by [`enumerate_qbstar`].
pub const MAX_ENUM_LEN: u32 = 24;

/// Complexity of the prefix code on finite binary fractions: the codes `10`
/// and `11` for `0` and `1`, otherwise a self-delimiting code for `ℓ(θ)`
/// followed by the first `ℓ(θ) - 1` digits.
pub fn kw_example(theta: &Dyadic) -> f64 {
    let len = theta.length();
    if len == 0 {
        return 2.0;
    }
    let lb = 31 - (len + 1).leading_zeros();
    (len + 2 * lb) as f64
}

/// `{0, 1}` and every fraction with `1 <= ℓ(θ) <= max_len`, ascending.
pub fn enumerate_qbstar(max_len: u32) -> Result<Vec<Dyadic>> {
    if max_len > MAX_ENUM_LEN {
        return Err(Error::TooLarge { what: "max_len", value: max_len as u64, limit: MAX_ENUM_LEN as u64 });
    }
    let size = 1u64 << max_len;
    let mut out = Vec::with_capacity(size as usize + 1);
    for m in 0..=size {
        out.push(Dyadic::new(m, max_len).expect("m <= 2^max_len"));
    }
    Ok(out)
}

/// `Σ 2^-Kw` with every partial sum rounded upwards.
pub fn kraft_sum_of(kws: impl IntoIterator<Item = f64>) -> f64 {
    sum_round_up(kws.into_iter().map(|kw| {
        let w = (-kw).exp2();
        // exp2 of a non-integer is only faithfully rounded
        if kw.fract() == 0.0 { w } else { w.next_up() }
    }))
}

/// A named rule producing complexities for a set of dyadic parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum ComplexityRule {
    /// The prefix code of [`kw_example`].
    ExampleCoding,
    /// The same complexity for every parameter.
    Uniform(f64),
}

impl FromStr for ComplexityRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "example-coding" {
            return Ok(Self::ExampleCoding);
        }
        if let Some(n) = s.strip_prefix("uniform:") {
            let n: f64 = n.trim().parse().map_err(|_| Error::Config(format!("bad uniform complexity {s:?}")))?;
            check_kw(n)?;
            return Ok(Self::Uniform(n));
        }
        Err(Error::Config(format!("unknown complexity rule {s:?}")))
    }
}

fn check_kw(kw: f64) -> Result<f64> {
    if kw.is_finite() && kw >= 0.0 { Ok(kw) } else { Err(Error::BadComplexity(kw)) }
}

/// Complexities of a finite set of dyadic parameters.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ComplexityAssignment {
    table: BTreeMap<Dyadic, f64>,
}

impl ComplexityAssignment {
    pub fn from_table(entries: impl IntoIterator<Item = (Dyadic, f64)>) -> Result<Self> {
        let mut table = BTreeMap::new();
        for (theta, kw) in entries {
            table.insert(theta, check_kw(kw)?);
        }
        Ok(Self { table })
    }

    pub fn from_rule(rule: &ComplexityRule, params: impl IntoIterator<Item = Dyadic>) -> Self {
        let table = params
            .into_iter()
            .map(|t| {
                let kw = match rule {
                    ComplexityRule::ExampleCoding => kw_example(&t),
                    ComplexityRule::Uniform(n) => *n,
                };
                (t, kw)
            })
            .collect();
        Self { table }
    }

    /// Missing parameters are an error; there is no default complexity.
    pub fn kw(&self, theta: &Dyadic) -> Result<f64> {
        self.table.get(theta).copied().ok_or_else(|| Error::MissingComplexity(theta.to_string()))
    }

    pub fn len(&self) -> usize {
        self.table.len()
    }

    pub fn is_empty(&self) -> bool {
        self.table.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Dyadic, f64)> {
        self.table.iter().map(|(t, &kw)| (t, kw))
    }

    /// Weights `w_θ = 2^-Kw(θ)`.
    pub fn weight(&self, theta: &Dyadic) -> Result<f64> {
        Ok((-self.kw(theta)?).exp2())
    }

    pub fn kraft_sum(&self) -> f64 {
        kraft_sum_of(self.table.values().copied())
    }

    /// Checks the sub-Kraft property `Σ 2^-Kw <= 1` with upward rounding.
    pub fn require_sub_kraft(&self) -> Result<f64> {
        let s = self.kraft_sum();
        if s <= 1.0 { Ok(s) } else { Err(Error::KraftViolated(s)) }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    #[test]
    fn example_coding_values() {
        assert_eq!(kw_example(&Dyadic::zero()), 2.0);
        assert_eq!(kw_example(&Dyadic::one()), 2.0);
        assert_eq!(kw_example(&d("1/2")), 3.0);
        assert_eq!(kw_example(&d("3/16")), 8.0);
        // ℓ = 3: 3 + 2⌊lb 4⌋ = 7
        assert_eq!(kw_example(&d("3/8")), 7.0);
    }

    #[test]
    fn example_coding_dominates_length() {
        for t in enumerate_qbstar(12).unwrap() {
            if t.length() >= 1 {
                assert!(kw_example(&t) >= t.length() as f64);
            }
        }
    }

    #[test]
    fn enumeration_examples() {
        let one = enumerate_qbstar(1).unwrap();
        assert_eq!(one, vec![Dyadic::zero(), d("1/2"), Dyadic::one()]);
        let two = enumerate_qbstar(2).unwrap();
        assert_eq!(two, vec![Dyadic::zero(), d("1/4"), d("1/2"), d("3/4"), Dyadic::one()]);
        assert_eq!(enumerate_qbstar(3).unwrap().len(), 9);
        assert_eq!(enumerate_qbstar(0).unwrap(), vec![Dyadic::zero(), Dyadic::one()]);
        assert!(enumerate_qbstar(25).is_err());
    }

    #[test]
    fn enumeration_is_sorted_with_expected_count() {
        for len in 0..=10 {
            let all = enumerate_qbstar(len).unwrap();
            assert_eq!(all.len() as u64, 2 + (1u64 << len) - 1);
            assert!(all.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn kraft_sums() {
        let a = ComplexityAssignment::from_table([(d("1/4"), 1.0), (d("3/4"), 1.0)]).unwrap();
        assert_eq!(a.kraft_sum(), 1.0);
        let prop4: Vec<Dyadic> = (0..8).map(|k| if k == 0 { d("1/2") } else { d("1/2").checked_add(&Dyadic::pow2_neg(k + 1)).unwrap() }).collect();
        let a = ComplexityAssignment::from_rule(&ComplexityRule::Uniform(3.0), prop4);
        assert_eq!(a.kraft_sum(), 1.0);
        for len in 0..=14 {
            let a = ComplexityAssignment::from_rule(&ComplexityRule::ExampleCoding, enumerate_qbstar(len).unwrap());
            assert!(a.require_sub_kraft().is_ok(), "max_len {len}: {}", a.kraft_sum());
        }
    }

    #[test]
    fn missing_entry_is_an_error() {
        let a = ComplexityAssignment::from_table([(d("1/4"), 1.0)]).unwrap();
        assert!(matches!(a.kw(&d("1/2")), Err(Error::MissingComplexity(_))));
        assert!(ComplexityAssignment::from_table([(d("1/4"), -1.0)]).is_err());
        let bad = ComplexityAssignment::from_table([(d("1/4"), 0.5), (d("3/4"), 0.5)]).unwrap();
        assert!(matches!(bad.require_sub_kraft(), Err(Error::KraftViolated(_))));
    }

    #[test]
    fn rule_parsing() {
        assert_eq!("example-coding".parse::<ComplexityRule>().unwrap(), ComplexityRule::ExampleCoding);
        assert_eq!("uniform:3".parse::<ComplexityRule>().unwrap(), ComplexityRule::Uniform(3.0));
        assert!("uniform:x".parse::<ComplexityRule>().is_err());
        assert!("huffman".parse::<ComplexityRule>().is_err());
    }
}
