//! Exact finite binary fractions in `[0, 1]`.
//!
//! A [`Dyadic`] is `mantissa / 2^exponent` in canonical form: the mantissa
//! is odd, or the value is exactly `0` (`0/2^0`) or `1` (`1/2^0`). Canonical
//! form makes equality structural and turns the binary length `ℓ(θ)` into the
//! exponent.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigUint,
    exponent: u32,
}

impl Dyadic {
    pub fn zero() -> Self {
        Self { mantissa: BigUint::zero(), exponent: 0 }
    }

    pub fn one() -> Self {
        Self { mantissa: BigUint::one(), exponent: 0 }
    }

    /// `2^-exponent`.
    pub fn pow2_neg(exponent: u32) -> Self {
        Self { mantissa: BigUint::one(), exponent }
    }

    /// Builds `mantissa / 2^exponent`, reducing to canonical form.
    pub fn new(mantissa: impl Into<BigUint>, exponent: u32) -> Result<Self> {
        let mantissa = mantissa.into();
        if mantissa > (BigUint::one() << exponent) {
            return Err(Error::OutOfUnitInterval(format!("{mantissa}/2^{exponent}")));
        }
        Ok(Self::canonical(mantissa, exponent))
    }

    fn canonical(mut mantissa: BigUint, mut exponent: u32) -> Self {
        if mantissa.is_zero() {
            return Self::zero();
        }
        let tz = mantissa.trailing_zeros().unwrap_or(0).min(exponent as u64) as u32;
        mantissa >>= tz;
        exponent -= tz;
        Self { mantissa, exponent }
    }

    /// `0.β₁…β_n`; the empty sequence is `0`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        if let Some(&d) = bits.iter().find(|&&d| d > 1) {
            return Err(Error::InvalidDigit(d));
        }
        match bits.last() {
            None => return Ok(Self::zero()),
            Some(0) => return Err(Error::TrailingZero),
            Some(_) => {}
        }
        let mut mantissa = BigUint::zero();
        for &b in bits {
            mantissa = (mantissa << 1u32) + BigUint::from(b);
        }
        Ok(Self { mantissa, exponent: bits.len() as u32 })
    }

    /// Binary digits `β₁…β_ℓ`; `None` for `1`, which has no expansion of the
    /// form `0.β…`.
    pub fn to_bits(&self) -> Option<Vec<u8>> {
        if self.is_one() {
            return None;
        }
        let e = self.exponent as u64;
        Some((0..e).map(|i| u8::from(self.mantissa.bit(e - 1 - i))).collect())
    }

    /// The length `ℓ(θ)`: number of binary digits up to and including the last
    /// `1`. Zero for `0` and `1`.
    pub fn length(&self) -> u32 {
        self.exponent
    }

    pub fn mantissa(&self) -> &BigUint {
        &self.mantissa
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0 && self.mantissa.is_one()
    }

    /// Nearest `f64`; exact whenever the mantissa has at most 53 significant
    /// bits and the exponent stays in the normal range.
    pub fn to_f64(&self) -> f64 {
        if let Some(m) = self.mantissa.to_u64() {
            if m < (1u64 << 53) {
                return m as f64 * (-(self.exponent as f64)).exp2();
            }
        }
        // Keep the 64 leading bits; the rounding error is below 2^-63 relative.
        let bits = self.mantissa.bits();
        let shift = bits.saturating_sub(64);
        let top = (&self.mantissa >> shift).to_u64().unwrap_or(u64::MAX) as f64;
        top * (shift as f64 - self.exponent as f64).exp2()
    }

    /// Exact `f64` conversion when one exists.
    pub fn to_f64_exact(&self) -> Option<f64> {
        let m = self.mantissa.to_u64()?;
        if m >= (1u64 << 53) || self.exponent > 1022 {
            return None;
        }
        Some(m as f64 * (-(self.exponent as f64)).exp2())
    }

    /// Exact conversion of a finite `f64` in `[0, 1]`.
    pub fn from_f64(x: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfUnitInterval(x.to_string()));
        }
        if x == 0.0 {
            return Ok(Self::zero());
        }
        let bits = x.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if raw_exp == 0 { (frac, 1074) } else { (frac | (1u64 << 52), 1075 - raw_exp) };
        Ok(Self::canonical(BigUint::from(m), e as u32))
    }

    pub fn checked_add(&self, rhs: &Self) -> Option<Self> {
        let e = self.exponent.max(rhs.exponent);
        let m = (&self.mantissa << (e - self.exponent)) + (&rhs.mantissa << (e - rhs.exponent));
        Self::new(m, e).ok()
    }

    pub fn checked_sub(&self, rhs: &Self) -> Option<Self> {
        let e = self.exponent.max(rhs.exponent);
        let a = &self.mantissa << (e - self.exponent);
        let b = &rhs.mantissa << (e - rhs.exponent);
        if a < b {
            return None;
        }
        Some(Self::canonical(a - b, e))
    }

    pub fn mul(&self, rhs: &Self) -> Self {
        Self::canonical(&self.mantissa * &rhs.mantissa, self.exponent + rhs.exponent)
    }

    /// `self · 2^-k`.
    pub fn shr(&self, k: u32) -> Self {
        Self::canonical(self.mantissa.clone(), self.exponent + k)
    }

    /// `|self - other|`.
    pub fn abs_diff(&self, other: &Self) -> Self {
        self.checked_sub(other).or_else(|| other.checked_sub(self)).expect("one order is non-negative")
    }

    /// Smallest integer `k` with `k / n >= self`, i.e. `⌈n·self⌉`.
    pub fn ceil_times(&self, n: u64) -> u64 {
        if let Some(m) = self.mantissa.to_u64() {
            if self.exponent < 64 {
                let num = m as u128 * n as u128;
                let den = 1u128 << self.exponent;
                return num.div_ceil(den) as u64;
            }
        }
        let num = &self.mantissa * BigUint::from(n);
        let den = BigUint::one() << self.exponent;
        let (q, r) = num.div_rem(&den);
        let q = if r.is_zero() { q } else { q + 1u32 };
        q.to_u64().expect("bounded by n")
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new(BigInt::from(self.mantissa.clone()), BigInt::one() << self.exponent)
    }

    /// Compares `self` with the rational `num / den`.
    pub fn cmp_ratio(&self, num: u64, den: u64) -> Ordering {
        let lhs = &self.mantissa * BigUint::from(den);
        let rhs = BigUint::from(num) << self.exponent;
        lhs.cmp(&rhs)
    }

    /// Compares `self` with an arbitrary finite float exactly.
    pub fn cmp_f64(&self, x: f64) -> Ordering {
        if x < 0.0 {
            return Ordering::Greater;
        }
        if x > 1.0 {
            return Ordering::Less;
        }
        self.cmp(&Self::from_f64(x).expect("checked range"))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        let e = self.exponent.max(other.exponent);
        let a = &self.mantissa << (e - self.exponent);
        let b = &other.mantissa << (e - other.exponent);
        a.cmp(&b)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exponent == 0 {
            write!(f, "{}", self.mantissa)
        } else if self.exponent < 64 {
            write!(f, "{}/{}", self.mantissa, 1u64 << self.exponent)
        } else {
            write!(f, "{}/2^{}", self.mantissa, self.exponent)
        }
    }
}

/// Accepts `0`, `1`, binary fractions `0.β₁…β_n`, and rationals `p/q` or
/// `p/2^q` whose denominator is a power of two.
impl FromStr for Dyadic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::ParseDyadic(s.to_string());
        if let Some(digits) = s.strip_prefix("0.") {
            let bits: Vec<u8> = digits
                .chars()
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(bad()),
                })
                .collect::<Result<_>>()?;
            // A binary literal may carry trailing zeros ("0.100"); strip them.
            let end = bits.iter().rposition(|&b| b == 1).map_or(0, |i| i + 1);
            return Self::from_bits(&bits[..end]);
        }
        if let Some((p, q)) = s.split_once('/') {
            let p: BigUint = p.trim().parse().map_err(|_| bad())?;
            let q = q.trim();
            let exponent = if let Some(e) = q.strip_prefix("2^") {
                e.trim().parse::<u32>().map_err(|_| bad())?
            } else {
                let q: u64 = q.parse().map_err(|_| bad())?;
                if !q.is_power_of_two() {
                    return Err(bad());
                }
                q.trailing_zeros()
            };
            return Self::new(p, exponent);
        }
        match s {
            "0" => Ok(Self::zero()),
            "1" => Ok(Self::one()),
            _ => Err(bad()),
        }
    }
}
