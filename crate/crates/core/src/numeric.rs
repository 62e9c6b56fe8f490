//! Floating-point helpers: compensated summation, double-double arithmetic,
//! and accurate `ln(1+x) - x`.

use std::ops::{Add, Mul, Neg, Sub};

/// Neumaier's variant of Kahan summation. The running error term is carried
/// explicitly so partial sums can be merged in a fixed order.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Folds another accumulator into this one (both terms, in order).
    pub fn merge(&mut self, other: &Self) {
        self.add(other.sum);
        self.add(other.comp);
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = Self::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

/// Sum rounded towards `+∞`: every partial sum is an upper bound on the
/// exact sum of the inputs.
pub fn sum_round_up(terms: impl IntoIterator<Item = f64>) -> f64 {
    let mut s = 0.0f64;
    for x in terms {
        let (t, err) = two_sum(s, x);
        s = if err > 0.0 { t.next_up() } else { t };
    }
    s
}

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`, roughly 106 bits.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

pub const LN2_DD: DoubleDouble = DoubleDouble { hi: 6.931471805599452862e-01, lo: 2.319046813846299558e-17 };

impl DoubleDouble {
    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// Exact `a - b` for two floats.
    pub fn diff(a: f64, b: f64) -> Self {
        let (hi, lo) = two_sum(a, -b);
        Self { hi, lo }
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 { -self } else { self }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let e = e + self.lo * b;
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }

    fn div_f64(self, b: f64) -> Self {
        let q1 = self.hi / b;
        let r = self - Self::from_f64(b).mul_f64(q1);
        let q2 = r.hi / b;
        let r = r - Self::from_f64(b).mul_f64(q2);
        let q3 = r.hi / b;
        let (hi, lo) = quick_two_sum(q1, q2);
        Self { hi, lo } + Self::from_f64(q3)
    }

    fn ldexp(self, e: i32) -> Self {
        let s = (e as f64).exp2();
        Self { hi: self.hi * s, lo: self.lo * s }
    }

    /// `e^x` by argument reduction `x = m ln 2 + r`, `r / 2^10` Taylor series,
    /// then ten squarings.
    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Self::from_f64(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Self::from_f64(0.0);
        }
        let m = (self.hi / LN2_DD.hi).round();
        let r = (self - LN2_DD.mul_f64(m)).ldexp(-10);
        // Taylor series for e^r - 1, |r| < 3.5e-4
        let mut term = r;
        let mut sum = r;
        for i in 2..=12 {
            term = (term * r).div_f64(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-36 {
                break;
            }
        }
        // (1 + s)^2 - 1 = 2s + s^2, keeps the small quantity separate
        for _ in 0..10 {
            sum = sum.mul_f64(2.0) + sum * sum;
        }
        (sum + Self::from_f64(1.0)).ldexp(m as i32)
    }

    /// Natural logarithm, one Newton step on `exp` from the `f64` estimate.
    pub fn ln(self) -> Self {
        if self.hi <= 0.0 {
            return Self::from_f64(if self.hi == 0.0 { f64::NEG_INFINITY } else { f64::NAN });
        }
        if self.hi.is_infinite() {
            return self;
        }
        let y = Self::from_f64(self.hi.ln());
        y + self * (-y).exp() - Self::from_f64(1.0)
    }
}

impl Add for DoubleDouble {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let e = e + t;
        let (s, e) = quick_two_sum(s, e);
        let e = e + f;
        let (hi, lo) = quick_two_sum(s, e);
        Self { hi, lo }
    }
}

impl Neg for DoubleDouble {
    type Output = Self;
    fn neg(self) -> Self {
        Self { hi: -self.hi, lo: -self.lo }
    }
}

impl Sub for DoubleDouble {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        self + (-b)
    }
}

impl Mul for DoubleDouble {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (hi, lo) = quick_two_sum(p, e);
        Self { hi, lo }
    }
}

/// `ln(1 + x) - x` without cancellation for small `|x|`.
pub fn log1pmx(x: f64) -> f64 {
    if !(-0.5..=1.0).contains(&x) {
        return x.ln_1p() - x;
    }
    // ln(1+x) = 2 atanh(r), r = x/(2+x); and x - 2r = r x.
    let r = x / (2.0 + x);
    let r2 = r * r;
    let mut term = r * r2;
    let mut series = 0.0f64;
    let mut k = 3.0;
    while term.abs() > 1e-18 * series.abs().max(f64::MIN_POSITIVE) || k == 3.0 {
        series += term / k;
        term *= r2;
        k += 2.0;
        if k > 200.0 {
            break;
        }
    }
    2.0 * series - r * x
}
