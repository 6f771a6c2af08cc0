//! Signed log-magnitude numbers.
//!
//! Entropies of Hamming subgraphs grow like `q^(d-r)`, which leaves the range
//! of `f64` long before the sweeps we care about stop. A [`LogValue`] keeps a
//! sign and the natural log of the magnitude, so products are additions and
//! sums go through log-sum-exp.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use super::ln_biguint;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Sign {
    Negative,
    Zero,
    Positive,
}

impl Sign {
    fn flip(self) -> Sign {
        match self {
            Sign::Negative => Sign::Positive,
            Sign::Zero => Sign::Zero,
            Sign::Positive => Sign::Negative,
        }
    }

    fn times(self, other: Sign) -> Sign {
        match (self, other) {
            (Sign::Zero, _) | (_, Sign::Zero) => Sign::Zero,
            (a, b) if a == b => Sign::Positive,
            _ => Sign::Negative,
        }
    }

    pub fn as_f64(self) -> f64 {
        match self {
            Sign::Negative => -1.0,
            Sign::Zero => 0.0,
            Sign::Positive => 1.0,
        }
    }
}

/// A real number stored as `sign * exp(ln_mag)`.
///
/// `ln_mag` is meaningless when the sign is [`Sign::Zero`]; equality and all
/// arithmetic treat every zero as the same value.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct LogValue {
    sign: Sign,
    ln_mag: f64,
}

impl LogValue {
    pub const ZERO: LogValue = LogValue { sign: Sign::Zero, ln_mag: f64::NEG_INFINITY };
    pub const ONE: LogValue = LogValue { sign: Sign::Positive, ln_mag: 0.0 };

    /// Builds a value from its sign and log-magnitude. A non-finite
    /// `ln_mag` of `-inf` is normalized to zero.
    pub fn new(sign: Sign, ln_mag: f64) -> LogValue {
        if sign == Sign::Zero || ln_mag == f64::NEG_INFINITY {
            LogValue::ZERO
        } else {
            LogValue { sign, ln_mag }
        }
    }

    /// Positive value `exp(ln_mag)`.
    pub fn from_ln(ln_mag: f64) -> LogValue {
        LogValue::new(Sign::Positive, ln_mag)
    }

    pub fn from_f64(x: f64) -> LogValue {
        match x.partial_cmp(&0.0) {
            Some(Ordering::Greater) => LogValue::from_ln(x.ln()),
            Some(Ordering::Less) => LogValue::new(Sign::Negative, (-x).ln()),
            _ => LogValue::ZERO,
        }
    }

    pub fn from_biguint(x: &BigUint) -> LogValue {
        LogValue::from_ln(ln_biguint(x))
    }

    pub fn sign(&self) -> Sign {
        self.sign
    }

    pub fn ln_mag(&self) -> f64 {
        self.ln_mag
    }

    pub fn is_zero(&self) -> bool {
        self.sign == Sign::Zero
    }

    /// Base-10 log of the magnitude; `-inf` for zero.
    pub fn log10_mag(&self) -> f64 {
        if self.is_zero() {
            f64::NEG_INFINITY
        } else {
            self.ln_mag / std::f64::consts::LN_10
        }
    }

    /// Plain value; saturates to `±inf` or `0` outside the `f64` range.
    pub fn to_f64(&self) -> f64 {
        self.sign.as_f64() * self.ln_mag.exp()
    }

    /// Plain value when it is finite and not flushed to zero.
    pub fn to_finite_f64(&self) -> Option<f64> {
        if self.is_zero() {
            return Some(0.0);
        }
        let v = self.to_f64();
        (v.is_finite() && v != 0.0).then_some(v)
    }

    pub fn abs(&self) -> LogValue {
        if self.is_zero() {
            *self
        } else {
            LogValue::from_ln(self.ln_mag)
        }
    }

    pub fn powf(&self, p: f64) -> LogValue {
        match self.sign {
            Sign::Zero => LogValue::ZERO,
            Sign::Positive => LogValue::from_ln(self.ln_mag * p),
            Sign::Negative => LogValue::new(Sign::Negative, f64::NAN),
        }
    }

    /// `self / other` as a plain ratio. Used for dimensionless normalizations
    /// of two huge quantities.
    pub fn ratio(&self, other: &LogValue) -> f64 {
        (*self / *other).to_f64()
    }

    /// Compensated sum of many values. Positive and negative parts are
    /// accumulated separately around their own maxima and combined once.
    pub fn sum<I: IntoIterator<Item = LogValue>>(values: I) -> LogValue {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        for v in values {
            match v.sign {
                Sign::Positive => pos.push(v.ln_mag),
                Sign::Negative => neg.push(v.ln_mag),
                Sign::Zero => {}
            }
        }
        let p = LogValue::from_ln(log_sum_exp(&pos));
        let n = LogValue::from_ln(log_sum_exp(&neg));
        p - n
    }
}

/// `ln(sum(exp(x_i)))` with Neumaier-compensated accumulation of the shifted
/// exponentials. Empty input gives `-inf`.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    if max == f64::INFINITY {
        return f64::INFINITY;
    }
    let mut sum = 0.0_f64;
    let mut comp = 0.0_f64;
    for &x in xs {
        let t = (x - max).exp();
        let s = sum + t;
        if sum.abs() >= t.abs() {
            comp += (sum - s) + t;
        } else {
            comp += (t - s) + sum;
        }
        sum = s;
    }
    max + (sum + comp).ln()
}

impl PartialEq for LogValue {
    fn eq(&self, other: &Self) -> bool {
        self.sign == other.sign && (self.sign == Sign::Zero || self.ln_mag == other.ln_mag)
    }
}

impl Neg for LogValue {
    type Output = LogValue;
    fn neg(self) -> LogValue {
        LogValue { sign: self.sign.flip(), ln_mag: self.ln_mag }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for LogValue {
    type Output = LogValue;
    fn mul(self, rhs: LogValue) -> LogValue {
        LogValue::new(self.sign.times(rhs.sign), self.ln_mag + rhs.ln_mag)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for LogValue {
    type Output = LogValue;
    fn div(self, rhs: LogValue) -> LogValue {
        match rhs.sign {
            Sign::Zero => LogValue::new(self.sign, f64::INFINITY),
            s => LogValue::new(self.sign.times(s), self.ln_mag - rhs.ln_mag),
        }
    }
}

impl Add for LogValue {
    type Output = LogValue;
    fn add(self, rhs: LogValue) -> LogValue {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.ln_mag >= rhs.ln_mag { (self, rhs) } else { (rhs, self) };
        let delta = small.ln_mag - big.ln_mag;
        if big.sign == small.sign {
            LogValue::new(big.sign, big.ln_mag + delta.exp().ln_1p())
        } else if delta == 0.0 {
            LogValue::ZERO
        } else {
            LogValue::new(big.sign, big.ln_mag + (-delta.exp()).ln_1p())
        }
    }
}

impl Sub for LogValue {
    type Output = LogValue;
    fn sub(self, rhs: LogValue) -> LogValue {
        self + (-rhs)
    }
}

impl fmt::Display for LogValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.sign {
            Sign::Zero => write!(f, "0"),
            s => {
                let l10 = self.log10_mag();
                let exp = l10.floor();
                let mant = 10f64.powf(l10 - exp) * s.as_f64();
                write!(f, "{mant:.12}e{exp}")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_absorbing_for_products() {
        let z = LogValue::ZERO;
        assert!((z * LogValue::from_f64(3.0)).is_zero());
        assert_eq!(z + LogValue::from_f64(2.5), LogValue::from_f64(2.5));
    }

    #[test]
    fn mixed_sign_addition() {
        let a = LogValue::from_f64(5.0);
        let b = LogValue::from_f64(-3.0);
        assert!(((a + b).to_f64() - 2.0).abs() < 1e-14);
        assert!(((b + a).to_f64() - 2.0).abs() < 1e-14);
        assert!(((b - a).to_f64() + 8.0).abs() < 1e-14);
        assert!((a - a).is_zero());
    }

    #[test]
    fn huge_magnitudes_stay_finite() {
        let big = LogValue::from_ln(1.0e5);
        let twice = big + big;
        assert!((twice.ln_mag() - (1.0e5 + 2f64.ln())).abs() < 1e-9);
        assert_eq!(big.to_finite_f64(), None);
        // ln magnitudes near 1e5 carry absolute error ~1e-11.
        assert!((big.ratio(&twice) - 0.5).abs() < 1e-10);
    }

    #[test]
    fn compensated_sum_matches_plain_sum() {
        let xs = [1.5, -0.25, 3.0, -4.0, 1e-3];
        let s = LogValue::sum(xs.iter().map(|&x| LogValue::from_f64(x)));
        assert!((s.to_f64() - xs.iter().sum::<f64>()).abs() < 1e-14);
    }

    #[test]
    fn log_sum_exp_edge_cases() {
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[0.0, 0.0]) - 2f64.ln()).abs() < 1e-15);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }
}
