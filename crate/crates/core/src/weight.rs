//! Log-domain weights.
//!
//! Products of many `λ_v < 1` underflow quickly, so every weight and ratio is
//! carried as a natural logarithm. The zero weight is represented explicitly by
//! [`LogWeight::ZERO`] (whose logarithm is `-∞`).

use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul};

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);
    pub const ONE: LogWeight = LogWeight(0.0);

    /// Wrap a linear-domain nonnegative value.
    pub fn from_value(x: f64) -> Self {
        assert!(x >= 0.0, "weights are nonnegative, got {x}");
        LogWeight(x.ln())
    }

    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan() && ln != f64::INFINITY, "invalid log weight {ln}");
        LogWeight(ln)
    }

    pub fn ln(self) -> f64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }

    /// `ln(self / other)`. Returns `+∞` when only `other` is zero and `NaN`
    /// never: `0 / 0` is reported as `-∞` (nothing to gain by moving).
    pub fn ln_ratio(self, other: LogWeight) -> f64 {
        match (self.is_zero(), other.is_zero()) {
            (true, _) => f64::NEG_INFINITY,
            (false, true) => f64::INFINITY,
            (false, false) => self.0 - other.0,
        }
    }
}

// Products of weights are sums of logarithms.
#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for LogWeight {
    type Output = LogWeight;
    fn mul(self, rhs: LogWeight) -> LogWeight {
        LogWeight(self.0 + rhs.0)
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for LogWeight {
    type Output = LogWeight;
    fn div(self, rhs: LogWeight) -> LogWeight {
        assert!(!rhs.is_zero(), "division by the zero weight");
        LogWeight(self.0 - rhs.0)
    }
}

impl Add for LogWeight {
    type Output = LogWeight;
    fn add(self, rhs: LogWeight) -> LogWeight {
        LogWeight(ln_add_exp(self.0, rhs.0))
    }
}

impl Product for LogWeight {
    fn product<I: Iterator<Item = LogWeight>>(iter: I) -> Self {
        LogWeight(iter.map(|w| w.0).sum())
    }
}

impl Sum for LogWeight {
    fn sum<I: Iterator<Item = LogWeight>>(iter: I) -> Self {
        let v: Vec<f64> = iter.map(|w| w.0).collect();
        LogWeight(log_sum_exp(&v))
    }
}

/// `ln(e^a + e^b)` without overflow.
pub fn ln_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    if hi == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// `ln Σ e^{x_i}`, summed in slice order after shifting by the maximum.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    let mut acc = 0.0;
    for &x in xs {
        acc += (x - max).exp();
    }
    max + acc.ln()
}

/// `ln(1 + e^x)`, the log of a cluster factor `1 + ∏ λ`.
#[inline]
pub fn ln_one_plus_exp(x: f64) -> f64 {
    if x > 35.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

/// Relative residual `|a/b - 1|` of two log-domain quantities.
pub fn ln_relative_residual(ln_a: f64, ln_b: f64) -> f64 {
    if ln_a == f64::NEG_INFINITY && ln_b == f64::NEG_INFINITY {
        return 0.0;
    }
    (ln_a - ln_b).exp_m1().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn arithmetic() {
        let a = LogWeight::from_value(2.0);
        let b = LogWeight::from_value(3.0);
        assert_relative_eq!((a * b).value(), 6.0, epsilon = 1e-12);
        assert_relative_eq!((a / b).value(), 2.0 / 3.0, epsilon = 1e-12);
        assert_relative_eq!((a + b).value(), 5.0, epsilon = 1e-12);
        assert!((a * LogWeight::ZERO).is_zero());
        assert_eq!((LogWeight::ZERO + a), a);
    }

    #[test]
    fn ratios_with_zero() {
        let a = LogWeight::from_value(0.5);
        assert_eq!(a.ln_ratio(LogWeight::ZERO), f64::INFINITY);
        assert_eq!(LogWeight::ZERO.ln_ratio(a), f64::NEG_INFINITY);
        assert_eq!(LogWeight::ZERO.ln_ratio(LogWeight::ZERO), f64::NEG_INFINITY);
    }

    #[test]
    fn sums_do_not_overflow() {
        let xs = [1000.0, 1000.0 + 2f64.ln()];
        assert_relative_eq!(log_sum_exp(&xs), 1000.0 + 3f64.ln(), epsilon = 1e-12);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert_relative_eq!(ln_one_plus_exp(-800.0), 0.0);
        assert_relative_eq!(ln_one_plus_exp(800.0), 800.0);
    }
}
