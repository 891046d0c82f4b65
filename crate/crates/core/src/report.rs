//! Machine-readable verification outcomes.

use serde::Serialize;

/// One verified relation `lhs ~ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub check: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub pass: bool,
}

impl Check {
    /// Passes iff `residual <= tol` (NaN fails).
    pub fn within(check: impl Into<String>, lhs: f64, rhs: f64, residual: f64, tol: f64) -> Self {
        Check { check: check.into(), lhs, rhs, residual, pass: residual <= tol }
    }

    /// Relative comparison `|lhs/rhs - 1| <= tol`.
    pub fn relative(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let residual = if lhs == rhs { 0.0 } else { ((lhs - rhs) / rhs).abs() };
        Check::within(check, lhs, rhs, residual, tol)
    }

    /// One-sided `lhs <= rhs`, with `residual = max(0, lhs - rhs)` and a
    /// relative slack `tol` on `|rhs|`.
    pub fn at_most(check: impl Into<String>, lhs: f64, rhs: f64, tol: f64) -> Self {
        let residual = (lhs - rhs).max(0.0);
        Check { check: check.into(), lhs, rhs, residual, pass: lhs <= rhs + tol * rhs.abs().max(1.0) }
    }

    /// Violation count, passes iff zero.
    pub fn count(check: impl Into<String>, violations: u64, trials: u64) -> Self {
        Check { check: check.into(), lhs: violations as f64, rhs: trials as f64, residual: violations as f64, pass: violations == 0 }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
