//! Closed-form segment integrals for the critical staircase.
//!
//! All arithmetic stays in log space on `ln a_n = n³`, so breakpoints far
//! beyond the `f64` range are handled exactly.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::constructors::{staircase_eps, staircase_ln_breakpoint};
use crate::quad::gauss5_composite;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailTerm {
    pub n: u32,
    pub ln_r_at_a_n: f64,
    /// `ln ∫_{a_n}^{a_{n+1}} R(x)² dx`.
    pub ln_integral: f64,
}

/// `ln R(a_n)` for the staircase solution normalised by `R(0) = 1`.
///
/// The lead-in gives `ln R(a₁) = −ln(1 + e)`; each step then contributes
/// `−(1/2 + ε_j)·ln(a_{j+1}/a_j)`.
pub fn critical_ln_r_at_breakpoint(n: u32) -> f64 {
    assert!(n >= 1, "staircase breakpoints start at n = 1");
    let mut ln_r = -(1.0 + 1f64.exp()).ln();
    for j in 1..n {
        ln_r -= (0.5 + staircase_eps(j)) * (staircase_ln_breakpoint(j + 1) - staircase_ln_breakpoint(j));
    }
    ln_r
}

/// `ln ∫_{a_n}^{a_{n+1}} R²` from the exact profile `R(x) = R(a_n)(x/a_n)^{−(1/2+ε_n)}`.
fn ln_segment_integral(n: u32, ln_r: f64) -> f64 {
    let nf = n as f64;
    let d = staircase_ln_breakpoint(n + 1) - staircase_ln_breakpoint(n);
    nf.ln() + 2.0 * ln_r + staircase_ln_breakpoint(n) + (-(-d / nf).exp()).ln_1p()
}

pub fn critical_tail_series(range: RangeInclusive<u32>) -> Vec<TailTerm> {
    range
        .filter(|&n| n >= 1)
        .map(|n| {
            let ln_r = critical_ln_r_at_breakpoint(n);
            TailTerm { n, ln_r_at_a_n: ln_r, ln_integral: ln_segment_integral(n, ln_r) }
        })
        .collect()
}

/// Smallest `c` with `ln(term_n) ≤ ln n − n² + c` over `terms`.
pub fn tail_constant(terms: &[TailTerm]) -> f64 {
    terms
        .iter()
        .map(|t| {
            let n = t.n as f64;
            t.ln_integral - n.ln() + n * n
        })
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Quadrature of `R²` over `[a_n, a_{n+1}]` in the variable `s = ln x`.
///
/// Returns the natural log of the integral; the integrand is scaled by its
/// value at `s = n³` before summation.
pub fn critical_segment_quadrature(n: u32, panels: usize) -> f64 {
    let ln_r = critical_ln_r_at_breakpoint(n);
    let (s0, s1) = (staircase_ln_breakpoint(n), staircase_ln_breakpoint(n + 1));
    let rate = 0.5 + staircase_eps(n);
    // ln(R² x) at x = e^s
    let g = |s: f64| 2.0 * (ln_r - rate * (s - s0)) + s;
    let peak = g(s0);
    peak + gauss5_composite(s0, s1, panels, |s| (g(s) - peak).exp()).ln()
}

pub fn log_sum_exp(values: &[f64]) -> f64 {
    let m = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + values.iter().map(|v| (v - m).exp()).sum::<f64>().ln()
}
