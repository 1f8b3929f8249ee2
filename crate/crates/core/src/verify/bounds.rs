use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{BoundaryAngle, PotentialSpec};
use crate::prufer::integrate_prufer;

const AMPLITUDE_PROBES: usize = 4096;

/// Outcome of the `R(x) ≥ k x^{−(A+ε)}` lower-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundCertificate {
    /// Sampled `limsup x·sqrt(p² + q²)` over the last decade of the span.
    pub amplitude_limsup: f64,
    pub eps: f64,
    /// Certified exponent `A + ε < 1/2`.
    pub exponent: f64,
    /// Point beyond which `|V| ≤ (A+ε)/(1+x)` on every probe.
    pub x_ref: f64,
    /// `min_x [ln R(x) − ln R(x_ref) + (A+ε) ln((1+x)/(1+x_ref))]`.
    pub min_margin: f64,
    pub passed: bool,
}

fn log_probes(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = ((1.0 + lo).ln(), (1.0 + hi).ln());
    (0..n).map(move |i| ((a + (b - a) * i as f64 / (n - 1) as f64).exp() - 1.0).clamp(lo, hi))
}

/// Largest `x·|V(x)|` on probes over the last decade of `[lo, hi]`.
pub fn estimate_limsup_amplitude(pot: &PotentialSpec, span: (f64, f64)) -> Result<f64> {
    let lo = span.0.max(span.1 / 10.0);
    log_probes(lo, span.1, AMPLITUDE_PROBES).try_fold(0.0f64, |m, x| Ok(m.max(x * pot.envelope(x)?)))
}

/// Checks `ln R(x) ≥ ln R(x_ref) − (A+ε) ln((1+x)/(1+x_ref)) − slack` along the
/// `λ`-trajectory, where `A` is the sampled limsup amplitude.
///
/// Fails with [`Error::Precondition`] when `A + ε ≥ 1/2`; a failed inequality
/// is reported through `passed = false`.
pub fn check_no_eigenvalue_bound(
    pot: &PotentialSpec,
    lambda: f64,
    theta0: BoundaryAngle,
    span: (f64, f64),
    eps: f64,
    tol: f64,
) -> Result<LowerBoundCertificate> {
    if !(eps > 0.0) {
        return Err(Error::Parameter(format!("eps = {eps} must be positive")));
    }
    let a = estimate_limsup_amplitude(pot, span)?;
    let exponent = a + eps;
    if !(exponent < 0.5) {
        return Err(Error::Precondition(format!(
            "limsup x*|V| = {a:.4} with eps = {eps} gives A + eps = {exponent:.4} >= 1/2"
        )));
    }
    let mut x_ref = span.0;
    for x in log_probes(span.0, span.1, AMPLITUDE_PROBES) {
        if pot.envelope(x)? * (1.0 + x) > exponent {
            x_ref = x;
        }
    }
    let traj = integrate_prufer(pot, lambda, theta0, span, tol)?;
    let ln_r_ref = traj.ln_r_at(x_ref).expect("x_ref lies in the span");
    let min_margin = traj
        .samples()
        .iter()
        .filter(|s| s.x >= x_ref)
        .map(|s| s.ln_r - ln_r_ref + exponent * ((1.0 + s.x) / (1.0 + x_ref)).ln())
        .fold(f64::INFINITY, f64::min);
    let slack = 1e3 * tol;
    Ok(LowerBoundCertificate {
        amplitude_limsup: a,
        eps,
        exponent,
        x_ref,
        min_margin,
        passed: min_margin >= -slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::make_locked_coulomb;

    #[test]
    fn locked_subcritical_meets_bound() {
        let th = BoundaryAngle::new(0.5).unwrap();
        let pot = make_locked_coulomb(1.0, 0.4, th).unwrap();
        let cert = check_no_eigenvalue_bound(&pot, 1.0, th, (0.0, 1e3), 0.05, 1e-9).unwrap();
        assert!(cert.passed);
        assert!((cert.amplitude_limsup - 0.4).abs() < 1e-3);
        assert_eq!(cert.x_ref, 0.0);
        // ln R = −0.4 ln(1+x) exactly, so the margin is 0.05 ln(1+x) ≥ 0
        assert!(cert.min_margin.abs() < 1e-9);
    }

    #[test]
    fn zero_potential_passes() {
        let th = BoundaryAngle::new(0.0).unwrap();
        let cert = check_no_eigenvalue_bound(&PotentialSpec::zero(), 2.0, th, (0.0, 100.0), 0.04, 1e-9).unwrap();
        assert!(cert.passed);
        assert_eq!(cert.amplitude_limsup, 0.0);
    }

    #[test]
    fn amplitude_precondition() {
        let th = BoundaryAngle::new(0.0).unwrap();
        let pot = make_locked_coulomb(1.0, 0.48, th).unwrap();
        assert!(matches!(
            check_no_eigenvalue_bound(&pot, 1.0, th, (0.0, 1e3), 0.04, 1e-9),
            Err(Error::Precondition(_))
        ));
    }
}
