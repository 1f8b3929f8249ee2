//! Explicit potentials with prescribed embedded eigenvalues.

mod assembly;
mod schedule;

pub use assembly::{assemble_multi, AssemblyParams};
pub use schedule::{
    amplitude_needed, piece_log_length, schedule_pieces, GrowthBudget, Piece, PieceSchedule,
    SchedulePolicy,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{
    BoundaryAngle, EigenTarget, PotentialSegment, PotentialSpec, Resonant, SegmentKind,
};

/// Default Coulomb amplitude of a bump; exponent 100 plus 10% margin.
pub const DEFAULT_C_AMP: f64 = 110.0;

/// Largest staircase index whose left breakpoint `e^{n³}` is a finite `f64`.
pub const MAX_STAIRCASE_STEPS: u32 = 8;

/// `V = A/(1+x)`, `φ = −2λx + 2θ₀` on `[0, ∞)` for any amplitude.
///
/// The `λ`-solution with boundary angle `θ₀` stays locked (`2θ = φ`) and
/// decays as `ln R(x) = −A ln(1+x)`.
pub fn make_locked_coulomb(lambda: f64, a: f64, theta0: BoundaryAngle) -> Result<PotentialSpec> {
    if !a.is_finite() || !lambda.is_finite() {
        return Err(Error::Parameter(format!("amplitude {a} and lambda {lambda} must be finite")));
    }
    PotentialSpec::new(vec![PotentialSegment {
        x_lo: 0.0,
        x_hi: f64::INFINITY,
        kind: SegmentKind::CoulombResonant(Resonant {
            amplitude: a,
            shift: 0.0,
            lock_lambda: lambda,
            phase_offset: theta0.radians(),
            anchor: 0.0,
        }),
    }])
}

/// Single embedded eigenvalue `λ` with `limsup x·V = A > 1/2`.
pub fn make_supercritical(lambda: f64, a: f64, theta0: BoundaryAngle) -> Result<PotentialSpec> {
    if !(a > 0.5) {
        return Err(Error::Parameter(format!(
            "A = {a} must exceed 1/2; the critical case A = 1/2 is built by make_critical_staircase"
        )));
    }
    make_locked_coulomb(lambda, a, theta0)
}

/// `ln a_n = n³`.
pub fn staircase_ln_breakpoint(n: u32) -> f64 {
    let n = n as f64;
    n * n * n
}

/// `ε_n = 1/(2n)`.
pub fn staircase_eps(n: u32) -> f64 {
    0.5 / n as f64
}

/// Critical-coupling potential `V = (1/2 + ε_n)/x` on `[a_n, a_{n+1})`.
///
/// `[0, a₁)` carries the locked Coulomb profile `(1/2 + ε₁)/(1+x)` and the
/// last step extends to infinity. All segments share `φ = −2λx + 2θ₀`.
pub fn make_critical_staircase(lambda: f64, theta0: BoundaryAngle, n_max: u32) -> Result<PotentialSpec> {
    if n_max == 0 || n_max > MAX_STAIRCASE_STEPS {
        return Err(Error::Parameter(format!(
            "n_max = {n_max} must lie in 1..={MAX_STAIRCASE_STEPS}"
        )));
    }
    let offset = theta0.radians();
    let mut segs = vec![PotentialSegment {
        x_lo: 0.0,
        x_hi: staircase_ln_breakpoint(1).exp(),
        kind: SegmentKind::CoulombResonant(Resonant {
            amplitude: 0.5 + staircase_eps(1),
            shift: 0.0,
            lock_lambda: lambda,
            phase_offset: offset,
            anchor: 0.0,
        }),
    }];
    for n in 1..=n_max {
        let x_hi = if n == n_max { f64::INFINITY } else { staircase_ln_breakpoint(n + 1).exp() };
        segs.push(PotentialSegment {
            x_lo: staircase_ln_breakpoint(n).exp(),
            x_hi,
            kind: SegmentKind::StaircaseStep {
                n,
                a: 0.5,
                eps: staircase_eps(n),
                lock_lambda: lambda,
                phase_offset: offset,
            },
        });
    }
    PotentialSpec::new(segs)
}

/// Geometry and constants of one compactly supported bump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpCertificateInputs {
    pub x0: f64,
    pub x1: f64,
    pub b: f64,
    pub c_amp: f64,
    pub k_gap: f64,
}

impl BumpCertificateInputs {
    pub fn validate(&self) -> Result<()> {
        if !(self.x1 > self.x0 && self.x0 > self.b) || !self.x1.is_finite() {
            return Err(Error::Parameter(format!(
                "need b < x0 < x1 < inf, got b = {}, x0 = {}, x1 = {}",
                self.b, self.x0, self.x1
            )));
        }
        if !(self.x0 - self.b > self.k_gap) {
            return Err(Error::Admissibility { gap: self.x0 - self.b, k_gap: self.k_gap });
        }
        if !(self.c_amp.is_finite() && self.c_amp >= 0.0) {
            return Err(Error::Parameter(format!("amplitude {} must be finite and non-negative", self.c_amp)));
        }
        Ok(())
    }
}

/// Collar width `min(1, (x1 − x0)/10)`.
pub fn default_delta(x0: f64, x1: f64) -> f64 {
    (0.1 * (x1 - x0)).min(1.0)
}

/// Analytic fallback `K = 50·(1 + max_j (C+2)/|λ − λⱼ|)`.
pub fn k_gap_seed(lambda: f64, others: &[f64], c_amp: f64) -> f64 {
    let worst = others
        .iter()
        .map(|&l| (c_amp + 2.0) / (lambda - l).abs())
        .fold(0.0, f64::max);
    50.0 * (1.0 + worst)
}

/// Smoothed Coulomb bump supported in `(x0, x1)` that locks the `λ`-solution
/// entering at `x0` with angle `phi0`.
///
/// `phi0` is used verbatim as the phase offset; pass the integrated angle
/// (not reduced mod π) to keep the lock exact.
pub fn make_bump(
    lambda: f64,
    others: &[EigenTarget],
    inputs: &BumpCertificateInputs,
    phi0: f64,
    delta: f64,
) -> Result<PotentialSegment> {
    if let Some(t) = others.iter().find(|t| t.lambda == lambda) {
        return Err(Error::DegenerateTarget { lambda: t.lambda });
    }
    inputs.validate()?;
    if !(delta > 0.0 && delta <= (inputs.x1 - inputs.x0) / 10.0) {
        return Err(Error::Parameter(format!(
            "collar width {delta} must lie in (0, (x1 - x0)/10]"
        )));
    }
    if !phi0.is_finite() {
        return Err(Error::Parameter("phase offset must be finite".into()));
    }
    Ok(PotentialSegment {
        x_lo: inputs.x0,
        x_hi: inputs.x1,
        kind: SegmentKind::SmoothedBump {
            profile: Resonant {
                amplitude: inputs.c_amp,
                shift: inputs.b,
                lock_lambda: lambda,
                phase_offset: phi0,
                anchor: inputs.x0,
            },
            delta,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prufer::integrate_prufer;

    fn angle(a: f64) -> BoundaryAngle {
        BoundaryAngle::new(a).unwrap()
    }

    #[test]
    fn supercritical_formula() {
        let pot = make_supercritical(1.0, 2.0, angle(0.7)).unwrap();
        for &x in &[0.0, 0.5, 3.0, 100.0] {
            let (v, phi) = pot.eval(x).unwrap();
            assert!((v - 2.0 / (1.0 + x)).abs() < 1e-15);
            assert!((phi - (-2.0 * x + 1.4)).abs() < 1e-12);
        }
        let pot = make_supercritical(0.0, 1.0, angle(0.0)).unwrap();
        let (p, q) = pot.pq_at(4.0).unwrap();
        assert_eq!(p, 0.0);
        assert_eq!(q, 0.2);
    }

    #[test]
    fn supercritical_rejects_small_amplitude() {
        assert!(matches!(make_supercritical(1.0, 0.5, angle(0.0)), Err(Error::Parameter(m)) if m.contains("staircase")));
        assert!(make_locked_coulomb(1.0, 0.4, angle(0.0)).is_ok());
    }

    #[test]
    fn supercritical_closed_form_decay() {
        let pot = make_supercritical(1.0, 2.0, angle(0.7)).unwrap();
        let traj = integrate_prufer(&pot, 1.0, angle(0.7), (0.0, 9.0), 1e-9).unwrap();
        assert!((traj.last().ln_r + 2.0 * 10f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn staircase_layout() {
        let pot = make_critical_staircase(1.0, angle(0.2), 3).unwrap();
        let segs = pot.segments();
        assert_eq!(segs.len(), 4);
        assert_eq!(segs[2].x_lo.ln(), 8.0);
        assert_eq!(staircase_ln_breakpoint(10), 1000.0);
        let x = 1e5;
        assert!((pot.envelope(x).unwrap() - 0.75 / x).abs() < 1e-18);
        assert_eq!(segs[3].x_hi, f64::INFINITY);
        let (_, phi) = pot.eval(1e5).unwrap();
        assert!((phi - (-2e5 + 0.4)).abs() < 1e-9);
        assert!(make_critical_staircase(1.0, angle(0.2), 0).is_err());
        assert!(make_critical_staircase(1.0, angle(0.2), 9).is_err());
        assert!(make_critical_staircase(1.0, angle(0.2), 8).is_ok());
    }

    #[test]
    fn staircase_first_step_decay() {
        // ln R(a_2) − ln R(a_1) = −(1/2 + 1/2)(8 − 1)
        let pot = make_critical_staircase(0.5, angle(1.0), 2).unwrap();
        let a1 = 1f64.exp();
        let a2 = 8f64.exp();
        let traj = integrate_prufer(&pot, 0.5, angle(1.0), (0.0, a2), 1e-9).unwrap();
        let at_a1 = traj.ln_r_at(a1).unwrap();
        assert!((at_a1 + (1.0 + a1).ln()).abs() < 1e-9);
        assert!((traj.last().ln_r - at_a1 + 7.0).abs() < 1e-8);
    }

    fn inputs() -> BumpCertificateInputs {
        BumpCertificateInputs { x0: 300.0, x1: 900.0, b: 0.0, c_amp: 110.0, k_gap: 200.0 }
    }

    #[test]
    fn bump_errors() {
        let others = [EigenTarget::new(1.0, angle(0.0))];
        assert_eq!(
            make_bump(1.0, &others, &inputs(), 0.3, 1.0),
            Err(Error::DegenerateTarget { lambda: 1.0 })
        );
        let bad = BumpCertificateInputs { k_gap: 300.0, ..inputs() };
        assert!(matches!(make_bump(2.0, &others, &bad, 0.3, 1.0), Err(Error::Admissibility { .. })));
        assert!(make_bump(2.0, &others, &inputs(), 0.3, 61.0).is_err());
        assert!(make_bump(2.0, &others, &inputs(), 0.3, 0.0).is_err());
    }

    #[test]
    fn bump_profile() {
        let seg = make_bump(2.0, &[], &inputs(), 0.3, 1.0).unwrap();
        let pot = PotentialSpec::with_zero_fill(vec![seg]).unwrap();
        assert_eq!(pot.envelope(300.0).unwrap(), 0.0);
        assert_eq!(pot.envelope(900.0).unwrap(), 0.0);
        assert_eq!(pot.envelope(299.0).unwrap(), 0.0);
        for &x in &[301.0, 450.0, 899.0] {
            assert!((pot.envelope(x).unwrap() * (1.0 + x) - 110.0).abs() < 1e-11);
        }
        let (_, phi) = pot.eval(310.0).unwrap();
        assert!((phi - (-2.0 * 2.0 * 10.0 + 0.6)).abs() < 1e-12);
    }

    #[test]
    fn k_gap_seed_formula() {
        assert_eq!(k_gap_seed(1.0, &[-1.0], 110.0), 50.0 * (1.0 + 56.0));
        assert_eq!(k_gap_seed(1.0, &[], 110.0), 50.0);
    }
}
