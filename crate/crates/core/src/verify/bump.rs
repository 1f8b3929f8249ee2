use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{PotentialSegment, PotentialSpec, SegmentKind};
use crate::prufer::{integrate_prufer_with, PrueferOptions, PrueferTrajectory};

/// Boundary angles drawn per non-target eigenvalue.
pub const N_BOUNDARY_ANGLES: usize = 5;

/// Frozen `ln C_cert` for bumps of amplitude 110.
///
/// Largest decay excess over `x0 ∈ {250, 400, 600}`, `x1/x0 ∈ {1.1, 1.5, 2, 4}`,
/// `λ ∈ {−2, 1, 3}` with the default collar, rounded up.
pub const LN_C_CERT: f64 = -0.49;

/// `n` angles in `[0, π)` from a seeded ChaCha8 stream.
pub fn boundary_angles(seed: u64, n: usize) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(0.0..std::f64::consts::PI)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OtherGrowth {
    pub lambda: f64,
    /// Largest `ln Rⱼ(x) − ln Rⱼ(x0)` over `(x0, x1]` and all sampled angles.
    pub sup_growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BumpCertificate {
    pub x0: f64,
    pub x1: f64,
    pub b: f64,
    /// `ln R(x1) − ln R(x0)` for the locked target.
    pub decay_ratio_ln: f64,
    /// Largest `ln R(x) − ln R(x0)` over `(x0, x1)` for the target.
    pub sup_growth_target: f64,
    pub sup_growth_others: Vec<OtherGrowth>,
}

impl BumpCertificate {
    /// `decay_ratio_ln + 100·ln((x1 − b)/(x0 − b))`.
    pub fn decay_excess(&self) -> f64 {
        self.decay_ratio_ln + 100.0 * ((self.x1 - self.b) / (self.x0 - self.b)).ln()
    }

    pub fn decay_within(&self, ln_c_cert: f64) -> bool {
        self.decay_excess() <= ln_c_cert
    }

    /// Every non-target run stays below `factor·Rⱼ(x0)`.
    pub fn growth_within(&self, factor: f64) -> bool {
        let cap = factor.ln();
        self.sup_growth_target <= cap && self.sup_growth_others.iter().all(|o| o.sup_growth <= cap)
    }

    /// Decay bound with constant `ln_c_cert` and doubling bound for all runs.
    pub fn passes(&self, ln_c_cert: f64) -> bool {
        self.decay_within(ln_c_cert) && self.growth_within(2.0)
    }
}

fn sup_growth(traj: &PrueferTrajectory) -> f64 {
    let base = traj.first().ln_r;
    traj.samples().iter().skip(1).map(|s| s.ln_r - base).fold(f64::NEG_INFINITY, f64::max)
}

/// Integrates the locked target and every `λⱼ` across one bump.
///
/// The target starts at `x0` with the bump's phase offset as its angle, so it
/// enters locked. Each `λⱼ` is run from `N_BOUNDARY_ANGLES` seeded angles;
/// runs are independent and execute in parallel.
pub fn bump_certificate(
    bump: &PotentialSegment,
    k_gap: f64,
    lambda: f64,
    others: &[f64],
    seed: u64,
    tol: f64,
) -> Result<BumpCertificate> {
    let SegmentKind::SmoothedBump { profile, .. } = &bump.kind else {
        return Err(Error::Parameter("bump_certificate needs a smoothed bump segment".into()));
    };
    let (x0, x1, b) = (bump.x_lo, bump.x_hi, profile.shift);
    if !(x0 - b > k_gap) {
        return Err(Error::Admissibility { gap: x0 - b, k_gap });
    }
    if profile.lock_lambda != lambda {
        return Err(Error::Consistency(format!(
            "bump is locked to {} but the target is {lambda}",
            profile.lock_lambda
        )));
    }
    if let Some(&l) = others.iter().find(|&&l| l == lambda) {
        return Err(Error::DegenerateTarget { lambda: l });
    }
    let pot = PotentialSpec::with_zero_fill(vec![*bump])?;
    let opts = PrueferOptions::with_tol(tol);

    let target = integrate_prufer_with(&pot, lambda, profile.phase_offset, (x0, x1), &opts)?;
    let decay_ratio_ln = target.last().ln_r - target.first().ln_r;
    let sup_growth_target = {
        let base = target.first().ln_r;
        target
            .samples()
            .iter()
            .filter(|s| s.x > x0 && s.x < x1)
            .map(|s| s.ln_r - base)
            .fold(f64::NEG_INFINITY, f64::max)
    };

    let angles = boundary_angles(seed, N_BOUNDARY_ANGLES);
    let runs: Vec<(usize, f64)> = others
        .iter()
        .enumerate()
        .flat_map(|(j, &l)| angles.iter().map(move |&a| (j, l, a)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(j, l, a)| integrate_prufer_with(&pot, l, a, (x0, x1), &opts).map(|t| (j, sup_growth(&t))))
        .collect::<Result<_>>()?;
    let sup_growth_others = others
        .iter()
        .enumerate()
        .map(|(j, &l)| OtherGrowth {
            lambda: l,
            sup_growth: runs.iter().filter(|r| r.0 == j).map(|r| r.1).fold(f64::NEG_INFINITY, f64::max),
        })
        .collect();

    Ok(BumpCertificate { x0, x1, b, decay_ratio_ln, sup_growth_target, sup_growth_others })
}
