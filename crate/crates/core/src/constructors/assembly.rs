use serde::{Deserialize, Serialize};

use super::{default_delta, make_bump, BumpCertificateInputs, PieceSchedule};
use crate::error::{Error, Result};
use crate::potential::{check_distinct, EigenTarget, PotentialSegment, PotentialSpec};
use crate::prufer::{integrate_prufer_with, PrueferOptions, Sampling, DEFAULT_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AssemblyParams {
    pub k_gap: f64,
    /// Shift `b` shared by every piece.
    pub b: f64,
    pub tol: f64,
}

impl Default for AssemblyParams {
    fn default() -> Self {
        Self { k_gap: 0.0, b: 0.0, tol: DEFAULT_TOL }
    }
}

/// Concatenates one bump per scheduled piece, each locked to its target.
///
/// A piece's phase offset is the target's Prüfer angle at the piece start,
/// obtained by integrating that target across everything placed before it.
/// Integration restarts at every junction, so re-integrating the finished
/// potential from 0 reproduces these angles bit for bit.
pub fn assemble_multi(
    targets: &[EigenTarget],
    schedule: &PieceSchedule,
    params: &AssemblyParams,
) -> Result<PotentialSpec> {
    check_distinct(targets)?;
    schedule.validate(targets.len())?;
    if schedule.pieces.is_empty() {
        return Err(Error::Consistency("schedule has no pieces".into()));
    }
    let opts = PrueferOptions { tol: params.tol, ln_r0: 0.0, sampling: Sampling::Grid(Vec::new()) };

    // (x, ln R, θ) of each target at the last point it was advanced to
    let mut states: Vec<(f64, f64, f64)> = targets.iter().map(|t| (0.0, 0.0, t.theta.radians())).collect();
    let mut segments: Vec<PotentialSegment> = Vec::with_capacity(schedule.pieces.len());

    for piece in &schedule.pieces {
        let j = piece.target;
        let (x, ln_r, theta) = states[j];
        let (ln_r, theta) = if x < piece.x_lo {
            let partial = PotentialSpec::with_zero_fill(segments.clone())?;
            let traj = integrate_prufer_with(
                &partial,
                targets[j].lambda,
                theta,
                (x, piece.x_lo),
                &PrueferOptions { ln_r0: ln_r, ..opts.clone() },
            )?;
            (traj.last().ln_r, traj.last().theta)
        } else {
            (ln_r, theta)
        };
        states[j] = (piece.x_lo, ln_r, theta);

        let others: Vec<EigenTarget> =
            targets.iter().enumerate().filter(|&(i, _)| i != j).map(|(_, t)| *t).collect();
        let inputs = BumpCertificateInputs {
            x0: piece.x_lo,
            x1: piece.x_hi,
            b: params.b,
            c_amp: piece.amplitude,
            k_gap: params.k_gap,
        };
        segments.push(make_bump(
            targets[j].lambda,
            &others,
            &inputs,
            theta,
            default_delta(piece.x_lo, piece.x_hi),
        )?);
    }
    PotentialSpec::with_zero_fill(segments)
}
