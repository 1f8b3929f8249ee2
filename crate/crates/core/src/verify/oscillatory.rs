use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::{EigenTarget, PotentialSegment, PotentialSpec, Resonant, SegmentKind};
use crate::prufer::{integrate_prufer_with, PrueferOptions};
use crate::quad::gauss5_composite;

/// Boundary angles `kπ/8` over which the oscillatory constant is maximised.
const SCALING_ANGLES: usize = 8;

/// `V = c_amp/(1+x−b)` on `[a, ∞)` locked to `λ` (zero before `a`).
pub fn resonant_tail_potential(lambda: f64, c_amp: f64, b: f64, a: f64, phase_offset: f64) -> Result<PotentialSpec> {
    if !(a > b - 1.0) {
        return Err(Error::Parameter(format!("profile singular: a = {a} must exceed b - 1 = {}", b - 1.0)));
    }
    PotentialSpec::with_zero_fill(vec![PotentialSegment {
        x_lo: a,
        x_hi: f64::INFINITY,
        kind: SegmentKind::CoulombResonant(Resonant {
            amplitude: c_amp,
            shift: b,
            lock_lambda: lambda,
            phase_offset,
            anchor: a,
        }),
    }])
}

/// `∫_{x0}^{x} cos(2θⱼ(t) − φ(t))/(1+t−b) dt` at each `x` in `xs`.
///
/// `θⱼ` solves the `λⱼ` phase equation in `pot` from `θⱼ(x0) = target.theta`.
/// Panels are at most a twentieth of the beat period `π/|λ − λⱼ|`.
pub fn oscillatory_integral_check(
    lambda: f64,
    target: &EigenTarget,
    b: f64,
    x0: f64,
    xs: &[f64],
    pot: &PotentialSpec,
    tol: f64,
) -> Result<Vec<(f64, f64)>> {
    let gap = (lambda - target.lambda).abs();
    if gap == 0.0 {
        return Err(Error::DegenerateTarget { lambda });
    }
    if !(x0 > b) {
        return Err(Error::Parameter(format!("x0 = {x0} must exceed b = {b}")));
    }
    if let Some(&x) = xs.iter().find(|&&x| !(x >= x0 && x.is_finite())) {
        return Err(Error::Parameter(format!("evaluation point {x} lies before x0 = {x0}")));
    }
    let mut order: Vec<usize> = (0..xs.len()).collect();
    order.sort_by(|&i, &j| xs[i].total_cmp(&xs[j]));
    let x_max = xs.iter().copied().fold(x0, f64::max);
    if x_max == x0 {
        return Ok(xs.iter().map(|&x| (x, 0.0)).collect());
    }
    let traj = integrate_prufer_with(
        pot,
        target.lambda,
        target.theta.radians(),
        (x0, x_max),
        &PrueferOptions::with_tol(tol),
    )?;

    let panel = PI / gap / 20.0;
    let integrand = |t: f64| {
        let theta = traj.theta_at(t).expect("quadrature node inside the trajectory span");
        let (_, phi) = pot.eval(t).expect("node inside the domain");
        (2.0 * theta - phi).cos() / (1.0 + t - b)
    };
    let mut out = vec![(0.0, 0.0); xs.len()];
    let (mut at, mut acc) = (x0, 0.0);
    for i in order {
        let x = xs[i];
        if x > at {
            let panels = ((x - at) / panel).ceil().max(1.0) as usize;
            acc += gauss5_composite(at, x, panels, integrand);
            at = x;
        }
        out[i] = (x, acc);
    }
    Ok(out)
}

/// `M = (x0 − b)·max |∫|`.
pub fn oscillatory_constant(values: &[(f64, f64)], x0: f64, b: f64) -> f64 {
    values.iter().map(|v| v.1.abs()).fold(0.0, f64::max) * (x0 - b)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillatoryFit {
    pub gap: f64,
    pub c_amp: f64,
    /// Values of `x0 − b`.
    pub scales: Vec<f64>,
    /// Fitted `M` per scale.
    pub m: Vec<f64>,
    pub m_max: f64,
    /// Largest `max(M_{k+1}/M_k, M_k/M_{k+1}) − 1` between consecutive scales.
    pub max_variation: f64,
}

/// Fits `M` at each `x0 − b` in `scales`.
///
/// For each scale the `λ`-locked Coulomb profile starts at `x0`, and the
/// integral is sampled on `[x0, 2x0 − b]` at sixteen points per beat period,
/// maximised over eight boundary angles for `λⱼ`.
pub fn fit_oscillatory_scaling(
    lambda: f64,
    lambda_j: f64,
    c_amp: f64,
    b: f64,
    scales: &[f64],
    tol: f64,
) -> Result<OscillatoryFit> {
    let gap = (lambda - lambda_j).abs();
    if gap == 0.0 {
        return Err(Error::DegenerateTarget { lambda });
    }
    if scales.is_empty() || scales.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
        return Err(Error::Parameter("scales must be non-empty and positive".into()));
    }
    let spacing = PI / gap / 16.0;
    let m = scales
        .par_iter()
        .map(|&d| {
            let x0 = b + d;
            let pot = resonant_tail_potential(lambda, c_amp, b, x0, 0.0)?;
            let n = (d / spacing).ceil() as usize;
            let xs: Vec<f64> = (1..=n).map(|k| x0 + d * k as f64 / n as f64).collect();
            (0..SCALING_ANGLES)
                .map(|k| {
                    let angle = crate::potential::BoundaryAngle::normalized(PI * k as f64 / SCALING_ANGLES as f64);
                    let values =
                        oscillatory_integral_check(lambda, &EigenTarget::new(lambda_j, angle), b, x0, &xs, &pot, tol)?;
                    Ok(oscillatory_constant(&values, x0, b))
                })
                .try_fold(0.0f64, |acc, r: Result<f64>| Ok(acc.max(r?)))
        })
        .collect::<Result<Vec<f64>>>()?;
    let m_max = m.iter().copied().fold(0.0, f64::max);
    let max_variation = m
        .windows(2)
        .map(|w| (w[1] / w[0]).max(w[0] / w[1]) - 1.0)
        .fold(0.0, f64::max);
    Ok(OscillatoryFit { gap, c_amp, scales: scales.to_vec(), m, m_max, max_variation })
}

/// Admissibility constant for bumps of amplitude `c_amp` locked to `λ`.
///
/// For each `λⱼ` the profile must stay below the beat frequency, which needs
/// `x0 − b ≥ 4C/|λ − λⱼ|`, and the growth `C·M/(x0 − b)` of the `λⱼ` amplitude
/// must stay below `ln(4/3)`. `M` is fitted on the scales `d, 2d, 4d` starting
/// from the first requirement.
pub fn calibrate_k_gap(lambda: f64, others: &[f64], c_amp: f64, tol: f64) -> Result<f64> {
    let mut k = 0.0f64;
    for &lj in others {
        let gap = (lambda - lj).abs();
        if gap == 0.0 {
            return Err(Error::DegenerateTarget { lambda: lj });
        }
        let d = (4.0 * c_amp / gap).max(1.0);
        let fit = fit_oscillatory_scaling(lambda, lj, c_amp, 0.0, &[d, 2.0 * d, 4.0 * d], tol)?;
        k = k.max(d).max(c_amp * fit.m_max / (4.0f64 / 3.0).ln());
    }
    Ok(k)
}
