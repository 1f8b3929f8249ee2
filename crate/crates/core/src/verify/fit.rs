use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::prufer::PrueferTrajectory;
use crate::quad::gauss5;

/// Margin around 1/2 used by the L² verdict.
pub const DEFAULT_L2_MARGIN: f64 = 0.05;

const FIT_POINTS: usize = 512;

/// Least-squares exponent `α` in `ln R ≈ c − α ln(1+x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub alpha: f64,
    /// RMS deviation of `ln R` from the fitted line.
    pub residual: f64,
    pub window: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum L2Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct L2Estimate {
    /// `∫ R²` over the sampled part of the window.
    pub sampled: f64,
    /// Power-law extrapolation beyond the last sample (0 unless converging).
    pub tail: f64,
    pub integral: f64,
    pub verdict: L2Verdict,
    pub fit: Option<DecayFit>,
    pub diagnostic: Option<String>,
}

/// Fits `α` on `window`, which must span two decades of `1 + x`.
pub fn fit_decay_exponent(traj: &PrueferTrajectory, window: (f64, f64)) -> Result<DecayFit> {
    let (lo, hi) = window;
    let (a, b) = traj.span();
    if !(lo >= a && hi <= b && lo < hi) {
        return Err(Error::Window(format!("[{lo}, {hi}] is not inside the trajectory span [{a}, {b}]")));
    }
    let decades = ((1.0 + hi) / (1.0 + lo)).log10();
    if decades < 2.0 {
        return Err(Error::Window(format!("[{lo}, {hi}] spans {decades:.3} decades of 1+x; need 2")));
    }
    let s_lo = (1.0 + lo).ln();
    let s_hi = (1.0 + hi).ln();
    let pts: Vec<(f64, f64)> = (0..FIT_POINTS)
        .map(|i| {
            let s = s_lo + (s_hi - s_lo) * i as f64 / (FIT_POINTS - 1) as f64;
            let x = (s.exp() - 1.0).clamp(lo, hi);
            (s, traj.ln_r_at(x).expect("inside span"))
        })
        .collect();
    let n = pts.len() as f64;
    let ms = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - ms).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - ms) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = pts.iter().map(|p| (p.1 - my - slope * (p.0 - ms)).powi(2)).sum();
    Ok(DecayFit { alpha: -slope, residual: (rss / n).sqrt(), window })
}

/// `∫_lo^hi exp(2 ln R) dx` by five-point Gauss rules on each sample interval.
pub fn integral_of_r_squared(traj: &PrueferTrajectory, lo: f64, hi: f64) -> Result<f64> {
    let (a, b) = traj.span();
    if !(lo >= a && hi <= b && lo <= hi) {
        return Err(Error::Window(format!("[{lo}, {hi}] is not inside the trajectory span [{a}, {b}]")));
    }
    let s = traj.samples();
    let start = s.partition_point(|p| p.x <= lo).saturating_sub(1);
    let mut total = 0.0;
    for i in start..s.len() - 1 {
        let l = s[i].x.max(lo);
        let r = s[i + 1].x.min(hi);
        if r <= l {
            if s[i].x >= hi {
                break;
            }
            continue;
        }
        total += gauss5(l, r, |x| (2.0 * traj.interpolate_in(i, x).0).exp());
    }
    Ok(total)
}

pub fn l2_tail_estimate(traj: &PrueferTrajectory, from_x: f64) -> Result<L2Estimate> {
    l2_tail_estimate_with(traj, from_x, DEFAULT_L2_MARGIN)
}

/// `∫_{from_x}^∞ R²` with a verdict from the decay exponent.
///
/// Converging when `α > 1/2 + margin` and the fit residual is small against
/// the total fitted drop; diverging when `α < 1/2 − margin`.
pub fn l2_tail_estimate_with(traj: &PrueferTrajectory, from_x: f64, margin: f64) -> Result<L2Estimate> {
    let (_, end) = traj.span();
    let sampled = integral_of_r_squared(traj, from_x, end)?;
    let fit = match fit_decay_exponent(traj, (from_x, end)) {
        Ok(f) => f,
        Err(Error::Window(msg)) => {
            return Ok(L2Estimate {
                sampled,
                tail: 0.0,
                integral: sampled,
                verdict: L2Verdict::Inconclusive,
                fit: None,
                diagnostic: Some(msg),
            })
        }
        Err(e) => return Err(e),
    };
    let drop = fit.alpha * ((1.0 + end) / (1.0 + from_x)).ln();
    let (verdict, diagnostic) = if fit.alpha > 0.5 + margin && fit.residual <= 0.25 * drop {
        (L2Verdict::Converging, None)
    } else if fit.alpha < 0.5 - margin {
        (L2Verdict::Diverging, None)
    } else {
        (
            L2Verdict::Inconclusive,
            Some(format!("alpha = {:.4} with residual {:.3e} is within the margin", fit.alpha, fit.residual)),
        )
    };
    let tail = if verdict == L2Verdict::Converging {
        let ln_r = traj.last().ln_r;
        (2.0 * ln_r).exp() * (1.0 + end) / (2.0 * fit.alpha - 1.0)
    } else {
        0.0
    };
    Ok(L2Estimate { sampled, tail, integral: sampled + tail, verdict, fit: Some(fit), diagnostic })
}
