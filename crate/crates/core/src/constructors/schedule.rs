//! Round-robin piece schedules for multi-eigenvalue assembly.

use std::f64::consts::LN_2;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::{default_delta, DEFAULT_C_AMP};
use crate::error::{Error, Result};
use crate::potential::{check_distinct, smoothstep, EigenTarget};

/// Growth budget `h(x)` for envelopes `≤ h(x)/(1+x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum GrowthBudget {
    /// `h(x) = ln(2 + x)`
    Log,
    /// `h(x) = (1 + x)^p`
    Power { p: f64 },
}

impl GrowthBudget {
    pub fn eval(&self, x: f64) -> f64 {
        match *self {
            GrowthBudget::Log => (2.0 + x).ln(),
            GrowthBudget::Power { p } => (1.0 + x).powf(p),
        }
    }

    /// Smallest `x` with `h(x) ≥ y`.
    pub fn inverse(&self, y: f64) -> f64 {
        match *self {
            GrowthBudget::Log => (y.exp() - 2.0).max(0.0),
            GrowthBudget::Power { p } => (y.powf(1.0 / p) - 1.0).max(0.0),
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            GrowthBudget::Log => Ok(()),
            GrowthBudget::Power { p } if p > 0.0 && p.is_finite() => Ok(()),
            GrowthBudget::Power { p } => Err(Error::Parameter(format!(
                "power budget needs p > 0 so that h grows without bound, got {p}"
            ))),
        }
    }
}

/// Log-length `ln x_{r+1} − ln x_r` of a piece in a block of `count` targets.
pub fn piece_log_length(count: usize) -> f64 {
    (count as f64 * LN_2 / 50.0).max(1.0)
}

/// Bump amplitude for blocks of `count` targets.
///
/// Decay exponent 100 per unit log-length plus the `(count − 1)·ln 2` growth
/// accrued under the other targets' pieces, scaled by `c_amp/100`.
pub fn amplitude_needed(count: usize, c_amp: f64) -> f64 {
    c_amp * (100.0 + (count.saturating_sub(1)) as f64 * LN_2) / 100.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Piece {
    pub x_lo: f64,
    pub x_hi: f64,
    /// Index into the target list.
    pub target: usize,
    /// `N_r`: number of targets in this piece's block.
    pub count: usize,
    pub amplitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PieceSchedule {
    pub pieces: Vec<Piece>,
    pub budget: Option<GrowthBudget>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchedulePolicy {
    pub c_amp: f64,
    /// Complete round-robin blocks emitted once every target is in play.
    pub full_blocks: usize,
    pub max_pieces: usize,
}

impl Default for SchedulePolicy {
    fn default() -> Self {
        Self { c_amp: DEFAULT_C_AMP, full_blocks: 2, max_pieces: 10_000 }
    }
}

impl PieceSchedule {
    pub fn x_start(&self) -> f64 {
        self.pieces.first().map_or(0.0, |p| p.x_lo)
    }

    pub fn x_end(&self) -> f64 {
        self.pieces.last().map_or(0.0, |p| p.x_hi)
    }

    /// Consecutive index ranges forming round-robin blocks.
    pub fn blocks(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.pieces.len() {
            let n = self.pieces[i].count;
            let end = (i + n).min(self.pieces.len());
            out.push(i..end);
            i = end;
        }
        out
    }

    /// `−100·(block log-length)/N + (N − 1)·ln 2` for one block.
    pub fn net_block_log_decay(&self, block: Range<usize>) -> f64 {
        let pieces = &self.pieces[block];
        let n = pieces[0].count as f64;
        let log_len = (pieces.last().unwrap().x_hi / pieces[0].x_lo).ln();
        -100.0 * log_len / n + (n - 1.0) * LN_2
    }

    /// Envelope `|V(x)|` of the bump that the schedule places at `x` (phase-independent).
    pub fn envelope_at(&self, x: f64, b: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.x_hi <= x);
        match self.pieces.get(i) {
            Some(p) if p.x_lo <= x => {
                let delta = default_delta(p.x_lo, p.x_hi);
                let cut = smoothstep((x - p.x_lo) / delta) * smoothstep((p.x_hi - x) / delta);
                if cut == 0.0 {
                    0.0
                } else {
                    p.amplitude / (1.0 + x - b) * cut
                }
            }
            _ => 0.0,
        }
    }

    /// Checks contiguity, piece-count growth and round-robin coverage.
    pub fn validate(&self, n_targets: usize) -> Result<()> {
        for w in self.pieces.windows(2) {
            if w[0].x_hi != w[1].x_lo {
                return Err(Error::Consistency(format!("pieces not contiguous at {}", w[0].x_hi)));
            }
            let (a, b) = (w[0].count, w[1].count);
            if b != a && b != a + 1 {
                return Err(Error::Consistency(format!("piece count jumps from {a} to {b}")));
            }
        }
        for block in self.blocks() {
            let n = self.pieces[block.start].count;
            let mut seen = vec![false; n];
            for p in &self.pieces[block.clone()] {
                if p.count != n || p.target >= n || p.target >= n_targets || seen[p.target] {
                    return Err(Error::Consistency(format!(
                        "block starting at piece {} is not a round-robin over {n} targets",
                        block.start
                    )));
                }
                seen[p.target] = true;
            }
        }
        Ok(())
    }
}

/// Lays out round-robin pieces starting at `x_start`.
///
/// Without a budget every block holds all targets. With a budget the block
/// size starts at 1 and grows by one at a block boundary once `h(x)` covers
/// the amplitude for one more target; scheduling stops after
/// `policy.full_blocks` blocks at full size.
pub fn schedule_pieces(
    targets: &[EigenTarget],
    budget: Option<GrowthBudget>,
    x_start: f64,
    policy: &SchedulePolicy,
) -> Result<PieceSchedule> {
    if targets.is_empty() {
        return Err(Error::Parameter("schedule needs at least one target".into()));
    }
    check_distinct(targets)?;
    if !(x_start > 0.0 && x_start.is_finite()) {
        return Err(Error::Parameter(format!("x_start = {x_start} must be positive")));
    }
    if let Some(h) = &budget {
        h.validate()?;
    }
    let total = targets.len();
    let mut count = if budget.is_some() { 1 } else { total };
    let mut x = x_start;
    let mut pieces = Vec::new();
    let mut full_done = 0;
    while full_done < policy.full_blocks.max(1) {
        let amplitude = if budget.is_some() { amplitude_needed(count, policy.c_amp) } else { policy.c_amp };
        let len = piece_log_length(count);
        for target in 0..count {
            let x_lo = x;
            if let Some(h) = &budget {
                if h.eval(x_lo) < amplitude {
                    return Err(Error::Schedule {
                        x: x_lo,
                        reason: format!(
                            "h(x) = {} is below the amplitude {amplitude} needed for {count} targets",
                            h.eval(x_lo)
                        ),
                    });
                }
            }
            x = (x_lo.ln() + len).exp();
            pieces.push(Piece { x_lo, x_hi: x, target, count, amplitude });
            if pieces.len() > policy.max_pieces {
                return Err(Error::Schedule {
                    x: x_lo,
                    reason: format!(
                        "{} pieces emitted with only {count} of {total} targets in play",
                        pieces.len()
                    ),
                });
            }
        }
        if count == total {
            full_done += 1;
        } else if let Some(h) = &budget {
            if h.eval(x) >= amplitude_needed(count + 1, policy.c_amp) {
                count += 1;
            }
        }
    }
    if pieces.last().is_some_and(|p| !p.x_hi.is_finite()) {
        return Err(Error::Schedule { x: f64::INFINITY, reason: "schedule ran past the float range".into() });
    }
    Ok(PieceSchedule { pieces, budget })
}
