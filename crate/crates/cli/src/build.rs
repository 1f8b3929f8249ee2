//! Turns a [`RunConfig`] into a potential.

use embedded_dirac::constructors::{
    amplitude_needed, assemble_multi, default_delta, make_bump, make_critical_staircase, make_locked_coulomb, make_supercritical,
    schedule_pieces, staircase_ln_breakpoint, AssemblyParams, BumpCertificateInputs, PieceSchedule,
    SchedulePolicy,
};
use embedded_dirac::verify::calibrate_k_gap;
use embedded_dirac::{integrate_prufer_with, EigenTarget, PotentialSegment, PotentialSpec, PrueferOptions, Sampling};
use serde::{Deserialize, Serialize};

use crate::config::{Mode, RunConfig, TargetConfig};
use crate::error::{CliError, CliResult};

/// Pieces emitted in total when `full_blocks` is not configured.
const DEFAULT_TOTAL_PIECES: usize = 6;

/// Multi schedules must end before this; each target is integrated over the whole span.
const MAX_MULTI_X: f64 = 1e7;

/// Resolved construction, echoed into the manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Construction {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_amp: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k_gap: Option<f64>,
    /// `sup (1+x)·|V(x)|` implied by the construction.
    pub envelope_bound: f64,
    pub span: (f64, f64),
    #[serde(skip_serializing_if = "Option::is_none")]
    pub schedule: Option<PieceSchedule>,
    /// The bump segment in bump mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bump: Option<PotentialSegment>,
}

pub struct Built {
    pub targets: Vec<EigenTarget>,
    pub potential: PotentialSpec,
    pub construction: Construction,
}

impl Built {
    /// The config with every derived parameter written out, so feeding it back
    /// rebuilds the same potential without recalibration.
    pub fn resolved_config(&self, cfg: &RunConfig) -> RunConfig {
        let mut out = cfg.clone();
        out.schema_version = Some(crate::config::SCHEMA_VERSION);
        out.targets = self.targets.iter().map(TargetConfig::canonical).collect();
        out.c_amp = self.construction.c_amp.or(out.c_amp);
        out.k_gap = self.construction.k_gap.or(out.k_gap);
        out.span = Some(self.construction.span);
        if let Some(s) = &self.construction.schedule {
            out.schedule.x_start = Some(s.x_start());
            let total = self.targets.len();
            out.schedule.full_blocks = Some(s.blocks().iter().filter(|b| s.pieces[b.start].count == total).count());
        }
        out
    }
}

/// `K_gap` for a target set: the largest per-target calibration.
pub fn resolve_k_gap(cfg: &RunConfig, targets: &[EigenTarget], c_amp: f64) -> CliResult<f64> {
    if let Some(k) = cfg.k_gap {
        return Ok(k);
    }
    let mut k = 0.0f64;
    for t in targets {
        let others: Vec<f64> = targets.iter().filter(|o| o.lambda != t.lambda).map(|o| o.lambda).collect();
        k = k.max(calibrate_k_gap(t.lambda, &others, c_amp, cfg.tol)?);
    }
    Ok(k)
}

pub fn build(cfg: &RunConfig) -> CliResult<Built> {
    cfg.validate()?;
    let targets = cfg.resolved_targets()?;
    let (potential, construction) = match cfg.mode {
        Mode::Supercritical => {
            let t = targets[0];
            let a = cfg.amplitude.expect("validated");
            let pot = if a > 0.5 {
                make_supercritical(t.lambda, a, t.theta)?
            } else {
                make_locked_coulomb(t.lambda, a, t.theta)?
            };
            let span = cfg.span.unwrap_or((0.0, 1e3));
            (pot, Construction { c_amp: None, k_gap: None, envelope_bound: a, span, schedule: None, bump: None })
        }
        Mode::Critical => {
            let t = targets[0];
            let n_max = cfg.n_max.unwrap_or(3);
            let pot = make_critical_staircase(t.lambda, t.theta, n_max)?;
            let hi = staircase_ln_breakpoint(n_max + 1).min(700.0).exp();
            let span = cfg.span.unwrap_or((0.0, hi));
            (pot, Construction { c_amp: None, k_gap: None, envelope_bound: 1.0, span, schedule: None, bump: None })
        }
        Mode::Bump => {
            let g = cfg.bump.expect("validated");
            let c_amp = cfg.c_amp_or_default();
            let t = targets[0];
            let k_gap = resolve_k_gap(cfg, &targets, c_amp)?;
            // angle of the target on arrival at x0 through the zero potential
            let arrival = integrate_prufer_with(
                &PotentialSpec::zero(),
                t.lambda,
                t.theta.radians(),
                (0.0, g.x0),
                &PrueferOptions { tol: cfg.tol, ln_r0: 0.0, sampling: Sampling::Grid(Vec::new()) },
            )?;
            let inputs = BumpCertificateInputs { x0: g.x0, x1: g.x1, b: g.b, c_amp, k_gap };
            let seg = make_bump(t.lambda, &targets[1..], &inputs, arrival.last().theta, default_delta(g.x0, g.x1))?;
            let pot = PotentialSpec::with_zero_fill(vec![seg])?;
            let span = cfg.span.unwrap_or((0.0, 2.0 * g.x1));
            let envelope_bound = c_amp * ((1.0 + g.x0) / (1.0 + g.x0 - g.b)).max(1.0);
            (
                pot,
                Construction {
                    c_amp: Some(c_amp),
                    k_gap: Some(k_gap),
                    envelope_bound,
                    span,
                    schedule: None,
                    bump: Some(seg),
                },
            )
        }
        Mode::Multi => {
            let c_amp = cfg.c_amp_or_default();
            let k_gap = resolve_k_gap(cfg, &targets, c_amp)?;
            let budget = cfg.schedule.budget.map(|b| b.0);
            let x_start = cfg.schedule.x_start.unwrap_or_else(|| {
                let covered = budget.map_or(0.0, |h| h.inverse(amplitude_needed(1, c_amp)));
                (1.05 * k_gap).max(10.0).max(covered)
            });
            let full_blocks =
                cfg.schedule.full_blocks.unwrap_or(DEFAULT_TOTAL_PIECES.div_ceil(targets.len()).max(2));
            let policy = SchedulePolicy { c_amp, full_blocks, ..Default::default() };
            let schedule = schedule_pieces(&targets, budget, x_start, &policy)?;
            if schedule.x_end() > MAX_MULTI_X {
                return Err(CliError::Config(format!(
                    "schedule ends at x = {:e}; trajectories are only resolved up to {MAX_MULTI_X:e}, \
                     choose a faster-growing budget or a smaller x_start",
                    schedule.x_end()
                )));
            }
            let params = AssemblyParams { k_gap, b: 0.0, tol: cfg.tol };
            let pot = assemble_multi(&targets, &schedule, &params)?;
            let envelope_bound = schedule.pieces.iter().map(|p| p.amplitude).fold(0.0, f64::max);
            let span = cfg.span.unwrap_or((0.0, schedule.x_end()));
            (
                pot,
                Construction {
                    c_amp: Some(c_amp),
                    k_gap: Some(k_gap),
                    envelope_bound,
                    span,
                    schedule: Some(schedule),
                    bump: None,
                },
            )
        }
    };
    Ok(Built { targets, potential, construction })
}
