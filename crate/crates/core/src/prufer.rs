//! Prüfer-variable integration of `L_{p,q}(u, v)ᵀ = λ(u, v)ᵀ`.
//!
//! With `u = R cos θ`, `v = R sin θ` and `(p, q) = (V sin φ, V cos φ)`:
//!
//! ```text
//! (ln R)' = −V cos(2θ − φ)
//!      θ' = −λ + V sin(2θ − φ)
//! ```
//!
//! Inside each segment the integrator advances `ψ = 2θ − φ` instead of `θ`.
//! Since `φ` is affine on every segment, `ψ' = 2(λ_lock − λ) + 2V sin ψ`, and a
//! solution that starts locked (`ψ = 0`, `λ = λ_lock`) stays at `ψ = 0` exactly.
//! The locked solution is the recessive one, so any drift off `ψ = 0` would grow
//! like `(1+x)^{2A}`; this representation removes that failure mode.

use crate::error::{Error, Result};
use crate::ode::{self, Step};
use crate::potential::{polar_to_pq, BoundaryAngle, PotentialSegment, PotentialSpec};

pub const DEFAULT_TOL: f64 = 1e-9;

/// Right-hand side `(d ln R/dx, dθ/dx)` at a point.
pub fn prufer_rhs(x: f64, theta: f64, lambda: f64, pot: &PotentialSpec) -> Result<(f64, f64)> {
    let (v, phi) = pot.eval(x)?;
    let (s, c) = (2.0 * theta - phi).sin_cos();
    Ok((-v * c, -lambda + v * s))
}

/// Largest step allowed where `|V| ≤ vmax`.
pub fn step_ceiling(lambda: f64, vmax: f64) -> f64 {
    0.1 / (1.0 + lambda.abs() + vmax)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrueferSample {
    pub x: f64,
    pub ln_r: f64,
    pub theta: f64,
    slope_in: [f64; 2],
    slope_out: [f64; 2],
}

impl PrueferSample {
    pub fn new(x: f64, ln_r: f64, theta: f64, d_ln_r: f64, d_theta: f64) -> Self {
        let d = [d_ln_r, d_theta];
        Self { x, ln_r, theta, slope_in: d, slope_out: d }
    }

    /// Derivatives `(d ln R, dθ)` on the right of `x`.
    pub fn slope(&self) -> (f64, f64) {
        (self.slope_out[0], self.slope_out[1])
    }
}

/// Sampled `(x, ln R, θ)` for one spectral parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct PrueferTrajectory {
    pub lambda: f64,
    pub theta0: f64,
    samples: Vec<PrueferSample>,
}

impl PrueferTrajectory {
    pub fn from_samples(lambda: f64, theta0: f64, samples: Vec<PrueferSample>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Parameter("trajectory needs at least one sample".into()));
        }
        if samples.windows(2).any(|w| !(w[0].x < w[1].x)) {
            return Err(Error::Parameter("trajectory abscissae must increase strictly".into()));
        }
        Ok(Self { lambda, theta0, samples })
    }

    pub fn samples(&self) -> &[PrueferSample] {
        &self.samples
    }

    pub fn first(&self) -> &PrueferSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &PrueferSample {
        self.samples.last().unwrap()
    }

    pub fn span(&self) -> (f64, f64) {
        (self.first().x, self.last().x)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Piecewise-cubic `(ln R, θ)` at `x`; `None` outside the span.
    pub fn interpolate(&self, x: f64) -> Option<(f64, f64)> {
        let (lo, hi) = self.span();
        if !(x >= lo && x <= hi) {
            return None;
        }
        let i = self.samples.partition_point(|s| s.x <= x);
        if i == 0 {
            let s = &self.samples[0];
            return Some((s.ln_r, s.theta));
        }
        if i == self.samples.len() {
            let s = self.last();
            return Some((s.ln_r, s.theta));
        }
        Some(self.interpolate_in(i - 1, x))
    }

    pub(crate) fn interpolate_in(&self, i: usize, x: f64) -> (f64, f64) {
        let a = &self.samples[i];
        let b = &self.samples[i + 1];
        let y = ode::hermite(a.x, &[a.ln_r, a.theta], &a.slope_out, b.x, &[b.ln_r, b.theta], &b.slope_in, x);
        (y[0], y[1])
    }

    pub fn ln_r_at(&self, x: f64) -> Option<f64> {
        self.interpolate(x).map(|v| v.0)
    }

    pub fn theta_at(&self, x: f64) -> Option<f64> {
        self.interpolate(x).map(|v| v.1)
    }
}

/// Which points of the integration are recorded.
#[derive(Debug, Clone, PartialEq)]
pub enum Sampling {
    /// Every accepted step.
    Steps,
    /// The given abscissae (sorted) plus span ends and mesh points.
    Grid(Vec<f64>),
    /// Points uniform in `ln(1+x)` plus span ends and mesh points.
    LogGrid { per_decade: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrueferOptions {
    pub tol: f64,
    /// `ln R` at the start of the span.
    pub ln_r0: f64,
    pub sampling: Sampling,
}

impl Default for PrueferOptions {
    fn default() -> Self {
        Self { tol: DEFAULT_TOL, ln_r0: 0.0, sampling: Sampling::Steps }
    }
}

impl PrueferOptions {
    pub fn with_tol(tol: f64) -> Self {
        Self { tol, ..Self::default() }
    }
}

/// Integrates from `span.0` with `θ = φ₀` and `ln R = 0`, recording every step.
pub fn integrate_prufer(
    pot: &PotentialSpec,
    lambda: f64,
    theta0: BoundaryAngle,
    span: (f64, f64),
    tol: f64,
) -> Result<PrueferTrajectory> {
    integrate_prufer_with(pot, lambda, theta0.radians(), span, &PrueferOptions::with_tol(tol))
}

fn check_span(span: (f64, f64)) -> Result<()> {
    let (a, b) = span;
    if !(a >= 0.0 && b > a && b.is_finite()) {
        return Err(Error::Parameter(format!("span [{a}, {b}] is not a finite interval in [0, inf)")));
    }
    Ok(())
}

fn log_grid(a: f64, b: f64, per_decade: usize) -> Vec<f64> {
    let per = per_decade.max(1) as f64;
    let k_lo = ((1.0 + a).log10() * per).floor() as i64;
    let k_hi = ((1.0 + b).log10() * per).ceil() as i64;
    (k_lo..=k_hi)
        .map(|k| 10f64.powf(k as f64 / per) - 1.0)
        .filter(|&x| x > a && x < b)
        .collect()
}

struct SegmentRhs<'a> {
    seg: &'a PotentialSegment,
    lambda: f64,
    rate: f64,
}

impl SegmentRhs<'_> {
    #[inline]
    fn eval(&self, x: f64, y: &[f64; 2]) -> [f64; 2] {
        let v = self.seg.amplitude(x);
        if v == 0.0 {
            return [0.0, -2.0 * self.lambda - self.rate];
        }
        let (s, c) = y[1].sin_cos();
        [-v * c, -2.0 * self.lambda + 2.0 * v * s - self.rate]
    }

    /// Converts `ψ` and `dψ` at `x` to `θ = (ψ + φ)/2` and `(d ln R, dθ)`.
    fn to_theta(&self, x: f64, y: &[f64; 2], f: &[f64; 2]) -> (f64, [f64; 2]) {
        let theta = 0.5 * (y[1] + self.seg.phase(x));
        (theta, [f[0], 0.5 * (f[1] + self.rate)])
    }
}

/// Integrates from `span.0` with `θ = theta_init` (any real angle).
///
/// Segment junctions and bump collar edges are forced step boundaries, and
/// every segment is integrated from a fresh initial step, so the state at a
/// junction depends only on the potential to its left.
pub fn integrate_prufer_with(
    pot: &PotentialSpec,
    lambda: f64,
    theta_init: f64,
    span: (f64, f64),
    opts: &PrueferOptions,
) -> Result<PrueferTrajectory> {
    check_span(span)?;
    if !(opts.tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {} must be positive", opts.tol)));
    }
    if !lambda.is_finite() || !theta_init.is_finite() {
        return Err(Error::Parameter("lambda and theta must be finite".into()));
    }
    let (a, b) = span;
    let mut mesh = vec![a];
    mesh.extend(pot.mesh_points(a, b));
    mesh.push(b);

    let grid: Option<Vec<f64>> = match &opts.sampling {
        Sampling::Steps => None,
        Sampling::Grid(g) => {
            let mut g: Vec<f64> = g.iter().copied().filter(|&x| x > a && x < b).collect();
            g.sort_by(f64::total_cmp);
            Some(g)
        }
        Sampling::LogGrid { per_decade } => Some(log_grid(a, b, *per_decade)),
    };
    let mut gi = 0usize;

    let mut samples: Vec<PrueferSample> = Vec::new();
    let mut ln_r = opts.ln_r0;
    let mut theta = theta_init;

    for w in mesh.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let seg = pot.segment_at(lo)?;
        let rhs = SegmentRhs { seg, lambda, rate: seg.phase_rate() };
        let psi = 2.0 * theta - seg.phase(lo);
        let y0 = [ln_r, psi];
        let f0 = rhs.eval(lo, &y0);
        let (_, d0) = rhs.to_theta(lo, &y0, &f0);
        match samples.last_mut() {
            Some(s) if s.x == lo => s.slope_out = d0,
            _ => samples.push(PrueferSample::new(lo, ln_r, theta, d0[0], d0[1])),
        }

        let push = |x: f64, y: &[f64; 2], f: &[f64; 2], samples: &mut Vec<PrueferSample>| {
            if samples.last().is_some_and(|s| s.x >= x) {
                return;
            }
            let (th, d) = rhs.to_theta(x, y, f);
            samples.push(PrueferSample::new(x, y[0], th, d[0], d[1]));
        };
        let ceiling = |x: f64| step_ceiling(lambda, seg.envelope_bound(x));
        let y_end = ode::dopri5(
            |x, y| rhs.eval(x, y),
            lo,
            hi,
            y0,
            opts.tol,
            ceiling,
            |step: &Step<2>| match &grid {
                None => push(step.x1, &step.y1, &step.f1, &mut samples),
                Some(g) => {
                    while gi < g.len() && g[gi] <= step.x1 {
                        let xg = g[gi];
                        gi += 1;
                        if xg <= step.x0 {
                            continue;
                        }
                        if xg == step.x1 {
                            push(xg, &step.y1, &step.f1, &mut samples);
                        } else {
                            let y = step.hermite(xg);
                            let f = rhs.eval(xg, &y);
                            push(xg, &y, &f, &mut samples);
                        }
                    }
                    if step.x1 == hi {
                        push(step.x1, &step.y1, &step.f1, &mut samples);
                    }
                }
            },
        )?;
        ln_r = y_end[0];
        theta = 0.5 * (y_end[1] + seg.phase(hi));
        // keep the recorded junction value identical to the handed-over state
        if let Some(s) = samples.last_mut() {
            if s.x == hi {
                s.theta = theta;
                s.ln_r = ln_r;
            }
        }
    }
    PrueferTrajectory::from_samples(lambda, theta_init, samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectSample {
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

impl DirectSample {
    pub fn amplitude(&self) -> f64 {
        self.u.hypot(self.v)
    }
}

/// Integrates the raw first-order system
/// `u' = λv − q u − p v`, `v' = −λu − p u + q v` with fixed-step RK4.
///
/// The step is `tol^{1/4} / (1 + |λ| + sup|V|)` capped at 0.01. Meant as a
/// cross-check on short spans; the recessive solution is unstable here.
pub fn integrate_direct(
    pot: &PotentialSpec,
    lambda: f64,
    init: (f64, f64),
    span: (f64, f64),
    tol: f64,
) -> Result<Vec<DirectSample>> {
    check_span(span)?;
    if init.0 == 0.0 && init.1 == 0.0 {
        return Err(Error::Parameter("initial vector (u0, v0) must be nonzero".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter(format!("tolerance {tol} must be positive")));
    }
    let (a, b) = span;
    let mut mesh = vec![a];
    mesh.extend(pot.mesh_points(a, b));
    mesh.push(b);
    let base = tol.powf(0.25).min(0.01);

    let mut out = vec![DirectSample { x: a, u: init.0, v: init.1 }];
    let mut y = [init.0, init.1];
    for w in mesh.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let seg = pot.segment_at(lo)?;
        let h = base / (1.0 + lambda.abs() + seg.envelope_bound(lo));
        let f = |x: f64, y: &[f64; 2]| {
            let (p, q) = polar_to_pq(seg.amplitude(x), seg.phase(x));
            [lambda * y[1] - q * y[0] - p * y[1], -lambda * y[0] - p * y[0] + q * y[1]]
        };
        y = ode::rk4(f, lo, hi, y, h, |x, y| {
            let r2 = y[0] * y[0] + y[1] * y[1];
            if !(r2 < 1e290 && r2 > 1e-290) {
                return Err(Error::Range { x });
            }
            out.push(DirectSample { x, u: y[0], v: y[1] });
            Ok(())
        })?;
    }
    Ok(out)
}
