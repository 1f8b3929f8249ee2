//! `construct`, `verify` and `sweep`.

use std::path::Path;

use embedded_dirac::constructors::staircase_ln_breakpoint;
use embedded_dirac::verify::{
    bump_certificate, check_no_eigenvalue_bound, critical_ln_r_at_breakpoint, critical_segment_quadrature,
    critical_tail_series, fit_decay_exponent, fit_oscillatory_scaling, l2_tail_estimate_with, log_sum_exp,
    tail_constant, BumpCertificate, L2Estimate, L2Verdict, LowerBoundCertificate, OscillatoryFit, TailTerm,
    LN_C_CERT,
};
use embedded_dirac::{integrate_prufer_with, PrueferOptions, PrueferTrajectory, Sampling, SegmentKind};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::build::{build, Built, Construction};
use crate::config::{Expectation, Mode, RunConfig, SCHEMA_VERSION};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, log_points, trajectory_csv, write_atomic, write_json};

/// Decay exponent every multi-target trajectory must exceed.
pub const MULTI_MIN_ALPHA: f64 = 0.75;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// Resolved config; carries the schema version.
    #[serde(flatten)]
    pub config: RunConfig,
    pub construction: Construction,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// Informational checks are reported but never fail the run.
    pub asserted: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetReport {
    pub lambda: f64,
    pub alpha: Option<f64>,
    pub residual: Option<f64>,
    pub l2_verdict: L2Verdict,
    pub l2_integral: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub schema_version: u32,
    pub mode: Mode,
    pub alpha: Option<f64>,
    pub residual: Option<f64>,
    pub l2_verdict: L2Verdict,
    pub targets: Vec<TargetReport>,
    pub bump_certificates: Vec<BumpCertificate>,
    pub oscillatory_fit: Vec<OscillatoryFit>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lower_bound: Option<LowerBoundCertificate>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub critical_series: Vec<TailTerm>,
    pub checks: Vec<Check>,
}

impl Certificate {
    pub fn failed(&self) -> Vec<String> {
        self.checks.iter().filter(|c| c.asserted && !c.passed).map(|c| c.name.clone()).collect()
    }
}

pub struct VerifyOutcome {
    pub certificate: Certificate,
    pub trajectories: Vec<PrueferTrajectory>,
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn assert(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed, asserted: true, detail: detail.into() });
    }

    fn report(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check { name: name.into(), passed, asserted: false, detail: detail.into() });
    }
}

pub fn construct(cfg: &RunConfig, out: &Path) -> CliResult<Manifest> {
    let built = build(cfg)?;
    let (lo, hi) = built.construction.span;
    let mut csv = String::from("x,V,phi,p,q,envelope\n");
    for x in log_points(lo, hi, cfg.per_decade) {
        let (v, phi) = built.potential.eval(x)?;
        let (p, q) = built.potential.pq_at(x)?;
        let env = built.potential.envelope(x)?;
        let row = [x, v, phi, p, q, env].map(fmt_f64).join(",");
        csv.push_str(&row);
        csv.push('\n');
    }
    let manifest = Manifest {
        config: built.resolved_config(cfg),
        construction: built.construction.clone(),
    };
    write_atomic(&out.join("potential.csv"), csv.as_bytes())?;
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

/// Runs the checks without touching the filesystem.
pub fn verify_report(cfg: &RunConfig) -> CliResult<VerifyOutcome> {
    let built = build(cfg)?;
    match cfg.mode {
        Mode::Supercritical => verify_supercritical(cfg, &built),
        Mode::Critical => verify_critical(cfg, &built),
        Mode::Bump => verify_bump(cfg, &built),
        Mode::Multi => verify_multi(cfg, &built),
    }
}

/// Writes trajectories and the certificate; fails with the names of any
/// asserted checks that did not pass.
pub fn verify(cfg: &RunConfig, out: &Path) -> CliResult<Certificate> {
    let outcome = verify_report(cfg)?;
    for (i, traj) in outcome.trajectories.iter().enumerate() {
        write_atomic(&out.join(format!("trajectory_{i}.csv")), trajectory_csv(traj).as_bytes())?;
    }
    write_json(&out.join("certificate.json"), &outcome.certificate)?;
    let failed = outcome.certificate.failed();
    if failed.is_empty() {
        Ok(outcome.certificate)
    } else {
        Err(CliError::Assertion(failed))
    }
}

fn trajectory(cfg: &RunConfig, built: &Built, target: usize, span: (f64, f64)) -> CliResult<PrueferTrajectory> {
    let t = built.targets[target];
    let opts = PrueferOptions { tol: cfg.tol, ln_r0: 0.0, sampling: Sampling::LogGrid { per_decade: cfg.per_decade } };
    Ok(integrate_prufer_with(&built.potential, t.lambda, t.theta.radians(), span, &opts)?)
}

fn target_report(lambda: f64, est: &L2Estimate) -> TargetReport {
    TargetReport {
        lambda,
        alpha: est.fit.map(|f| f.alpha),
        residual: est.fit.map(|f| f.residual),
        l2_verdict: est.verdict,
        l2_integral: est.integral,
        diagnostic: est.diagnostic.clone(),
    }
}

fn certificate(mode: Mode, targets: Vec<TargetReport>, checks: Checks) -> Certificate {
    let head = targets.first();
    Certificate {
        schema_version: SCHEMA_VERSION,
        mode,
        alpha: head.and_then(|t| t.alpha),
        residual: head.and_then(|t| t.residual),
        l2_verdict: head.map_or(L2Verdict::Inconclusive, |t| t.l2_verdict),
        targets,
        bump_certificates: Vec::new(),
        oscillatory_fit: Vec::new(),
        lower_bound: None,
        critical_series: Vec::new(),
        checks: checks.0,
    }
}

fn verify_supercritical(cfg: &RunConfig, built: &Built) -> CliResult<VerifyOutcome> {
    let a = cfg.amplitude.expect("validated");
    let t = built.targets[0];
    let span = built.construction.span;
    let traj = trajectory(cfg, built, 0, span)?;
    let est = l2_tail_estimate_with(&traj, span.0, cfg.margin)?;
    let mut checks = Checks::default();
    match est.fit {
        Some(f) => checks.assert(
            "decay_exponent",
            (f.alpha - a).abs() <= 0.01,
            format!("alpha = {:.6} against A = {a}", f.alpha),
        ),
        None => checks.assert("decay_exponent", false, est.diagnostic.clone().unwrap_or_default()),
    }
    let expectation = cfg.expectation.unwrap_or(if a > 0.5 { Expectation::Eigenvalue } else { Expectation::NoEigenvalue });
    let mut lower_bound = None;
    match expectation {
        Expectation::Eigenvalue => {
            checks.assert("l2_converging", est.verdict == L2Verdict::Converging, format!("{:?}", est.verdict));
        }
        Expectation::NoEigenvalue => {
            let lb = check_no_eigenvalue_bound(&built.potential, t.lambda, t.theta, span, cfg.eps, cfg.tol)?;
            checks.assert(
                "lower_bound",
                lb.passed,
                format!("exponent {:.4}, min margin {:.3e}", lb.exponent, lb.min_margin),
            );
            checks.assert("l2_diverging", est.verdict == L2Verdict::Diverging, format!("{:?}", est.verdict));
            lower_bound = Some(lb);
        }
    }
    let mut cert = certificate(Mode::Supercritical, vec![target_report(t.lambda, &est)], checks);
    cert.lower_bound = lower_bound;
    Ok(VerifyOutcome { certificate: cert, trajectories: vec![traj] })
}

fn verify_critical(cfg: &RunConfig, built: &Built) -> CliResult<VerifyOutcome> {
    let t = built.targets[0];
    let (a1, a2) = (staircase_ln_breakpoint(1).exp(), staircase_ln_breakpoint(2).exp());
    let span = built.construction.span;
    let span = (span.0, span.1.min(a2));
    let traj = trajectory(cfg, built, 0, span)?;
    let mut checks = Checks::default();

    let mut worst = 0.0f64;
    for (n, x) in [(1, a1), (2, a2)] {
        if span.0 == 0.0 && x <= span.1 {
            let got = traj.ln_r_at(x).expect("inside span");
            worst = worst.max((got - critical_ln_r_at_breakpoint(n)).abs());
        }
    }
    checks.assert("trajectory_closed_form", worst <= 1e-6, format!("max |ln R - closed form| = {worst:.3e}"));

    let series = critical_tail_series(1..=20);
    let c = tail_constant(&series[..5]);
    let bound_ok = series[5..10].iter().all(|s| {
        let n = s.n as f64;
        s.ln_integral <= n.ln() - n * n + c
    });
    checks.assert("tail_bound", bound_ok, format!("c = {c:.6} frozen on n = 1..5, tested on n = 6..10"));
    let head: Vec<f64> = series[..10].iter().map(|s| s.ln_integral).collect();
    let tail: Vec<f64> = series[10..].iter().map(|s| s.ln_integral).collect();
    let ratio_ln = log_sum_exp(&tail) - log_sum_exp(&head);
    checks.assert("tail_summable", ratio_ln < 1e-20f64.ln(), format!("ln(tail/head) = {ratio_ln:.3}"));
    for s in &series[..2] {
        let q = critical_segment_quadrature(s.n, 400);
        let rel = (q - s.ln_integral).exp_m1().abs();
        checks.assert(format!("quadrature_n{}", s.n), rel <= 1e-6, format!("relative difference {rel:.3e}"));
    }

    let from = span.0.max(a1.min(span.1));
    let est = l2_tail_estimate_with(&traj, from, cfg.margin)?;
    let mut cert = certificate(Mode::Critical, vec![target_report(t.lambda, &est)], checks);
    cert.critical_series = series[..10].to_vec();
    Ok(VerifyOutcome { certificate: cert, trajectories: vec![traj] })
}

fn verify_bump(cfg: &RunConfig, built: &Built) -> CliResult<VerifyOutcome> {
    let seg = built.construction.bump.expect("bump mode");
    let SegmentKind::SmoothedBump { profile, .. } = seg.kind else { unreachable!("make_bump returns a bump") };
    let k_gap = built.construction.k_gap.expect("bump mode");
    let t = built.targets[0];
    let others: Vec<f64> = built.targets[1..].iter().map(|o| o.lambda).collect();
    let cert = bump_certificate(&seg, k_gap, t.lambda, &others, cfg.seed, cfg.tol)?;

    let mut checks = Checks::default();
    checks.assert(
        "decay_100_exponent",
        cert.decay_within(LN_C_CERT),
        format!("ln R(x1) - ln R(x0) + 100 ln((x1-b)/(x0-b)) = {:.4} against ln C_cert = {LN_C_CERT}", cert.decay_excess()),
    );
    checks.assert(
        "growth_target_2",
        cert.sup_growth_target <= std::f64::consts::LN_2,
        format!("sup growth {:.3e}", cert.sup_growth_target),
    );
    let worst = cert.sup_growth_others.iter().map(|o| o.sup_growth).fold(f64::NEG_INFINITY, f64::max);
    checks.assert("growth_others_2", worst <= std::f64::consts::LN_2, format!("sup growth {worst:.4}"));
    checks.report("growth_others_1.5", worst <= 1.5f64.ln(), format!("sup growth {worst:.4} against ln 1.5"));

    let d = seg.x_lo - profile.shift;
    let fits = others
        .par_iter()
        .map(|&lj| fit_oscillatory_scaling(t.lambda, lj, profile.amplitude, profile.shift, &[d, 2.0 * d, 4.0 * d], cfg.tol))
        .collect::<Result<Vec<_>, _>>()?;
    for f in &fits {
        checks.assert(
            format!("oscillatory_scaling[gap={}]", f.gap),
            f.max_variation < 0.3,
            format!("M = {:?}", f.m),
        );
    }

    let span = built.construction.span;
    let trajectories = (0..built.targets.len())
        .into_par_iter()
        .map(|i| trajectory(cfg, built, i, span))
        .collect::<CliResult<Vec<_>>>()?;
    let from = seg.x_lo.max(span.0).min(span.1);
    let est = l2_tail_estimate_with(&trajectories[0], from, cfg.margin)?;
    let mut certificate = certificate(Mode::Bump, vec![target_report(t.lambda, &est)], checks);
    certificate.bump_certificates = vec![cert];
    certificate.oscillatory_fit = fits;
    Ok(VerifyOutcome { certificate, trajectories })
}

fn verify_multi(cfg: &RunConfig, built: &Built) -> CliResult<VerifyOutcome> {
    let schedule = built.construction.schedule.as_ref().expect("multi mode");
    let k_gap = built.construction.k_gap.expect("multi mode");
    let span = built.construction.span;
    let n = built.targets.len();
    let trajectories = (0..n)
        .into_par_iter()
        .map(|i| trajectory(cfg, built, i, span))
        .collect::<CliResult<Vec<_>>>()?;

    let mut checks = Checks::default();
    let mut reports = Vec::with_capacity(n);
    let blocks = schedule.blocks();
    let first_full = blocks.iter().position(|b| schedule.pieces[b.start].count == n);
    for (j, traj) in trajectories.iter().enumerate() {
        let t = built.targets[j];
        let window = (schedule.x_start().max(span.0), schedule.x_end().min(span.1));
        let est = l2_tail_estimate_with(traj, window.0, cfg.margin)?;
        match fit_decay_exponent(traj, window) {
            Ok(f) => checks.assert(
                format!("alpha[{j}]"),
                f.alpha >= MULTI_MIN_ALPHA,
                format!("alpha = {:.4} over [{:.6e}, {:.6e}]", f.alpha, window.0, window.1),
            ),
            Err(e) => checks.assert(format!("alpha[{j}]"), false, e.to_string()),
        }
        checks.assert(format!("l2_converging[{j}]"), est.verdict == L2Verdict::Converging, format!("{:?}", est.verdict));
        reports.push(target_report(t.lambda, &est));

        let Some(first) = first_full else {
            checks.assert(format!("monotone[{j}]"), false, "schedule has no full round-robin block");
            continue;
        };
        let at = |x: f64| traj.ln_r_at(x).unwrap_or(f64::NAN);
        let start = blocks[first].end;
        let reference = at(schedule.pieces[start - 1].x_hi);
        let block_ends: Vec<f64> = blocks[first..].iter().map(|b| at(schedule.pieces[b.end - 1].x_hi)).collect();
        let own_ends: Vec<f64> = std::iter::once(reference)
            .chain(schedule.pieces[start..].iter().filter(|p| p.target == j).map(|p| at(p.x_hi)))
            .collect();
        let all_ends: Vec<f64> =
            std::iter::once(reference).chain(schedule.pieces[start..].iter().map(|p| at(p.x_hi))).collect();
        let max_rise = |v: &[f64]| v.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        let rise = max_rise(&block_ends);
        checks.assert(format!("monotone_blocks[{j}]"), !(rise > 0.0), format!("largest rise {rise:.4e}"));
        let rise = max_rise(&own_ends);
        checks.assert(format!("monotone_own_pieces[{j}]"), !(rise > 0.0), format!("largest rise {rise:.4e}"));
        let rise = max_rise(&all_ends);
        checks.report(
            format!("monotone_pieces[{j}]"),
            !(rise > 0.0),
            format!("largest rise {rise:.4e} (bounded by ln 2 under other targets' bumps)"),
        );
    }

    let bound = built.construction.envelope_bound;
    let mut xs = log_points(span.0, span.1, cfg.per_decade);
    for p in &schedule.pieces {
        xs.extend((0..=64).map(|k| p.x_lo + (p.x_hi - p.x_lo) * k as f64 / 64.0));
    }
    let mut sup = 0.0f64;
    let mut budget_ratio = 0.0f64;
    for &x in xs.iter().filter(|&&x| x >= span.0 && x < span.1) {
        let scaled = built.potential.envelope(x)? * (1.0 + x);
        sup = sup.max(scaled);
        if let Some(h) = &schedule.budget {
            budget_ratio = budget_ratio.max(scaled / h.eval(x));
        }
    }
    checks.assert(
        "envelope_bound",
        sup <= bound * (1.0 + 1e-12),
        format!("sup (1+x)|V| = {sup:.6} against {bound}"),
    );
    if schedule.budget.is_some() {
        checks.assert(
            "growth_budget",
            budget_ratio <= 1.0 + 1e-12,
            format!("sup (1+x)|V|/h(x) = {budget_ratio:.6}"),
        );
    }

    let certs = schedule
        .pieces
        .par_iter()
        .enumerate()
        .map(|(r, p)| {
            let seg = built
                .potential
                .segments()
                .iter()
                .find(|s| s.x_lo == p.x_lo)
                .expect("every piece is a segment");
            let others: Vec<f64> = built.targets.iter().filter(|o| o.lambda != built.targets[p.target].lambda).map(|o| o.lambda).collect();
            bump_certificate(seg, k_gap, built.targets[p.target].lambda, &others, cfg.seed.wrapping_add(r as u64), cfg.tol)
        })
        .collect::<Result<Vec<_>, _>>()?;
    for (r, c) in certs.iter().enumerate() {
        checks.assert(
            format!("bump[{r}]"),
            c.passes(LN_C_CERT),
            format!("decay excess {:.4}, target growth {:.2e}", c.decay_excess(), c.sup_growth_target),
        );
    }

    let mut certificate = certificate(Mode::Multi, reports, checks);
    certificate.bump_certificates = certs;
    Ok(VerifyOutcome { certificate, trajectories })
}

/// One `A,lambda,alpha,l2_verdict` row per grid point, in grid order.
/// `(A, lambda, (alpha, verdict) or the error message)` for one grid point.
pub type SweepRow = (f64, f64, Result<(f64, L2Verdict), String>);

pub fn sweep_rows(cfg: &RunConfig) -> Vec<SweepRow> {
    let Some(grid) = &cfg.grid else { return Vec::new() };
    let points: Vec<(f64, f64)> =
        grid.amplitudes.iter().flat_map(|&a| grid.lambdas.iter().map(move |&l| (a, l))).collect();
    points
        .par_iter()
        .map(|&(a, lambda)| {
            let row = RunConfig {
                mode: Mode::Supercritical,
                targets: vec![crate::config::TargetConfig { lambda, theta_deg: Some(grid.theta_deg), theta_rad: None }],
                amplitude: Some(a),
                span: Some(cfg.span.unwrap_or((0.0, 1e4))),
                grid: None,
                expectation: Some(if a > 0.5 { Expectation::Eigenvalue } else { Expectation::NoEigenvalue }),
                ..cfg.clone()
            };
            let result = verify_report(&row).map_err(|e| e.to_string()).and_then(|o| {
                let c = o.certificate;
                c.alpha.map(|al| (al, c.l2_verdict)).ok_or_else(|| "no decay fit".to_string())
            });
            (a, lambda, result)
        })
        .collect()
}

pub fn sweep(cfg: &RunConfig, out: &Path) -> CliResult<String> {
    let mut csv = String::from("A,lambda,alpha,l2_verdict\n");
    for (a, lambda, result) in sweep_rows(cfg) {
        let (alpha, verdict) = match result {
            Ok((alpha, v)) => (fmt_f64(alpha), serde_json::to_value(v)?.as_str().unwrap_or_default().to_string()),
            Err(e) => (String::new(), format!("error: {}", e.replace([',', '\n'], ";"))),
        };
        csv.push_str(&format!("{},{},{alpha},{verdict}\n", fmt_f64(a), fmt_f64(lambda)));
    }
    write_atomic(&out.join("sweep.csv"), csv.as_bytes())?;
    Ok(csv)
}
