use embedded_dirac::constructors::{
    assemble_multi, make_bump, make_critical_staircase, make_supercritical, schedule_pieces, AssemblyParams,
    BumpCertificateInputs, GrowthBudget, SchedulePolicy,
};
use embedded_dirac::{integrate_prufer, BoundaryAngle, EigenTarget, Error, PotentialSpec, SegmentKind};

fn angle(a: f64) -> BoundaryAngle {
    BoundaryAngle::new(a).unwrap()
}

#[test]
fn supercritical_is_locked_for_every_lambda() {
    for &lambda in &[-3.0, -1.0, 0.5, 1.0, 10.0] {
        for &a in &[0.6, 1.0, 5.0] {
            let pot = make_supercritical(lambda, a, angle(1.3)).unwrap();
            let traj = integrate_prufer(&pot, lambda, angle(1.3), (0.0, 200.0), 1e-9).unwrap();
            let err = traj
                .samples()
                .iter()
                .map(|s| (s.ln_r + a * (1.0 + s.x).ln()).abs())
                .fold(0.0, f64::max);
            assert!(err < 1e-7, "lambda {lambda}, A {a}: {err}");
        }
    }
}

#[test]
fn staircase_matches_telescoping_sum_at_second_breakpoint() {
    let pot = make_critical_staircase(-0.7, angle(0.4), 2).unwrap();
    let a2 = 8f64.exp();
    let traj = integrate_prufer(&pot, -0.7, angle(0.4), (0.0, a2), 1e-9).unwrap();
    let expected = embedded_dirac::verify::critical_ln_r_at_breakpoint(2);
    assert!((traj.last().ln_r - expected).abs() < 1e-8, "{} vs {expected}", traj.last().ln_r);
}

#[test]
fn bump_envelope_outside_support_is_zero() {
    let inputs = BumpCertificateInputs { x0: 400.0, x1: 800.0, b: 10.0, c_amp: 110.0, k_gap: 300.0 };
    let seg = make_bump(0.5, &[], &inputs, 2.0, 1.0).unwrap();
    let pot = PotentialSpec::with_zero_fill(vec![seg]).unwrap();
    for x in [0.0, 399.999, 400.0, 800.0, 1e6] {
        assert_eq!(pot.envelope(x).unwrap(), 0.0);
    }
    assert!((pot.envelope(600.0).unwrap() - 110.0 / 591.0).abs() < 1e-15);
}

#[test]
fn assembled_envelope_respects_log_budget() {
    let targets: Vec<EigenTarget> =
        [1.0, -1.0, 2.0, -2.5, 0.25].iter().map(|&l| EigenTarget::new(l, angle(0.9))).collect();
    let h = GrowthBudget::Log;
    let s = schedule_pieces(&targets, Some(h), 110.5f64.exp(), &SchedulePolicy::default()).unwrap();
    for p in &s.pieces {
        for k in 0..=200 {
            let x = p.x_lo + (p.x_hi - p.x_lo) * k as f64 / 200.0;
            assert!(s.envelope_at(x, 0.0) * (1.0 + x) <= h.eval(x) * (1.0 + 1e-12));
        }
    }
    for b in s.blocks() {
        assert!(s.net_block_log_decay(b) < 0.0);
    }
}

#[test]
fn assembly_round_robin_is_locked_to_each_target() {
    let targets = vec![EigenTarget::new(2.0, angle(0.1)), EigenTarget::new(-2.0, angle(3.0))];
    let s = schedule_pieces(&targets, None, 150.0, &SchedulePolicy { full_blocks: 2, ..Default::default() }).unwrap();
    let pot = assemble_multi(&targets, &s, &AssemblyParams { k_gap: 120.0, ..Default::default() }).unwrap();
    let bumps: Vec<_> = pot
        .segments()
        .iter()
        .filter_map(|seg| match seg.kind {
            SegmentKind::SmoothedBump { profile, .. } => Some(profile.lock_lambda),
            _ => None,
        })
        .collect();
    assert_eq!(bumps, vec![2.0, -2.0, 2.0, -2.0]);
    let err = assemble_multi(&targets, &s, &AssemblyParams { k_gap: 200.0, ..Default::default() }).unwrap_err();
    assert!(matches!(err, Error::Admissibility { .. }));
}
