mod common;

use std::f64::consts::PI;

use embedded_dirac::constructors::{make_bump, make_locked_coulomb, make_supercritical, BumpCertificateInputs};
use embedded_dirac::verify::{
    bump_certificate, check_no_eigenvalue_bound, critical_segment_quadrature, critical_tail_series,
    fit_decay_exponent, l2_tail_estimate, log_sum_exp, L2Verdict, LN_C_CERT,
};
use embedded_dirac::{integrate_prufer, BoundaryAngle};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn angle(a: f64) -> BoundaryAngle {
    BoundaryAngle::new(a).unwrap()
}

#[test]
fn exponent_recovery_is_independent_of_lambda_and_angle() {
    let mut k = 0;
    for &a in &[0.6, 0.75, 1.0, 2.0, 5.0] {
        for &lambda in &[-3.0, -1.0, 0.5, 1.0, 10.0] {
            k += 1;
            let th = angle((0.37 * k as f64) % PI);
            let pot = make_supercritical(lambda, a, th).unwrap();
            let traj = integrate_prufer(&pot, lambda, th, (0.0, 1e3), 1e-9).unwrap();
            let fit = fit_decay_exponent(&traj, (0.0, 1e3)).unwrap();
            assert!((fit.alpha - a).abs() < 0.01, "A {a}, lambda {lambda}: {}", fit.alpha);
        }
    }
}

#[test]
fn zero_potential_exponent_is_zero() {
    let traj = integrate_prufer(&embedded_dirac::PotentialSpec::zero(), 1.5, angle(0.2), (0.0, 1e3), 1e-9).unwrap();
    assert!(fit_decay_exponent(&traj, (0.0, 1e3)).unwrap().alpha.abs() < 0.01);
}

#[test]
fn l2_integral_matches_closed_form() {
    for &a in &[0.75, 1.0, 2.0] {
        let pot = make_supercritical(1.0, a, angle(0.5)).unwrap();
        let traj = integrate_prufer(&pot, 1.0, angle(0.5), (0.0, 1e4), 1e-9).unwrap();
        let est = l2_tail_estimate(&traj, 0.0).unwrap();
        assert_eq!(est.verdict, L2Verdict::Converging);
        let exact = 1.0 / (2.0 * a - 1.0);
        assert!((est.integral / exact - 1.0).abs() < 1e-4, "A {a}: {} vs {exact}", est.integral);
    }
}

#[test]
fn threshold_dichotomy() {
    let run = |a| {
        let pot = make_locked_coulomb(-1.0, a, angle(2.0)).unwrap();
        let traj = integrate_prufer(&pot, -1.0, angle(2.0), (0.0, 1e4), 1e-9).unwrap();
        l2_tail_estimate(&traj, 0.0).unwrap().verdict
    };
    assert_eq!(run(0.4), L2Verdict::Diverging);
    assert_eq!(run(0.75), L2Verdict::Converging);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn lower_bound_holds_for_arbitrary_phases(seed in any::<u64>(), lambda in -4.0f64..4.0, theta0 in 0.0f64..PI) {
        let pot = common::random_coulomb(&mut ChaCha8Rng::seed_from_u64(seed), 0.3, 5, 200.0);
        let cert = check_no_eigenvalue_bound(&pot, lambda, angle(theta0), (0.0, 1e3), 0.1, 1e-9).unwrap();
        prop_assert!(cert.passed, "{:?}", cert);
    }
}

#[test]
fn bump_certificate_holds_and_stays_bounded_in_x1() {
    let others = [-1.0, 3.0];
    for x1 in [600.0, 900.0, 1500.0] {
        let inputs = BumpCertificateInputs { x0: 300.0, x1, b: 0.0, c_amp: 110.0, k_gap: 220.0 };
        let seg = make_bump(1.0, &[], &inputs, 0.8, 1.0).unwrap();
        let cert = bump_certificate(&seg, 220.0, 1.0, &others, 11, 1e-9).unwrap();
        assert!(cert.passes(LN_C_CERT), "{cert:?}");
        assert!(cert.growth_within(1.5), "{cert:?}");
        assert!(cert.sup_growth_target <= 1e-9);
    }
}

#[test]
fn critical_series_is_summable() {
    let terms = critical_tail_series(1..=20);
    let head: Vec<f64> = terms[..10].iter().map(|t| t.ln_integral).collect();
    let tail: Vec<f64> = terms[10..].iter().map(|t| t.ln_integral).collect();
    assert!(log_sum_exp(&tail) - log_sum_exp(&head) < (1e-20f64).ln());
    for t in &terms[..2] {
        let q = critical_segment_quadrature(t.n, 400);
        assert!(((q - t.ln_integral).exp() - 1.0).abs() < 1e-6);
    }
}
