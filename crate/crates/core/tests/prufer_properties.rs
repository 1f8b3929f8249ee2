mod common;

use std::f64::consts::PI;

use embedded_dirac::{
    integrate_direct, integrate_prufer_with, polar_to_pq, BoundaryAngle, PotentialSpec, PrueferOptions,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

proptest! {
    #[test]
    fn polar_identity(v in -50.0f64..50.0, phi in -100.0f64..100.0) {
        let (p, q) = polar_to_pq(v, phi);
        prop_assert!((p * p + q * q - v * v).abs() <= 1e-12 * (1.0 + v * v));
    }

    #[test]
    fn envelope_is_pq_norm(seed in any::<u64>(), x in 0.0f64..200.0) {
        let pot = common::random_coulomb(&mut ChaCha8Rng::seed_from_u64(seed), 2.0, 4, 100.0);
        let (p, q) = pot.pq_at(x).unwrap();
        prop_assert!((p.hypot(q) - pot.envelope(x).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn zero_potential_rotates_freely(lambda in -20.0f64..20.0, theta0 in 0.0f64..PI, ln_r0 in -5.0f64..5.0) {
        let opts = PrueferOptions { ln_r0, ..PrueferOptions::default() };
        let traj = integrate_prufer_with(&PotentialSpec::zero(), lambda, theta0, (0.0, 30.0), &opts).unwrap();
        for s in traj.samples() {
            prop_assert_eq!(s.ln_r, ln_r0);
            prop_assert!((s.theta - (theta0 - lambda * s.x)).abs() < 1e-9);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn pi_shift_leaves_amplitude(seed in any::<u64>(), lambda in -3.0f64..3.0, theta0 in 0.0f64..PI) {
        let pot = common::random_coulomb(&mut ChaCha8Rng::seed_from_u64(seed), 3.0, 4, 30.0);
        let opts = PrueferOptions::default();
        let a = integrate_prufer_with(&pot, lambda, theta0, (0.0, 40.0), &opts).unwrap();
        let b = integrate_prufer_with(&pot, lambda, theta0 + PI, (0.0, 40.0), &opts).unwrap();
        for x in [5.0, 17.5, 40.0] {
            let (ra, ta) = a.interpolate(x).unwrap();
            let (rb, tb) = b.interpolate(x).unwrap();
            prop_assert!((ra - rb).abs() < 1e-8);
            prop_assert!((tb - ta - PI).abs() < 1e-8);
        }
    }

    #[test]
    fn matches_direct_oracle(seed in any::<u64>(), lambda in -3.0f64..3.0, theta0 in 0.0f64..PI) {
        let pot = common::random_coulomb(&mut ChaCha8Rng::seed_from_u64(seed), 2.0, 4, 20.0);
        let theta = BoundaryAngle::new(theta0).unwrap();
        let traj = integrate_prufer_with(&pot, lambda, theta.radians(), (0.0, 25.0), &PrueferOptions::with_tol(1e-10)).unwrap();
        let direct = integrate_direct(&pot, lambda, (theta0.cos(), theta0.sin()), (0.0, 25.0), 1e-10).unwrap();
        for d in direct.iter().step_by(97) {
            let r = traj.ln_r_at(d.x).unwrap().exp();
            prop_assert!((r / d.amplitude() - 1.0).abs() < 1e-6, "x = {}: {} vs {}", d.x, r, d.amplitude());
        }
    }
}
