#![allow(dead_code)]

use embedded_dirac::{PotentialSegment, PotentialSpec, Resonant, SegmentKind};
use rand::Rng;

/// Piecewise Coulomb potential with random lock frequencies and phase offsets.
///
/// Every piece has amplitude at most `a`; the unbounded last piece has
/// amplitude exactly `a`, so `limsup x·|V| = a`.
pub fn random_coulomb<R: Rng>(rng: &mut R, a: f64, max_pieces: usize, x_max: f64) -> PotentialSpec {
    let pieces = rng.random_range(1..=max_pieces);
    let mut cuts: Vec<f64> = (1..pieces).map(|_| rng.random_range(0.5..x_max)).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut bounds = vec![0.0];
    bounds.extend(cuts);
    bounds.push(f64::INFINITY);
    let segments = bounds
        .windows(2)
        .enumerate()
        .map(|(i, w)| PotentialSegment {
            x_lo: w[0],
            x_hi: w[1],
            kind: SegmentKind::CoulombResonant(Resonant {
                amplitude: if i + 2 == bounds.len() { a } else { rng.random_range(-a..=a) },
                shift: 0.0,
                lock_lambda: rng.random_range(-3.0..3.0),
                phase_offset: rng.random_range(-4.0..4.0),
                anchor: w[0],
            }),
        })
        .collect();
    PotentialSpec::new(segments).unwrap()
}
