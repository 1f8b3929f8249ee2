//! Piecewise-analytic potentials in polar form.
//!
//! A potential pair `(p, q)` is stored as an envelope `V` and a phase `φ`
//! with `q = V cos φ`, `p = V sin φ`. Every segment kind used by the
//! constructions has a phase that is affine in `x`, which the integrator
//! exploits to keep resonance-locked solutions exactly locked.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Angle `φ₀ ∈ [0, π)` of the boundary condition `u(0) sin φ₀ − v(0) cos φ₀ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BoundaryAngle(f64);

impl BoundaryAngle {
    pub fn new(phi0: f64) -> Result<Self> {
        if phi0.is_finite() && (0.0..PI).contains(&phi0) {
            Ok(Self(phi0))
        } else {
            Err(Error::Parameter(format!(
                "boundary angle {phi0} must lie in [0, pi)"
            )))
        }
    }

    /// Folds any finite angle into `[0, π)`.
    pub fn normalized(angle: f64) -> Self {
        let mut a = angle.rem_euclid(PI);
        // rem_euclid can round up to exactly π for tiny negative inputs
        if a >= PI {
            a = 0.0;
        }
        Self(a)
    }

    pub fn from_degrees(deg: f64) -> Self {
        Self::normalized(deg.to_radians())
    }

    pub fn radians(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BoundaryAngle {
    type Error = Error;
    fn try_from(v: f64) -> Result<Self> {
        Self::new(v)
    }
}

impl From<BoundaryAngle> for f64 {
    fn from(a: BoundaryAngle) -> f64 {
        a.0
    }
}

/// A target eigenvalue together with the boundary angle of its eigenfunction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenTarget {
    pub lambda: f64,
    pub theta: BoundaryAngle,
}

impl EigenTarget {
    pub fn new(lambda: f64, theta: BoundaryAngle) -> Self {
        Self { lambda, theta }
    }
}

/// Fails with [`Error::DegenerateTarget`] if two targets share an eigenvalue.
pub fn check_distinct(targets: &[EigenTarget]) -> Result<()> {
    for (i, a) in targets.iter().enumerate() {
        if !a.lambda.is_finite() {
            return Err(Error::Parameter(format!("target eigenvalue {} is not finite", a.lambda)));
        }
        if targets[..i].iter().any(|b| b.lambda == a.lambda) {
            return Err(Error::DegenerateTarget { lambda: a.lambda });
        }
    }
    Ok(())
}

/// `(p, q) = (V sin φ, V cos φ)`.
pub fn polar_to_pq(v: f64, phi: f64) -> (f64, f64) {
    let (s, c) = phi.sin_cos();
    (v * s, v * c)
}

/// Coulomb profile `C/(1+x−b)` with phase `−2λ_lock (x−a) + 2·offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonant {
    pub amplitude: f64,
    pub shift: f64,
    pub lock_lambda: f64,
    pub phase_offset: f64,
    pub anchor: f64,
}

impl Resonant {
    #[inline]
    pub fn profile(&self, x: f64) -> f64 {
        self.amplitude / (1.0 + x - self.shift)
    }

    #[inline]
    pub fn phase(&self, x: f64) -> f64 {
        -2.0 * self.lock_lambda * (x - self.anchor) + 2.0 * self.phase_offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SegmentKind {
    Zero,
    CoulombResonant(Resonant),
    /// Coulomb profile switched on and off with C^∞ collars of width `delta`.
    SmoothedBump { profile: Resonant, delta: f64 },
    /// `V = (a + eps)/x` on `[a_n, a_{n+1})`, phase `−2λ_lock x + 2·offset`.
    StaircaseStep {
        n: u32,
        a: f64,
        eps: f64,
        lock_lambda: f64,
        phase_offset: f64,
    },
}

/// Infinitely smooth step: 0 at `t ≤ 0`, 1 at `t ≥ 1`, all derivatives vanish at both ends.
pub fn smoothstep(t: f64) -> f64 {
    fn f(t: f64) -> f64 {
        if t > 0.0 {
            (-1.0 / t).exp()
        } else {
            0.0
        }
    }
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = f(t);
        a / (a + f(1.0 - t))
    }
}

/// One piece of a [`PotentialSpec`], active on `[x_lo, x_hi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialSegment {
    pub x_lo: f64,
    pub x_hi: f64,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

impl PotentialSegment {
    pub fn zero(x_lo: f64, x_hi: f64) -> Self {
        Self { x_lo, x_hi, kind: SegmentKind::Zero }
    }

    /// Signed envelope `V(x)`.
    pub fn amplitude(&self, x: f64) -> f64 {
        match &self.kind {
            SegmentKind::Zero => 0.0,
            SegmentKind::CoulombResonant(r) => r.profile(x),
            SegmentKind::SmoothedBump { profile, delta } => {
                let cut = smoothstep((x - self.x_lo) / delta) * smoothstep((self.x_hi - x) / delta);
                if cut == 0.0 {
                    0.0
                } else {
                    profile.profile(x) * cut
                }
            }
            SegmentKind::StaircaseStep { a, eps, .. } => (a + eps) / x,
        }
    }

    pub fn phase(&self, x: f64) -> f64 {
        match &self.kind {
            SegmentKind::Zero => 0.0,
            SegmentKind::CoulombResonant(r) | SegmentKind::SmoothedBump { profile: r, .. } => {
                r.phase(x)
            }
            SegmentKind::StaircaseStep { lock_lambda, phase_offset, .. } => {
                -2.0 * lock_lambda * x + 2.0 * phase_offset
            }
        }
    }

    /// `φ'(x)`, constant on every segment kind.
    pub fn phase_rate(&self) -> f64 {
        match &self.kind {
            SegmentKind::Zero => 0.0,
            SegmentKind::CoulombResonant(r) | SegmentKind::SmoothedBump { profile: r, .. } => {
                -2.0 * r.lock_lambda
            }
            SegmentKind::StaircaseStep { lock_lambda, .. } => -2.0 * lock_lambda,
        }
    }

    /// Upper bound on `|V|` over `[x, x_hi)`; every profile here decreases in `|V|`.
    pub fn envelope_bound(&self, x: f64) -> f64 {
        match &self.kind {
            SegmentKind::Zero => 0.0,
            SegmentKind::CoulombResonant(r) | SegmentKind::SmoothedBump { profile: r, .. } => {
                r.profile(x.max(self.x_lo)).abs()
            }
            SegmentKind::StaircaseStep { a, eps, .. } => ((a + eps) / x.max(self.x_lo)).abs(),
        }
    }

    /// Interior points where the profile changes analytic form (bump collar edges).
    pub fn interior_breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            SegmentKind::SmoothedBump { delta, .. } => {
                let l = self.x_lo + delta;
                let r = self.x_hi - delta;
                [l, r]
                    .into_iter()
                    .filter(|&p| p > self.x_lo && p < self.x_hi)
                    .fold(Vec::new(), |mut v, p| {
                        if v.last() != Some(&p) {
                            v.push(p);
                        }
                        v
                    })
            }
            _ => Vec::new(),
        }
    }

    pub fn lock_lambda(&self) -> Option<f64> {
        match &self.kind {
            SegmentKind::Zero => None,
            SegmentKind::CoulombResonant(r) | SegmentKind::SmoothedBump { profile: r, .. } => {
                Some(r.lock_lambda)
            }
            SegmentKind::StaircaseStep { lock_lambda, .. } => Some(*lock_lambda),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.x_lo >= 0.0 && self.x_lo < self.x_hi) || self.x_lo.is_nan() || self.x_hi.is_nan() {
            return Err(Error::Parameter(format!(
                "segment interval [{}, {}) is empty or negative",
                self.x_lo, self.x_hi
            )));
        }
        match &self.kind {
            SegmentKind::Zero => {}
            SegmentKind::CoulombResonant(r) => {
                if !(r.shift < self.x_lo + 1.0) {
                    return Err(Error::Parameter(format!(
                        "shift b = {} makes 1/(1 + x - b) singular on [{}, ..)",
                        r.shift, self.x_lo
                    )));
                }
            }
            SegmentKind::SmoothedBump { profile, delta } => {
                if !(profile.shift < self.x_lo) {
                    return Err(Error::Parameter(format!(
                        "shift b = {} must lie left of the bump start {}",
                        profile.shift, self.x_lo
                    )));
                }
                if !self.x_hi.is_finite() || !(*delta > 0.0) || 2.0 * delta > self.x_hi - self.x_lo {
                    return Err(Error::Parameter(format!(
                        "bump [{}, {}) with collar width {delta} is malformed",
                        self.x_lo, self.x_hi
                    )));
                }
            }
            SegmentKind::StaircaseStep { .. } => {
                if !(self.x_lo > 0.0) {
                    return Err(Error::Parameter("staircase step must start at x > 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// Ordered, contiguous segments covering `[0, ∞)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PotentialSpec {
    segments: Vec<PotentialSegment>,
}

impl PotentialSpec {
    pub fn new(segments: Vec<PotentialSegment>) -> Result<Self> {
        let first = segments
            .first()
            .ok_or_else(|| Error::Parameter("potential needs at least one segment".into()))?;
        if first.x_lo != 0.0 {
            return Err(Error::Parameter(format!(
                "first segment starts at {} instead of 0",
                first.x_lo
            )));
        }
        for s in &segments {
            s.validate()?;
        }
        for w in segments.windows(2) {
            if w[0].x_hi != w[1].x_lo {
                return Err(Error::Parameter(format!(
                    "segments not contiguous at {} / {}",
                    w[0].x_hi, w[1].x_lo
                )));
            }
        }
        let last = segments.last().unwrap();
        if last.x_hi != f64::INFINITY {
            return Err(Error::Parameter(format!(
                "last segment ends at {} instead of infinity",
                last.x_hi
            )));
        }
        Ok(Self { segments })
    }

    /// Orders the given segments and fills every uncovered gap of `[0, ∞)` with zero.
    pub fn with_zero_fill(mut segments: Vec<PotentialSegment>) -> Result<Self> {
        segments.sort_by(|a, b| a.x_lo.total_cmp(&b.x_lo));
        let mut out = Vec::with_capacity(2 * segments.len() + 1);
        let mut cursor = 0.0;
        for s in segments {
            if s.x_lo < cursor {
                return Err(Error::Parameter(format!(
                    "segments overlap at {}",
                    s.x_lo
                )));
            }
            if s.x_lo > cursor {
                out.push(PotentialSegment::zero(cursor, s.x_lo));
            }
            cursor = s.x_hi;
            out.push(s);
        }
        if cursor < f64::INFINITY {
            out.push(PotentialSegment::zero(cursor, f64::INFINITY));
        }
        Self::new(out)
    }

    pub fn zero() -> Self {
        Self { segments: vec![PotentialSegment::zero(0.0, f64::INFINITY)] }
    }

    pub fn segments(&self) -> &[PotentialSegment] {
        &self.segments
    }

    /// Index of the unique segment containing `x`.
    pub fn segment_index(&self, x: f64) -> Result<usize> {
        if !(x >= 0.0) || x == f64::INFINITY {
            return Err(Error::Domain { x });
        }
        let i = self.segments.partition_point(|s| s.x_hi <= x);
        debug_assert!(i < self.segments.len());
        Ok(i)
    }

    pub fn segment_at(&self, x: f64) -> Result<&PotentialSegment> {
        Ok(&self.segments[self.segment_index(x)?])
    }

    /// `(V(x), φ(x))`.
    pub fn eval(&self, x: f64) -> Result<(f64, f64)> {
        let s = self.segment_at(x)?;
        Ok((s.amplitude(x), s.phase(x)))
    }

    /// `(p(x), q(x))`.
    pub fn pq_at(&self, x: f64) -> Result<(f64, f64)> {
        let (v, phi) = self.eval(x)?;
        Ok(polar_to_pq(v, phi))
    }

    /// `sqrt(p² + q²)`, which equals `|V(x)|`.
    pub fn envelope(&self, x: f64) -> Result<f64> {
        Ok(self.segment_at(x)?.amplitude(x).abs())
    }

    /// Mandatory mesh points strictly inside `(lo, hi)`: junctions and collar edges.
    pub fn mesh_points(&self, lo: f64, hi: f64) -> Vec<f64> {
        let mut pts = Vec::new();
        for s in &self.segments {
            if s.x_lo >= hi {
                break;
            }
            if s.x_lo > lo {
                pts.push(s.x_lo);
            }
            pts.extend(s.interior_breakpoints().into_iter().filter(|&p| p > lo && p < hi));
        }
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump() -> PotentialSegment {
        PotentialSegment {
            x_lo: 10.0,
            x_hi: 20.0,
            kind: SegmentKind::SmoothedBump {
                profile: Resonant {
                    amplitude: 3.0,
                    shift: 0.0,
                    lock_lambda: 1.0,
                    phase_offset: 0.2,
                    anchor: 10.0,
                },
                delta: 1.0,
            },
        }
    }

    #[test]
    fn polar_examples() {
        assert_eq!(polar_to_pq(1.0, 0.0), (0.0, 1.0));
        assert_eq!(polar_to_pq(0.0, 1.234), (0.0, 0.0));
        let (p, q) = polar_to_pq(2.0, PI / 2.0);
        assert_eq!(p, 2.0);
        assert!(q.abs() < 1e-15);
    }

    #[test]
    fn boundary_angle_range() {
        assert!(BoundaryAngle::new(PI).is_err());
        assert!(BoundaryAngle::new(-0.1).is_err());
        assert!(BoundaryAngle::new(f64::NAN).is_err());
        assert_eq!(BoundaryAngle::new(0.0).unwrap().radians(), 0.0);
        let a = BoundaryAngle::normalized(-1e-300);
        assert!((0.0..PI).contains(&a.radians()));
        assert!((BoundaryAngle::from_degrees(190.0).radians() - 10f64.to_radians()).abs() < 1e-14);
        assert!((BoundaryAngle::normalized(0.3 + PI).radians() - 0.3).abs() < 1e-15);
    }

    #[test]
    fn distinct_targets() {
        let t = |l| EigenTarget::new(l, BoundaryAngle::new(0.1).unwrap());
        assert!(check_distinct(&[t(1.0), t(-1.0)]).is_ok());
        assert_eq!(
            check_distinct(&[t(1.0), t(2.0), t(1.0)]),
            Err(Error::DegenerateTarget { lambda: 1.0 })
        );
    }

    #[test]
    fn smoothstep_limits() {
        assert_eq!(smoothstep(0.0), 0.0);
        assert_eq!(smoothstep(1.0), 1.0);
        assert!((smoothstep(0.5) - 0.5).abs() < 1e-15);
        let mut prev = 0.0;
        for i in 1..100 {
            let s = smoothstep(i as f64 / 100.0);
            assert!(s >= prev);
            prev = s;
        }
    }

    #[test]
    fn bump_vanishes_at_ends_and_outside() {
        let spec = PotentialSpec::with_zero_fill(vec![bump()]).unwrap();
        assert_eq!(spec.segments().len(), 3);
        assert_eq!(spec.envelope(10.0).unwrap(), 0.0);
        assert_eq!(spec.envelope(20.0).unwrap(), 0.0);
        assert_eq!(spec.envelope(5.0).unwrap(), 0.0);
        assert_eq!(spec.envelope(25.0).unwrap(), 0.0);
        let x = 15.0;
        assert!((spec.envelope(x).unwrap() * (1.0 + x) - 3.0).abs() < 1e-14);
        for i in 0..=1000 {
            let x = 10.0 + i as f64 * 0.01;
            assert!(spec.envelope(x).unwrap() * x <= 3.0);
        }
        assert_eq!(spec.mesh_points(0.0, 100.0), vec![10.0, 11.0, 19.0, 20.0]);
    }

    #[test]
    fn spec_validation() {
        assert!(PotentialSpec::new(vec![]).is_err());
        assert!(PotentialSpec::new(vec![PotentialSegment::zero(1.0, f64::INFINITY)]).is_err());
        assert!(PotentialSpec::new(vec![PotentialSegment::zero(0.0, 5.0)]).is_err());
        assert!(PotentialSpec::new(vec![
            PotentialSegment::zero(0.0, 5.0),
            PotentialSegment::zero(6.0, f64::INFINITY)
        ])
        .is_err());
        let mut b = bump();
        if let SegmentKind::SmoothedBump { profile, .. } = &mut b.kind {
            profile.shift = 10.0;
        }
        assert!(PotentialSpec::with_zero_fill(vec![b]).is_err());
        assert!(PotentialSpec::with_zero_fill(vec![bump(), bump()]).is_err());
    }

    #[test]
    fn evaluation_outside_coverage_is_domain_error() {
        let spec = PotentialSpec::zero();
        assert_eq!(spec.eval(-1.0), Err(Error::Domain { x: -1.0 }));
        assert!(spec.eval(f64::NAN).is_err());
        assert!(spec.eval(f64::INFINITY).is_err());
    }

    #[test]
    fn segment_lookup_is_half_open() {
        let spec = PotentialSpec::with_zero_fill(vec![bump()]).unwrap();
        assert_eq!(spec.segment_index(9.999).unwrap(), 0);
        assert_eq!(spec.segment_index(10.0).unwrap(), 1);
        assert_eq!(spec.segment_index(19.999).unwrap(), 1);
        assert_eq!(spec.segment_index(20.0).unwrap(), 2);
    }
}
