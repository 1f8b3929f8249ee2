//! Embedded eigenvalues of half-line Dirac operators in canonical form.
//!
//! The operator
//!
//! ```text
//! L_{p,q} (u, v)ᵀ = [[0, −1], [1, 0]] (u, v)ᵀ' + [[−p, q], [q, p]] (u, v)ᵀ
//! ```
//!
//! has `λ` as an eigenvalue exactly when the Prüfer amplitude `R` of the
//! `λ`-solution is square integrable. This crate builds potentials that embed
//! prescribed eigenvalues and checks their claims numerically:
//!
//! - [`potential`]: polar-form piecewise potentials (`q = V cos φ`, `p = V sin φ`).
//! - [`prufer`]: log-amplitude Prüfer integration plus a raw `(u, v)` oracle.
//! - [`constructors`]: single-eigenvalue, critical staircase, bump and
//!   multi-eigenvalue assemblies.
//! - [`verify`]: L² verdicts, decay fits, lower bounds, oscillatory integrals,
//!   bump certificates and the critical tail series.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod constructors;
pub mod error;
mod ode;
pub mod potential;
pub mod prufer;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use potential::{
    polar_to_pq, BoundaryAngle, EigenTarget, PotentialSegment, PotentialSpec, Resonant, SegmentKind,
};
pub use prufer::{
    integrate_direct, integrate_prufer, integrate_prufer_with, prufer_rhs, DirectSample, PrueferOptions,
    PrueferSample, PrueferTrajectory, Sampling, DEFAULT_TOL,
};
