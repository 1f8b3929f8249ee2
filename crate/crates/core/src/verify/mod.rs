//! Numerical certificates for the spectral claims.

mod bounds;
mod bump;
mod critical;
mod fit;
mod oscillatory;

pub use bounds::{check_no_eigenvalue_bound, estimate_limsup_amplitude, LowerBoundCertificate};
pub use bump::{bump_certificate, boundary_angles, BumpCertificate, OtherGrowth, LN_C_CERT, N_BOUNDARY_ANGLES};
pub use critical::{
    critical_ln_r_at_breakpoint, critical_segment_quadrature, critical_tail_series, log_sum_exp,
    tail_constant, TailTerm,
};
pub use fit::{
    fit_decay_exponent, integral_of_r_squared, l2_tail_estimate, l2_tail_estimate_with, DecayFit,
    L2Estimate, L2Verdict, DEFAULT_L2_MARGIN,
};
pub use oscillatory::{
    calibrate_k_gap, fit_oscillatory_scaling, oscillatory_constant, oscillatory_integral_check,
    resonant_tail_potential, OscillatoryFit,
};
