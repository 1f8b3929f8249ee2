//! Command-line front end for `embedded-dirac`: builds constructions from a
//! JSON config, runs the verification checks and writes CSV/JSON artifacts.

// `!(x > 0.0)` style checks are meant to reject NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod build;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{construct, sweep, verify, verify_report, Certificate, Check, Manifest};
pub use config::{Mode, RunConfig};
pub use error::{CliError, CliResult};
