//! CSV formatting and atomic file writes.

use std::io::Write;
use std::path::Path;

use embedded_dirac::PrueferTrajectory;
use tempfile::NamedTempFile;

use crate::error::{CliError, CliResult};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &[u8]) -> CliResult<()> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir).map_err(io)?;
    let mut tmp = NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(contents).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}

pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

pub fn trajectory_csv(traj: &PrueferTrajectory) -> String {
    let mut out = String::from("x,lnR,theta\n");
    for s in traj.samples() {
        out.push_str(&format!("{},{},{}\n", fmt_f64(s.x), fmt_f64(s.ln_r), fmt_f64(s.theta)));
    }
    out
}

/// `10^{k/per_decade} − 1` inside `[lo, hi]`, plus both ends.
pub fn log_points(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    let per = per_decade as f64;
    let k_lo = ((1.0 + lo).log10() * per).ceil() as i64;
    let k_hi = ((1.0 + hi).log10() * per).floor() as i64;
    let mut out = vec![lo];
    out.extend((k_lo..=k_hi).map(|k| 10f64.powf(k as f64 / per) - 1.0).filter(|&x| x > lo && x < hi));
    out.push(hi);
    out
}
