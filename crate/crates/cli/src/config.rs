//! JSON run configuration.

use std::path::Path;

use embedded_dirac::constructors::{GrowthBudget, DEFAULT_C_AMP, MAX_STAIRCASE_STEPS};
use embedded_dirac::verify::DEFAULT_L2_MARGIN;
use embedded_dirac::{BoundaryAngle, EigenTarget, DEFAULT_TOL};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    Supercritical,
    Critical,
    Bump,
    Multi,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Expectation {
    Eigenvalue,
    NoEigenvalue,
}

/// `(λ, boundary angle)`, the angle given in degrees or radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetConfig {
    pub lambda: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta_rad: Option<f64>,
}

impl TargetConfig {
    pub fn resolve(&self) -> CliResult<EigenTarget> {
        if !self.lambda.is_finite() {
            return Err(CliError::Config(format!("lambda {} is not finite", self.lambda)));
        }
        let theta = match (self.theta_deg, self.theta_rad) {
            (Some(d), None) if d.is_finite() => BoundaryAngle::from_degrees(d),
            (None, Some(r)) if r.is_finite() => BoundaryAngle::normalized(r),
            (None, None) => BoundaryAngle::normalized(0.0),
            _ => {
                return Err(CliError::Config(format!(
                    "target {} needs exactly one finite angle (theta_deg or theta_rad)",
                    self.lambda
                )))
            }
        };
        Ok(EigenTarget::new(self.lambda, theta))
    }

    /// The same target with its angle normalised to radians in `[0, π)`.
    pub fn canonical(t: &EigenTarget) -> Self {
        Self { lambda: t.lambda, theta_deg: None, theta_rad: Some(t.theta.radians()) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpConfig {
    pub x0: f64,
    pub x1: f64,
    #[serde(default)]
    pub b: f64,
}

/// Growth budget written as `"log"` or `"power <p>"`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct BudgetSpec(pub GrowthBudget);

impl TryFrom<String> for BudgetSpec {
    type Error = String;

    fn try_from(s: String) -> Result<Self, String> {
        let words: Vec<&str> = s.split_whitespace().collect();
        match words.as_slice() {
            ["log"] => Ok(BudgetSpec(GrowthBudget::Log)),
            ["power", p] => p
                .parse::<f64>()
                .map(|p| BudgetSpec(GrowthBudget::Power { p }))
                .map_err(|e| format!("bad exponent in budget {s:?}: {e}")),
            _ => Err(format!("unknown budget {s:?}; expected \"log\" or \"power <p>\"")),
        }
    }
}

impl From<BudgetSpec> for String {
    fn from(b: BudgetSpec) -> String {
        match b.0 {
            GrowthBudget::Log => "log".into(),
            GrowthBudget::Power { p } => format!("power {p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ScheduleConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_blocks: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<BudgetSpec>,
}

/// `(A, λ)` grid for `sweep`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SweepGrid {
    #[serde(default)]
    pub amplitudes: Vec<f64>,
    #[serde(default)]
    pub lambdas: Vec<f64>,
    #[serde(default)]
    pub theta_deg: f64,
}

fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_margin() -> f64 {
    DEFAULT_L2_MARGIN
}
fn default_eps() -> f64 {
    0.04
}
fn default_per_decade() -> usize {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schema_version: Option<u32>,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub targets: Vec<TargetConfig>,
    /// `A` for the single-eigenvalue Coulomb construction.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub amplitude: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_amp: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub span: Option<(f64, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bump: Option<BumpConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k_gap: Option<f64>,
    #[serde(default)]
    pub schedule: ScheduleConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expectation: Option<Expectation>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<SweepGrid>,
    #[serde(default = "default_tol")]
    pub tol: f64,
    /// Half-width of the inconclusive band around 1/2 in the L² verdict.
    #[serde(default = "default_margin")]
    pub margin: f64,
    /// `ε` of the lower-bound check.
    #[serde(default = "default_eps")]
    pub eps: f64,
    #[serde(default)]
    pub seed: u64,
    /// Output sampling density in points per decade of `1 + x`.
    #[serde(default = "default_per_decade")]
    pub per_decade: usize,
}

impl RunConfig {
    pub fn from_json(text: &str) -> CliResult<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        Self::from_json(&text)
    }

    pub fn resolved_targets(&self) -> CliResult<Vec<EigenTarget>> {
        let targets = self.targets.iter().map(TargetConfig::resolve).collect::<CliResult<Vec<_>>>()?;
        embedded_dirac::potential::check_distinct(&targets)
            .map_err(|_| CliError::Config("target lambdas must be distinct".into()))?;
        Ok(targets)
    }

    pub fn c_amp_or_default(&self) -> f64 {
        self.c_amp.unwrap_or(DEFAULT_C_AMP)
    }

    /// Checks everything that does not need a computation.
    pub fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Config(m));
        if let Some(v) = self.schema_version {
            if v > SCHEMA_VERSION {
                return bad(format!("schema_version {v} is newer than supported version {SCHEMA_VERSION}"));
            }
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            return bad(format!("tol = {} must lie in (0, 1)", self.tol));
        }
        if !(self.margin >= 0.0 && self.margin < 0.5) {
            return bad(format!("margin = {} must lie in [0, 1/2)", self.margin));
        }
        if !(self.eps > 0.0) {
            return bad(format!("eps = {} must be positive", self.eps));
        }
        if self.per_decade == 0 {
            return bad("per_decade must be positive".into());
        }
        if let Some((a, b)) = self.span {
            if !(a >= 0.0 && b > a && b.is_finite()) {
                return bad(format!("span [{a}, {b}] must be a finite interval in [0, inf)"));
            }
        }
        if let Some(c) = self.c_amp {
            if !(c >= 0.0 && c.is_finite()) {
                return bad(format!("c_amp = {c} must be finite and non-negative"));
            }
        }
        let targets = self.resolved_targets()?;
        if self.grid.is_some() {
            return Ok(());
        }
        match self.mode {
            Mode::Supercritical => {
                if targets.len() != 1 {
                    return bad("supercritical mode needs exactly one target".into());
                }
                match self.amplitude {
                    Some(a) if a.is_finite() && a >= 0.0 => {}
                    Some(a) => return bad(format!("amplitude {a} must be finite and non-negative")),
                    None => return bad("supercritical mode needs `amplitude`".into()),
                }
            }
            Mode::Critical => {
                if targets.len() != 1 {
                    return bad("critical mode needs exactly one target".into());
                }
                let n = self.n_max.unwrap_or(3);
                if n == 0 || n > MAX_STAIRCASE_STEPS {
                    return bad(format!("n_max = {n} must lie in 1..={MAX_STAIRCASE_STEPS}"));
                }
            }
            Mode::Bump => {
                if targets.is_empty() {
                    return bad("bump mode needs the locked target first, then the others".into());
                }
                match self.bump {
                    Some(g) if g.x1 > g.x0 && g.x0 > g.b && g.x1.is_finite() => {}
                    Some(g) => return bad(format!("bump needs b < x0 < x1 < inf, got {g:?}")),
                    None => return bad("bump mode needs `bump: {x0, x1, b}`".into()),
                }
            }
            Mode::Multi => {
                if targets.is_empty() {
                    return bad("multi mode needs at least one target".into());
                }
            }
        }
        Ok(())
    }
}
