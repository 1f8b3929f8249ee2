use thiserror::Error;

/// Errors produced by potential evaluation, integration, construction and verification.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("x = {x} is outside the potential's coverage")]
    Domain { x: f64 },

    #[error("step size underflow at x = {x} (h = {h:e}); the potential is malformed")]
    Stiffness { x: f64, h: f64 },

    #[error("u^2 + v^2 left the floating-point range at x = {x}; use the Prüfer form for long spans")]
    Range { x: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate target: lambda = {lambda} coincides with a target eigenvalue")]
    DegenerateTarget { lambda: f64 },

    #[error("bump not admissible: x0 - b = {gap} must exceed K = {k_gap}")]
    Admissibility { gap: f64, k_gap: f64 },

    #[error("growth budget fails at x = {x}: {reason}")]
    Schedule { x: f64, reason: String },

    #[error("schedule/target mismatch: {0}")]
    Consistency(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("degenerate window: {0}")]
    Window(String),
}

pub type Result<T> = std::result::Result<T, Error>;
