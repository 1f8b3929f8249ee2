use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Core(#[from] embedded_dirac::Error),
    #[error("failed assertions: {}", .0.join(", "))]
    Assertion(Vec<String>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) => 2,
            _ => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Json(_) => "json",
            CliError::Core(_) => "computation",
            CliError::Assertion(_) => "assertion",
        }
    }

    /// Single-line JSON for standard error.
    pub fn to_json(&self) -> String {
        let mut v = serde_json::json!({ "error": self.kind(), "message": self.to_string() });
        if let CliError::Assertion(failed) = self {
            v["failed"] = serde_json::json!(failed);
        }
        v.to_string()
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
