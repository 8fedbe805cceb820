use std::path::PathBuf;

use thiserror::Error;
use tsallis_harness::HarnessError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] tsallis_core::Error),
    #[error(transparent)]
    Harness(#[from] HarnessError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid input: {0}")]
    Input(String),
}

impl CliError {
    /// 1 for domain and feasibility failures, 2 for I/O and configuration.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(tsallis_core::Error::Config(_)) => 2,
            CliError::Core(_) => 1,
            CliError::Harness(e) if e.is_config_or_io() => 2,
            CliError::Harness(_) => 1,
            CliError::Io { .. } | CliError::Input(_) => 2,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self.exit_code() {
            1 => "domain",
            _ => "input",
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::json!({
            "error": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        })
        .to_string()
    }
}
