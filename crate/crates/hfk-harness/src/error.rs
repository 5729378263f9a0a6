use std::path::PathBuf;

use hfk_core::grid::GridError;
use hfk_core::pipeline::PipelineError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Grid { path: PathBuf, source: GridError },
    #[error("{0}")]
    Usage(String),
    #[error("report {path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Pipeline(#[from] PipelineError),
    #[error("verification failed: {0}")]
    Verification(String),
}

impl HarnessError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// 1 for bad input, 2 for a failed check, 3 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Io { .. } | HarnessError::Grid { .. } | HarnessError::Usage(_) | HarnessError::Json { .. } => 1,
            HarnessError::Verification(_) => 2,
            HarnessError::Pipeline(PipelineError::Io(_) | PipelineError::Unsupported(_)) => 1,
            HarnessError::Pipeline(_) => 3,
        }
    }
}

pub fn read_grid(path: &std::path::Path) -> Result<hfk_core::GridDiagram, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
    hfk_core::GridDiagram::parse(&text).map_err(|source| HarnessError::Grid { path: path.to_path_buf(), source })
}
