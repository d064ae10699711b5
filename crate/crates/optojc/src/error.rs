use optojc_core::Error as CoreError;

/// Everything the harness can fail with, grouped by exit code.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config line {line}: {key}: {message}")]
    Config {
        line: usize,
        key: String,
        message: String,
    },

    #[error("unknown scenario `{0}` (see `list-scenarios`)")]
    UnknownScenario(String),

    #[error("{module}: {source}")]
    Core {
        module: &'static str,
        #[source]
        source: CoreError,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    pub fn core(module: &'static str, source: CoreError) -> Self {
        HarnessError::Core { module, source }
    }

    /// 2 for bad input, 3 for numerical failure, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config { .. } | HarnessError::UnknownScenario(_) => 2,
            HarnessError::Core { source, .. } => match source {
                CoreError::Stiffness { .. }
                | CoreError::Divergence { .. }
                | CoreError::FactorizationSingularity { .. }
                | CoreError::NormDrift { .. }
                | CoreError::UndefinedQ { .. } => 3,
                CoreError::InvalidInput(_)
                | CoreError::Validation(_)
                | CoreError::CutoffTooSmall { .. }
                | CoreError::DimensionMismatch { .. }
                | CoreError::GridMismatch(_) => 2,
            },
            HarnessError::Io { .. } => 1,
        }
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
