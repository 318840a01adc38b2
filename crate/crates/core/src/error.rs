use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, SvanError>;

/// Errors produced by the tensor engine, model, analysis, image and training
/// layers. `category()` gives the short machine-readable class the CLI prints.
#[derive(Debug, thiserror::Error)]
pub enum SvanError {
    #[error("shape mismatch: {context}: {left:?} vs {right:?}")]
    ShapeMismatch {
        context: String,
        left: Vec<usize>,
        right: Vec<usize>,
    },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("gradient error: {0}")]
    Gradient(String),

    #[error("checkpoint error in {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },

    #[error("unsupported image {path}: {message}")]
    UnsupportedImage { path: PathBuf, message: String },

    #[error("png error for {path}: {message}")]
    Png { path: PathBuf, message: String },

    #[error("config error at {path}:{line}: {message}")]
    Config {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error("metric error: {0}")]
    Metric(String),

    #[error("training diverged: {0}")]
    Training(String),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("io error for {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SvanError {
    /// Short stable category tag, used for CLI error reporting.
    pub fn category(&self) -> &'static str {
        match self {
            SvanError::ShapeMismatch { .. } => "shape",
            SvanError::Dimension(_) => "dimension",
            SvanError::Gradient(_) => "gradient",
            SvanError::Checkpoint { .. } => "checkpoint",
            SvanError::UnsupportedImage { .. } => "unsupported-image",
            SvanError::Png { .. } => "png",
            SvanError::Config { .. } => "config",
            SvanError::Dataset(_) => "dataset",
            SvanError::Metric(_) => "metric",
            SvanError::Training(_) => "training",
            SvanError::Usage(_) => "usage",
            SvanError::Io { .. } => "io",
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SvanError::Io {
            path: path.into(),
            source,
        }
    }
}
