use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("target column `{0}` not found in header")]
    MissingTarget(String),
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("no data rows")]
    EmptyData,
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported ARFF construct at line {line}: {construct}")]
    UnsupportedArff { line: usize, construct: String },
    #[error("network error (retryable) after {attempts} attempts: {message}")]
    Network { attempts: usize, message: String },
    #[error("unknown dataset {id} (HTTP {status}): {message}")]
    UnknownDataset {
        id: u64,
        status: u16,
        message: String,
    },
    #[error("malformed payload: {0}")]
    MalformedPayload(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("dataset name mismatch at position {index}: `{left}` vs `{right}`")]
    NameMismatch {
        index: usize,
        left: String,
        right: String,
    },
    #[error("every row or column was pruned")]
    EmptyDatabase,
    #[error("non-finite value: {0}")]
    NonFinite(String),
    #[error("configuration error: {0}")]
    Config(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Process exit code: 1 usage, 2 data error, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 1,
            Error::Io { .. }
            | Error::Csv(_)
            | Error::Json(_)
            | Error::MissingTarget(_)
            | Error::RaggedRow { .. }
            | Error::EmptyData
            | Error::Parse { .. }
            | Error::UnsupportedArff { .. }
            | Error::Network { .. }
            | Error::UnknownDataset { .. }
            | Error::MalformedPayload(_)
            | Error::InvalidInput(_)
            | Error::Shape(_)
            | Error::NameMismatch { .. }
            | Error::EmptyDatabase => 2,
            Error::NonFinite(_) => 3,
        }
    }
}
