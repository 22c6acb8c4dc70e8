use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at row {row}, column '{column}': {message}")]
    Parse {
        row: usize,
        column: String,
        message: String,
    },

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("label column '{0}' not found")]
    MissingLabelColumn(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "subsample size {requested} is smaller than the number of classes ({classes}); raise M to at least {classes}"
    )]
    SubsampleTooSmall { requested: usize, classes: usize },

    #[error("{n} qubits exceeds the simulator cap of {cap}; use fewer input columns")]
    QubitCap { n: usize, cap: usize },

    #[error("heavy-hex topology needs n = 9k + 3 qubits (12, 21, 30, ...), got {0}")]
    HeavyHexSize(usize),

    #[error("non-finite value in {0}")]
    NonFinite(String),

    #[error("training data contains a single class")]
    SingleClass,

    #[error("class id {0} was not seen during training")]
    UnknownClass(i64),

    #[error("sample {index}: {source}")]
    Sample {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("model file is missing section '{0}'")]
    MissingSection(String),

    #[error("unsupported model format version {found} (expected {expected})")]
    Version { found: u32, expected: u32 },

    #[error("malformed model file in section '{section}': {message}")]
    Format { section: String, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
