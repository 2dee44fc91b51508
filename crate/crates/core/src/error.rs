use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("unknown domain `{0}`")]
    UnknownDomain(String),
    #[error("not found: {0}")]
    NotFound(String),
    #[error("negative weight {weight} at row {row}, column {col}")]
    NegativeWeight { row: usize, col: usize, weight: f64 },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("operator has dimension 0")]
    EmptyOperator,
    #[error("linear system is singular")]
    Singular,
    #[error("entity universes differ; symmetric difference: {0:?}")]
    UniverseMismatch(Vec<String>),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
