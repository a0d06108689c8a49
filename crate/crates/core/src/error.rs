use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("unsupported function id {0}")]
    UnsupportedFunction(u32),

    #[error("invalid problem id: {0}")]
    InvalidProblem(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("alpha {0} outside [0, 1]")]
    AlphaOutOfRange(f64),

    #[error("non-finite objective value {0}")]
    NonFinite(f64),

    #[error("random stream produced {0} degenerate rotation columns in a row")]
    DegenerateStream(usize),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("empty trace set")]
    EmptyTraces,

    #[error("no AUC entry for cell {0}")]
    MissingCell(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by the user's input rather than the environment.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Io { .. } | Error::Parse { .. })
    }
}
