use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("unknown color `{0}`")]
    UnknownColor(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("invalid surface: {0}")]
    InvalidSurface(String),
    #[error("no compatible surface for the vertex-graph sequence")]
    Incompatible,
    #[error("internal error: two non-isomorphic compatible surfaces ({0})")]
    NonUniqueInternal(String),
    #[error("no graph-cut realizes the split: {0}")]
    NoCut(String),
    #[error("invalid cut: {0}")]
    InvalidCut(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular pairing: {0}")]
    SingularPairing(String),
    #[error("cut class `{0}` is outside the working set")]
    MissingCutClass(String),
    #[error("no unit in B for color `{0}`")]
    NoUnit(String),
    #[error("sequence is not composable: {0}")]
    NotComposable(String),
    #[error("class `{0}` is outside the working set")]
    MissingClass(String),
    #[error("patch mixes colors: {0}")]
    MixedColors(String),
    #[error("unlabeled marked point `{0}`")]
    UnlabeledPoint(String),
    #[error("invalid group tables: {0}")]
    InvalidTables(String),
    #[error("boundary does not match the surface: {0}")]
    MismatchedBoundary(String),
    #[error("bundle verification failed:\n{0}")]
    BundleVerificationFailed(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
