use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by the library. `code()` gives a stable identifier.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("malformed input: {0}")]
    MalformedInput(String),
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph is not chordal; chordless cycle {cycle:?}")]
    NotChordal { cycle: Vec<usize> },
    #[error("{k} cliques exceeds the enumeration limit of {limit}")]
    TooManyCliques { k: usize, limit: usize },
    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),
    #[error("index mismatch: {0}")]
    IndexMismatch(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("operands live on different graphs")]
    GraphMismatch,
    #[error("matrix is not in Q_G: {0}")]
    NotInQG(String),
    #[error("matrix is not in P_G")]
    NotInPG,
    #[error("singular block: {0}")]
    SingularBlock(String),
    #[error("shape does not match the decomposition: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("argument out of domain: {0}")]
    OutOfDomain(String),
    #[error("graph is not homogeneous")]
    HasseRequired,
    #[error("shape is not admissible: {0}")]
    ShapeNotAdmissible(String),
    #[error("point is outside the support: {0}")]
    OutOfSupport(String),
    #[error("posterior shape is not admissible: {0}")]
    PosteriorShapeInadmissible(String),
    #[error("column mismatch: expected {expected} columns, row {row} has {got}")]
    ColumnMismatch { row: usize, expected: usize, got: usize },
    #[error("non-numeric value at row {row}, column {col}")]
    NonNumeric { row: usize, col: usize },
    #[error("the A4 closed forms need the path graph on four vertices")]
    WrongGraph,
    #[error("shape is outside the convergence region of the A4 closed form")]
    ShapeOutsideA4B4,
    #[error("series did not converge within {terms} terms")]
    NonConvergent { terms: usize },
    #[error("c is a non-positive integer")]
    PoleAtC,
    #[error("importance weights are degenerate: {0}")]
    DegenerateWeights(String),
}

impl Error {
    pub fn code(&self) -> &'static str {
        match self {
            Error::MalformedInput(_) => "MalformedInput",
            Error::NotConnected => "NotConnected",
            Error::NotChordal { .. } => "NotChordal",
            Error::TooManyCliques { .. } => "TooManyCliques",
            Error::InternalInconsistency(_) => "InternalInconsistency",
            Error::IndexMismatch(_) => "IndexMismatch",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::GraphMismatch => "GraphMismatch",
            Error::NotInQG(_) => "NotInQG",
            Error::NotInPG => "NotInPG",
            Error::SingularBlock(_) => "SingularBlock",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::NotPositiveDefinite => "NotPositiveDefinite",
            Error::OutOfDomain(_) => "OutOfDomain",
            Error::HasseRequired => "HasseRequired",
            Error::ShapeNotAdmissible(_) => "ShapeNotAdmissible",
            Error::OutOfSupport(_) => "OutOfSupport",
            Error::PosteriorShapeInadmissible(_) => "PosteriorShapeInadmissible",
            Error::ColumnMismatch { .. } => "ColumnMismatch",
            Error::NonNumeric { .. } => "NonNumeric",
            Error::WrongGraph => "WrongGraph",
            Error::ShapeOutsideA4B4 => "ShapeOutsideA4B4",
            Error::NonConvergent { .. } => "NonConvergent",
            Error::PoleAtC => "PoleAtC",
            Error::DegenerateWeights(_) => "DegenerateWeights",
        }
    }
}

pub type Result<T> = core::result::Result<T, Error>;
