use thiserror::Error;

use crate::label::Label;

/// Structural problems found while validating a stable tree.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("tree has no vertices")]
    Empty,
    #[error("edge {0} refers to a vertex that does not exist")]
    EdgeOutOfRange(usize),
    #[error("edge {0} is a loop")]
    SelfLoop(usize),
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph contains a cycle")]
    Cycle,
    #[error("marking {0} appears at more than one vertex")]
    DuplicateMarking(Label),
    #[error("vertex {vertex} is unstable: {special} special points")]
    Unstable { vertex: usize, special: usize },
    #[error("special points at vertex {0} are not pairwise distinct")]
    CoincidentSpecialPoints(usize),
    #[error("missing position for a special point at vertex {0}")]
    MissingPosition(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("coincident points where distinct points are required")]
    CoincidentPoints,
    #[error("configuration lies in the big diagonal union of the Delta_i")]
    DegenerateConfiguration,
    #[error("configuration type has fewer than three parts")]
    TooDegenerateType,
    #[error("marking sets overlap outside the gluing label")]
    OverlappingMarkingSets,
    #[error("label sets overlap")]
    OverlappingLabels,
    #[error("label {0} is not present")]
    MissingLabel(Label),
    #[error("too few markings: {0}")]
    TooFewMarkings(usize),
    #[error("invalid partition of the marking set")]
    InvalidPartition,
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("product or substitution is not multilinear in {0}")]
    NotMultilinear(Label),
    #[error("no value assigned to variable {0}")]
    MissingVariable(Label),
    #[error("grades {0} and {1} are not complementary in dimension {2}")]
    GradeMismatch(usize, usize, usize),
    #[error("classes live on different label sets")]
    AmbientMismatch,
    #[error("configuration degenerates modulo {0}")]
    BadReduction(u64),
    #[error("{got} samples is below the required {needed}")]
    InsufficientSamples { got: usize, needed: usize },
    #[error("invalid tree: {0}")]
    InvalidTree(#[from] Violation),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Stable variant name used in machine-readable error reports.
    pub fn name(&self) -> &'static str {
        match self {
            Error::CoincidentPoints => "CoincidentPoints",
            Error::DegenerateConfiguration => "DegenerateConfiguration",
            Error::TooDegenerateType => "TooDegenerateType",
            Error::OverlappingMarkingSets => "OverlappingMarkingSets",
            Error::OverlappingLabels => "OverlappingLabels",
            Error::MissingLabel(_) => "MissingLabel",
            Error::TooFewMarkings(_) => "TooFewMarkings",
            Error::InvalidPartition => "InvalidPartition",
            Error::OutOfRange(_) => "OutOfRange",
            Error::IndexOutOfRange(_) => "IndexOutOfRange",
            Error::NotMultilinear(_) => "NotMultilinear",
            Error::MissingVariable(_) => "MissingVariable",
            Error::GradeMismatch(..) => "GradeMismatch",
            Error::AmbientMismatch => "AmbientMismatch",
            Error::BadReduction(_) => "BadReduction",
            Error::InsufficientSamples { .. } => "InsufficientSamples",
            Error::InvalidTree(_) => "InvalidTree",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
