use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },
    #[error("points {first} and {second} coincide")]
    DuplicatePoints { first: usize, second: usize },
    #[error("need at least {needed} points, got {got}")]
    TooFewPoints { needed: usize, got: usize },
    #[error("all points are collinear")]
    AllCollinear,
    #[error("ids length {ids} does not match {points} points")]
    IdsLengthMismatch { ids: usize, points: usize },
    #[error("simplex index {index} out of range ({len} simplices)")]
    SimplexOutOfRange { index: usize, len: usize },
    #[error("diagram has no 1-dimensional pair")]
    NoCycle,
    #[error("pair {index} is not a finite 1-dimensional pair")]
    InvalidPair { index: usize },
    #[error("representative chain is not a single closed loop")]
    NotALoop,
    #[error("all points coincide with their mean")]
    DegenerateCloud,
    #[error("invalid loss specification: {0}")]
    InvalidSpec(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("data matrix has fewer than two nonzero singular values")]
    RankDeficient,
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("node index {node} out of range ({nodes} nodes)")]
    NodeOutOfRange { node: usize, nodes: usize },
    #[error("non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("every label needs at least two points and there must be two labels")]
    SingleLabel,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    /// Stable identifier used by the command-line tool.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::NonFiniteCoordinate { .. } => "NonFiniteCoordinate",
            Error::DuplicatePoints { .. } => "DuplicatePoints",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::AllCollinear => "AllCollinear",
            Error::IdsLengthMismatch { .. } => "IdsLengthMismatch",
            Error::SimplexOutOfRange { .. } => "SimplexOutOfRange",
            Error::NoCycle => "NoCycle",
            Error::InvalidPair { .. } => "InvalidPair",
            Error::NotALoop => "NotALoop",
            Error::DegenerateCloud => "DegenerateCloud",
            Error::InvalidSpec(_) => "InvalidSpec",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::RankDeficient => "RankDeficient",
            Error::EmptyGraph => "EmptyGraph",
            Error::NodeOutOfRange { .. } => "NodeOutOfRange",
            Error::NonFiniteLoss { .. } => "NonFiniteLoss",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::SingleLabel => "SingleLabel",
            Error::InvalidConfig(_) => "InvalidConfig",
        }
    }
}
