use crate::cardinal::Cardinal;
use crate::graph::{EdgeId, VertexId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every typed failure the library can report.
///
/// [`Error::name`] gives the stable variant name used by the command-line
/// front end.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("edge class {edge} references unknown vertex {vertex}")]
    DanglingEndpoint { edge: EdgeId, vertex: VertexId },
    #[error("duplicate id {0}")]
    DuplicateId(String),
    #[error("edge class {0} has multiplicity 0")]
    ZeroMultiplicity(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge class {0}")]
    UnknownEdge(EdgeId),

    #[error("graph contains a loop")]
    HasLoops,
    #[error("edge class {0} has infinite multiplicity; the algebra is not finite-dimensional")]
    HasInfiniteMultiplicity(EdgeId),
    #[error("count exceeds the 64-bit range")]
    CountOverflow,

    #[error("condition (i) fails for edge class {0}: endpoints do not map to the image's endpoints")]
    ConditionIViolation(EdgeId),
    #[error("condition (ii) fails for target class {target} at source vertex {vertex}: expected {expected}, found {found}")]
    ConditionIIViolation {
        target: EdgeId,
        vertex: VertexId,
        expected: Cardinal,
        found: Cardinal,
    },
    #[error("improper assignment onto finite class {0}")]
    PropernessViolation(EdgeId),
    #[error("graph mismatch: {0}")]
    GraphMismatch(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("vertex {0} is not regular")]
    NotRegularSubset(VertexId),
    #[error("not a subgraph: {0}")]
    NotASubgraph(String),
    #[error("vertex set is not hereditary: {0} feeds into it from outside")]
    NotHereditary(VertexId),
    #[error("stage {stage}: vertex {vertex} receives no tower edge")]
    RangeNotSurjective { stage: usize, vertex: VertexId },
    #[error("stage {stage}: vertex {vertex} receives infinitely many tower edges")]
    RangeNotProper { stage: usize, vertex: VertexId },

    #[error("limit is not finitely representable: {0}")]
    NotFinitelyRepresentable(String),
    #[error("depth {depth} exceeds the {stages} available maps")]
    DepthExceedsStages { depth: usize, stages: usize },
    #[error("stage {stage}: {source}")]
    AtStage {
        stage: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("invalid Bratteli data: {0}")]
    InvariantViolation(String),
    #[error("stage {stage} is not a disjoint union of lines: {reason}")]
    NotLineShaped { stage: usize, reason: String },
}

impl Error {
    /// Variant name, stripped of payload. Nested stage errors report the
    /// innermost name.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DanglingEndpoint { .. } => "DanglingEndpoint",
            Error::DuplicateId(_) => "DuplicateId",
            Error::ZeroMultiplicity(_) => "ZeroMultiplicity",
            Error::UnknownVertex(_) => "UnknownVertex",
            Error::UnknownEdge(_) => "UnknownEdge",
            Error::HasLoops => "HasLoops",
            Error::HasInfiniteMultiplicity(_) => "HasInfiniteMultiplicity",
            Error::CountOverflow => "CountOverflow",
            Error::ConditionIViolation(_) => "ConditionIViolation",
            Error::ConditionIIViolation { .. } => "ConditionIIViolation",
            Error::PropernessViolation(_) => "PropernessViolation",
            Error::GraphMismatch(_) => "GraphMismatch",
            Error::PreconditionViolation(_) => "PreconditionViolation",
            Error::NotRegularSubset(_) => "NotRegularSubset",
            Error::NotASubgraph(_) => "NotASubgraph",
            Error::NotHereditary(_) => "NotHereditary",
            Error::RangeNotSurjective { .. } => "RangeNotSurjective",
            Error::RangeNotProper { .. } => "RangeNotProper",
            Error::NotFinitelyRepresentable(_) => "NotFinitelyRepresentable",
            Error::DepthExceedsStages { .. } => "DepthExceedsStages",
            Error::AtStage { source, .. } => source.name(),
            Error::InvariantViolation(_) => "InvariantViolation",
            Error::NotLineShaped { .. } => "NotLineShaped",
        }
    }

    pub(crate) fn at_stage(stage: usize) -> impl FnOnce(Error) -> Error {
        move |source| Error::AtStage {
            stage,
            source: Box::new(source),
        }
    }
}
