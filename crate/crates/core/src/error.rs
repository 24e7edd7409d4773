use thiserror::Error;

/// Errors raised by the combinatorial model.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown marking `{0}`")]
    UnknownMark(String),
    #[error("duplicate vertex id `{0}`")]
    DuplicateVertex(String),
    #[error("graph has no vertices")]
    EmptyGraph,
    #[error("graph is disconnected: vertex `{0}` is unreachable from `{1}`")]
    Disconnected(String, String),
    #[error("graph has {0} vertices; at most 64 are supported")]
    TooManyVertices(usize),
    #[error("graph has {0} edges; at most 128 are supported")]
    TooManyEdges(usize),
    #[error("curve is flagged as non-nodal; only ordinary double points are modelled")]
    NonNodal,
    #[error("subcurve {0} is not contained in {1}")]
    NotContained(String, String),
    #[error("subcurve must be non-empty")]
    EmptySubcurve,
    #[error("subcurve {0} must be a non-empty proper subcurve of {1}")]
    NotProper(String, String),
    #[error("subcurves {0} and {1} overlap")]
    Overlapping(String, String),
    #[error("invalid sheaf: {0}")]
    InvalidSheaf(String),
    #[error("sheaf is not invertible")]
    NotInvertible,
    #[error("sheaf is not simple")]
    NotSimple,
    #[error("Euler characteristic {chi} does not match the polarization target {target}")]
    ChiMismatch { chi: i64, target: String },
    #[error("invalid polarization: {0}")]
    InvalidPolarization(String),
    #[error("invalid Seshadri weights: {0}")]
    InvalidWeights(String),
    #[error("sheaf is not semistable (witness {witness} with beta {beta})")]
    NotSemistable { witness: String, beta: String },
    #[error("invalid part system: {0}")]
    InvalidParts(String),
    #[error("no polarization found: {0}")]
    Infeasible(String),
    #[error("reduction exceeded its iteration cap of {0}")]
    IterationCap(usize),
    #[error("internal invariant violated: {0}")]
    InvariantBreach(String),
    #[error("enumeration budget exceeded: {needed} candidates requested, limit is {limit}")]
    BudgetExceeded { needed: u128, limit: u128 },
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("integer overflow")]
    Overflow,
    #[error("{0}")]
    Parse(String),
}

impl Error {
    /// True for failures that indicate a defect rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::IterationCap(_) | Error::InvariantBreach(_) | Error::Infeasible(_) | Error::Overflow
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
