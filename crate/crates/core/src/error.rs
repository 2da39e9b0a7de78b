use thiserror::Error;

/// Errors raised by the workbench. Cross-check failures are kept separate
/// from input errors so front ends can tell a broken invariant from bad data.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("negative weight on point `{0}`")]
    NegativeWeight(String),
    #[error("point `{0}` is not covered by any atom")]
    PartitionGap(String),
    #[error("point `{0}` appears in more than one atom")]
    PartitionOverlap(String),
    #[error("duplicate point `{0}`")]
    DuplicatePoint(String),
    #[error("duplicate atom `{0}`")]
    DuplicateAtom(String),
    #[error("atom `{0}` is empty")]
    EmptyAtom(String),
    #[error("unknown point `{0}`")]
    UnknownPoint(String),
    #[error("sets or densities belong to different spaces")]
    SpaceMismatch,
    #[error("map is not measurable: preimage of atom `{0}` is not a union of atoms")]
    NotMeasurable(String),
    #[error("map is not null-preserving: null atom `{0}` has a preimage of positive measure")]
    NotNullPreserving(String),
    #[error("map length {found} does not match the {expected} points of the domain")]
    MapArity { expected: usize, found: usize },
    #[error("map is not an endomap")]
    NotEndomap,
    #[error("candidate table has {found} entries, expected {expected}")]
    TableIncomplete { expected: usize, found: usize },
    #[error("{atoms} atoms exceeds the limit of {limit}")]
    TooManyAtoms { atoms: usize, limit: usize },
    #[error("system is not nonsingular")]
    NotNonsingular,
    #[error("total measure is not 1")]
    NotNormalized,
    #[error("epsilon must lie strictly between 0 and 1")]
    InvalidEpsilon,
    #[error("set is not a tail set")]
    NotATailSet,
    #[error("set is not forward invariant")]
    NotForwardInvariant,
    #[error("measure is not invariant at atom `{0}`")]
    NotInvariant(String),
    #[error("measure is not absolutely continuous: null atom `{0}` carries mass")]
    NotAbsolutelyContinuous(String),
    #[error("measure does not have total mass 1")]
    NotProbability,
    #[error("invalid Markov model: {0}")]
    InvalidModel(String),
    #[error("cylinder depth must be at least 2")]
    DepthTooSmall,
    #[error("initial distribution is not stationary")]
    NotStationary,
    #[error("transition matrix is not irreducible")]
    NotIrreducible,
    #[error("enumeration space of 2^{bits} exceeds 2^{limit}")]
    TooLarge { bits: usize, limit: usize },
    #[error("cross-check failed: {0}")]
    CrossCheck(String),
}

pub type Result<T> = std::result::Result<T, Error>;
