use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("closure exceeds the cap of {cap} elements")]
    ClosureTooLarge { cap: usize },

    #[error("not a permutation: {0}")]
    NotAPermutation(String),

    #[error("point {point} out of range for a set of {n_points} points")]
    PointOutOfRange { point: usize, n_points: usize },

    #[error("element {element} out of range for a group of order {order}")]
    ElementOutOfRange { element: usize, order: usize },

    #[error("not a group: {0}")]
    NotAGroup(String),

    #[error("not a subgroup: {0}")]
    NotASubgroup(String),

    #[error("not a group action: {0}")]
    NotAnAction(String),

    #[error("action is not transitive: orbit of point 0 has {orbit} of {n_points} points")]
    NotTransitive { orbit: usize, n_points: usize },

    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionOverflow { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("not Hermitian (deviation {0:e})")]
    NotHermitian(f64),

    #[error("not an effect (deviation {0:e})")]
    NotAnEffect(f64),

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("vector is not normalised (norm {0})")]
    NotNormalised(f64),

    #[error("not a unitary representation: {0}")]
    NotARepresentation(String),

    #[error("not an observable: {0}")]
    NotAnObservable(String),

    #[error("observable is not covariant (deviation {0:e})")]
    NotCovariant(f64),

    #[error("effect for outcome {0} is zero")]
    ZeroEffect(usize),

    #[error("operator is not invariant under the stabiliser (deviation {0:e})")]
    NotStabiliserInvariant(f64),

    #[error("frame observable must be the canonical PVM on X")]
    NotCanonicalFrame,

    #[error("config error in `{field}`: {message}")]
    Config { field: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
