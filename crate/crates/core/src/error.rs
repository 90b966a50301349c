use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("projective pair has both coordinates zero")]
    ZeroVector,

    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("normal-form coefficients are singular (|alpha*delta - beta*gamma| = {det:e})")]
    SingularCoefficients { det: f64 },

    #[error("degree must be at least 2, got {0}")]
    BadDegree(u32),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("three-point data has a near-coincident pair")]
    DegenerateTriple,

    #[error("map has no finite order below the search cap {max_order}")]
    NotFiniteOrder { max_order: usize },

    #[error("Moebius map does not preserve the critical value pair")]
    ValueSetNotPreserved,

    #[error("lift candidate failed f o phi = mu o f (residual {residual:e})")]
    LiftVerificationFailed { residual: f64 },

    #[error("projection failed verification: {0}")]
    ProjectionVerificationFailed(String),

    #[error("deck group verification failed: {0}")]
    VerificationFailed(String),

    #[error("power map: the group preserving both critical pairs is infinite")]
    PowerMapInput,

    #[error("deck group of order {degree}^{k} exceeds the cap of {cap} elements")]
    GroupTooLarge { degree: u32, k: usize, cap: usize },

    #[error("element set is not a group: {0}")]
    NotAGroup(String),

    #[error("group of order {order} is neither cyclic nor dihedral (element orders {orders:?})")]
    UnrecognizedGroup { order: usize, orders: Vec<usize> },
}
