use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("duplicate argument id `{0}`")]
    DuplicateArgument(String),
    #[error("edge endpoint `{0}` is not a declared argument")]
    UnknownEndpoint(String),
    #[error("more than one edge from `{from}` to `{to}`")]
    DuplicateEdge { from: String, to: String },
    #[error("weight of `{0}` is not finite")]
    NonFiniteWeight(String),
    #[error("incidence entry {0} is not -1, 0 or 1")]
    InvalidEntry(i8),
    #[error("index {index} out of range for {len} arguments")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("expected length {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("graphs share argument `{0}`")]
    SharedComponent(String),
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("mapping is not a bijection")]
    NotABijection,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("damping factor must be a finite number >= 1, got {0}")]
    InvalidDamping(f64),
    #[error("damping factor {damping} is too small for indegree bound {required}")]
    DampingTooSmall { damping: f64, required: usize },
    #[error("linear system is numerically singular (residual {residual:e})")]
    SingularSystem { residual: f64 },
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("iteration budget must be at least 1")]
    InvalidIterationBudget,
    #[error("weight {value} of argument {index} lies on the boundary of (0,1)")]
    WeightOnBoundary { index: usize, value: f64 },
    #[error("value {0} is outside the open interval (0,1)")]
    OutOfOpenUnitInterval(f64),
    #[error("weight {value} of argument {index} is outside [0,1]")]
    WeightOutOfClosedUnit { index: usize, value: f64 },
    #[error("graph contains an attack edge into `{0}`")]
    AttackEdgePresent(String),
    #[error("iteration did not reach a fixed point: {0}")]
    NotConverged(String),
}
