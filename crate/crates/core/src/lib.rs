//! Bipolar weighted argumentation: graphs, gradual semantics and
//! executable characteristic checks.

pub mod axioms;
pub mod direct;
pub mod error;
pub mod graph;
pub mod iteration;
pub mod linalg;
pub mod outcome;
pub mod random;
pub mod recursive;
pub mod semantics;
pub mod sigmoid;

pub use direct::{
    fixed_point_residual, propagation_matrix, series_evaluate, solve_evaluate, Damping,
    DampingFactor, DampingPolicy, PropagationMatrix,
};
pub use error::{EvalError, GraphError};
pub use graph::{build_graph, union, ArgGraph, Edge, NeighborSets, Polarity};
pub use outcome::{DegreeVector, EvalOutcome, SemanticsTag};
pub use recursive::{aggregation_based_evaluate, recursive_evaluate, RecursiveKind};
pub use semantics::{catalog, evaluate, Evaluation, SemanticsConfig, WeightRange};
pub use sigmoid::{sigmoid, sigmoid_evaluate, sigmoid_inverse, SigmoidKind, UnitInterval};
