//! Discrete topological graphs with edge multiplicities, factor maps between
//! them, the graph constructions that mirror operations on their
//! Cuntz-Krieger algebras, projective systems and their limits, and an
//! identifier for the finite-dimensional case.

pub mod algebra;
pub mod bratteli;
pub mod cardinal;
pub mod constructions;
pub mod dot;
pub mod error;
pub mod factor_map;
pub mod format;
pub mod graph;
pub mod paths;
pub mod projective;

pub use algebra::{dimension, direct_sum, identify_finite_dim, tensor_matrix, AlgebraExpr};
pub use cardinal::Cardinal;
pub use error::{Error, Result};
pub use factor_map::{compose, is_regular, is_vertex_surjective, lift_edge, validate_factor_map, FactorMap};
pub use graph::{classify_vertices, regular_vertices, validate_graph, EdgeClass, EdgeId, GraphSpec, TopGraph, VertexClassification, VertexId};
pub use projective::{
    limit_algebra_report, obstruction_set, staged_obstruction, stationary_limit, thread_approximation, validate_system,
    ProjectiveSystem,
};
pub use bratteli::{bratteli_to_system, recover_bratteli, BratteliData};
