//! Vertex cut and flow sparsifiers with Steiner nodes.
//!
//! Every algorithm is generic over a [`Scalar`]; exact rationals are the
//! default capacity type.

pub mod cut_sparsifier;
pub mod error;
pub mod flow;
pub mod flow_sparsifier;
pub mod gen;
pub mod graph;
pub mod scalar;
pub mod sparsifier_io;
pub mod verifier;
pub mod wl;

pub use error::{Error, Result};
pub use graph::{Edge, EdgeId, Graph, VertexId};
pub use scalar::Scalar;

/// Exact rational capacities.
pub type Rational = num_rational::BigRational;
/// Graph with exact rational capacities.
pub type CapGraph = Graph<Rational>;
/// Graph with floating point capacities.
pub type FloatGraph = Graph<f64>;
