//! Young-age preferential attachment (YAPA) random DAGs.
//!
//! Vertex `n` arrives and references each earlier vertex `m` independently
//! with probability `min((α/(n−1))·(m/(n−1))^β, 1)`. The crate grows such
//! graphs, measures their degrees, components and genesis paths, and
//! evaluates the matching limit laws.

pub mod cli;
pub mod connectivity;
pub mod degree;
pub mod error;
pub mod generator;
pub mod io;
pub mod model;
pub mod paths;
pub mod theory;

pub use error::{Error, Result};
pub use generator::{generate, generate_accelerated, Dag, GeneratorKind, InitialCondition};
pub use model::{child_seed, rng_from_seed, Params, SimRng, VertexId};
