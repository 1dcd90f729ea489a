//! Synchronous r-neighbour bootstrap percolation on q-ary hypercubes.
//!
//! Vertices of `Q_{n,q}` are words in `{0,..,q-1}^n`, adjacent when they differ
//! in exactly one coordinate. The crate provides the simulation engine,
//! subcube algebra, norm-based infection predictions, the extremal
//! percolation-time construction and an exhaustive oracle for small cubes.

pub mod algebra;
pub mod cube;
pub mod engine;
pub mod error;
pub mod extremal;
pub mod norms;
pub mod oracle;
pub mod par;
pub mod set;
pub mod verify;

pub use cube::{Automorphism, CubeShape, Pattern, Symbol, VertexId};
pub use engine::{InfectionRecord, RunSummary, Simulator};
pub use error::{Error, Result};
pub use par::Exec;
pub use set::VertexSet;
