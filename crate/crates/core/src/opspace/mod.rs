//! Operator subspaces and finite-dimensional *-algebras.

mod algebra;
mod space;
mod structure;

pub(crate) use algebra::commutative;
pub use algebra::{block_algebra, commutant, generate_algebra, StarAlgebra};
pub use space::{intersect, orthonormalize, Containment, OperatorSpace};
pub use structure::{structure_decomposition, Block, BlockStructure, STRUCTURE_EPS};
