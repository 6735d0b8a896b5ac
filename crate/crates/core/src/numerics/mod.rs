//! Dense complex linear algebra with no domain semantics.

mod jacobi;
mod linalg;
mod matrix;
pub mod random;
mod tolerance;

pub use linalg::{
    check_projector, cluster_eigenvalues, eigh, null_space, partial_trace, pinv_sqrt,
    polar_unitary, projector_range, support_split, svd, Svd, CLUSTER_GAP,
};
pub(crate) use linalg::{null_space_matrix, qr_r, split_projector};
pub use matrix::{gates, ComplexMatrix, I, ONE, ZERO};
pub use tolerance::{Tolerance, DECISION_EPS};
