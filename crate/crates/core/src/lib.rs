//! Eigen-surfaces of convex hulls of matrices.
//!
//! The crate tracks eigenvalue paths along matrix paths, reads off the slot
//! permutations they induce, locates the exceptional set where eigenvalues
//! collide, and partitions the sampled eigen-surface into path components.

// `!(x > 0.0)` is how tolerances reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod families;
pub mod io;
pub mod surface;
pub mod linalg;
pub mod pairgraph;
pub mod tolerance;
pub mod track;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use tolerance::ToleranceConfig;
