//! Exact linear algebra over Q: sparse rational matrices, fraction-free
//! integer elimination for rank, kernel and solve, and an incremental
//! echelon form used for normal forms modulo relations.

mod echelon;
mod matrix;

pub use echelon::{Echelon, SparseVec};
pub use matrix::{fraction_free_echelon, IntEchelon, RationalMatrix};
