//! Exact computations with tautological classes of degree at most two
//! (cohomological degree four) on moduli spaces of stable pointed curves.

pub mod calculus;
pub mod class;
pub mod error;
pub mod expr;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod marking;
pub mod relations;
pub mod verify;

pub type Q = num_rational::BigRational;

pub use error::{Error, Result};
pub use marking::Marking;
