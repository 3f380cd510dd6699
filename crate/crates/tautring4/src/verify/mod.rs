//! Executable checks: relation consistency, block ranks, counting.

pub mod consistency;
pub mod derive;
pub mod m32;
pub mod blocks;
pub mod brute;
pub mod suite;
