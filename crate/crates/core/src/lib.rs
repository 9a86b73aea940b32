//! Witt vectors over truncation posets.
//!
//! The crate provides validated truncation posets and the maps between
//! them, exact coefficient rings, Witt and ghost vectors with the
//! restriction, transfer and norm operations, and the span/bispan calculus
//! (pullbacks, exponential diagrams, normal-form composition).

pub mod arith;
pub mod category;
pub mod io;
pub mod limits;
pub mod maps;
pub mod poset;
pub mod random;
pub mod rings;
pub mod witt;
