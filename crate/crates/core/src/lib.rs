//! Exact combinatorics toolkit for weak regularity of graphs and 3-uniform
//! hypergraphs: generators for the standard extremal families, exact
//! (rational-arithmetic) regularity and homogeneity checkers with witnesses,
//! VC-type dimension computations, twin reduction, partition-transfer
//! constructions, induced-copy extraction, and exhaustive minimal-partition
//! search.
//!
//! Every density, threshold and verdict is computed in exact rational
//! arithmetic; no floating point enters any decision.

pub mod core;
pub mod dimensions;
pub mod extraction;
pub mod families;
pub mod reduction;
pub mod regularity;
pub mod search;
pub mod transforms;

mod error;

pub use error::{Error, Result};
