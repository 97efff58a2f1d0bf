//! Core value types and counting primitives: exact rationals, vertex
//! bitsets, partitions, graphs and 3-graphs, ordered-tuple densities,
//! closeness, and the shared averaging split.

mod counting;
mod graph;
mod rational;
mod set;

pub use counting::{
    averaging_split, delta_close_graphs, delta_close_threegraphs, density2, density3,
};
pub use graph::{k2_product, k3_product, Graph, ThreeGraph};
pub use rational::{Rational, Threshold};
pub use set::{Partition, VertexSet};
