//! Exact combinatorics of tropical curves, their Jacobians and the Torelli
//! maps: weighted graphs, cycle matroids, quadratic forms, Delaunay
//! decompositions, moduli stratifications and stable-curve shadows.
//!
//! Every decision procedure runs on exact integers and rationals.

pub mod canon;
pub mod checks;
pub mod delaunay;
pub mod doc;
pub mod connectivity;
pub mod error;
pub mod forms;
pub mod graph;
pub mod lattice;
pub mod matrix;
pub mod moduli;
pub mod named;
pub mod polytope;
pub mod rational;
pub mod stable;
pub mod tropical;

pub use error::{Error, Limits, Result};
pub use graph::{enumerate_stable_weighted_graphs, enumerate_stable_weighted_graphs_with, Edge, GraphMorphism, Vertex, WeightedGraph};
pub use rational::Rational;
