//! Pebbling on oriented graphs.
//!
//! A pebbling move takes two pebbles off a vertex `v` and puts one on `w`
//! along an oriented edge `(v, w)`. The assignment graph of a starting
//! assignment is the graded DAG of every state reachable by such moves. This
//! crate builds assignment graphs, decides when a graph is isomorphic to the
//! assignment graph of one of its own assignments, and runs exhaustive and
//! randomized checks of the classification results for that property.
//!
//! Core types are generic over the pebble count (any unsigned primitive
//! integer); the aliases below fix it to [`Pebbles`].

pub mod assignment_graph;
pub mod format;
pub mod graph;
pub mod iso;
pub mod pebbling;
pub mod theorems;

pub use assignment_graph::{build, build_with, contains_downward_4_cycle, BuildError, BuildOptions, StateId};
pub use graph::{
    cartesian_product, downward_cycle, oriented_complete_bipartite, oriented_path, Edge,
    GraphError, OrientedGraph, VertexId,
};
pub use iso::{
    canonical_form, digraph_isomorphic, find_induced_undirected_embedding, undirected_isomorphic,
    CanonicalForm, IsoMapping, IsoMode,
};
pub use pebbling::{PebbleCount, PebblingError};

/// Pebble count used by the theorem checkers and the CLI.
pub type Pebbles = u32;

/// Single-byte counts for compact state tables.
pub type CompactPebbles = u8;

pub type Assignment = pebbling::Assignment<Pebbles>;
pub type CompactAssignment = pebbling::Assignment<CompactPebbles>;
pub type AssignmentGraph = assignment_graph::AssignmentGraph<Pebbles>;
pub type AlmostSimple = pebbling::AlmostSimple<Pebbles>;
pub type PathFactor = pebbling::PathFactor<Pebbles>;
pub type Instance = format::Instance<Pebbles>;
