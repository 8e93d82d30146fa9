//! Sublinear-time maximum matching size estimation.
//!
//! The crate is organised around a hidden ground-truth [`Graph`] that estimators may only
//! observe through the counted [`MatrixOracle`] and [`ListOracle`] adapters. On top of those
//! sit the sampling primitives, the edge-degree bounded subgraph ([`edbs::Edbs`]) and its
//! round loop, the local computation oracles for greedy MIS and layered augmenting-path
//! matchings, and the three end-to-end estimators in [`pipeline`].
//!
//! [`exact`] holds the brute-force ground truth used to check every approximation claim:
//! an exact blossom matching, offline greedy MIS and the offline layered augmenting-path
//! process. It is the only module besides [`graph`] that reads a [`Graph`] directly.
//!
//! The crate is `no_std` and only needs `alloc`.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod edbs;
pub mod exact;
pub mod generate;
pub mod graph;
pub mod local;
mod math;
pub mod oracle;
pub mod pipeline;
pub mod sampling;
pub mod seed;

pub use graph::{Edge, Graph, GraphError, GraphStats, ListOrder, Vertex};
pub use oracle::{ListOracle, MatrixOracle, QueryCounters, QueryError};
pub use seed::{Rng, Seed};
