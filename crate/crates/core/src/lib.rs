//! Hierarchical clustering of well-clustered graphs in nearly-linear time.
//!
//! The crate builds binary hierarchical-clustering trees scored by
//! Dasgupta's cost. The two main entry points are
//! [`algorithms::spec_wrsc`] (spectral clustering, degree bucketing and
//! recursive weighted sparsest cut on the contracted bucket graph) and
//! [`algorithms::spec_caterpillar`] (max-volume bucketing followed by a
//! size-ordered caterpillar merge). Around them sit an exact cost engine,
//! exhaustive oracles for small graphs, an average-linkage baseline, random
//! graph generators, and a benchmark harness.

pub mod algorithms;
pub mod bench;
pub mod error;
pub mod graph;
pub mod io;
pub mod oracle;
pub mod spectral;
pub mod bucketing;
pub mod generators;
pub mod wrsc;
pub mod tree;
pub mod verify;

pub use error::{Error, Result};
