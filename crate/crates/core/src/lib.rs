//! Graph space: statistical graph models evaluated through the geometry of
//! their microcanonical ensembles.
//!
//! The crate samples ER, configuration-model (CFMD), stochastic-blockmodel
//! (SBM) and Waxman ensembles, computes barycenters and ensemble entropies,
//! estimates the edit distance expected value (EDEV) of a graph against a
//! model, and runs a bootstrapped permutation test of model relevance.

pub mod ensembles;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod graph;
pub mod inference;
pub mod numerics;
pub mod rng;

pub use error::{Error, Result};
pub use rng::RngStream;
