//! Structural analysis, supervised link prediction and network-destruction
//! simulation for large undirected graphs.

pub mod attack;
pub mod config;
pub mod correlation;
pub mod corruption;
pub mod dataset;
pub mod error;
pub mod eval;
pub mod gbm;
pub mod graph;
pub mod metrics;
pub mod rng;

pub use error::{Error, Result};
