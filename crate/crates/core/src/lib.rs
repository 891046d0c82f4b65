//! Exact and Monte Carlo tools for ferromagnetic Ising models with consistent
//! fields, through their weighted random-cluster and subgraph-world
//! representations.

// `!(x > 0.0)` is how validation rejects NaN alongside out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod bits;
pub mod cftp;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod generators;
pub mod graph;
pub mod model;
pub mod params;
pub mod paths;
pub mod report;
pub mod rng;
pub mod weight;

pub use bits::{EdgeSubset, SpinConfig};
pub use error::{Error, Result};
pub use graph::WeightedGraph;
pub use params::{params_from_ising, perturb_sg, ModelParams, SgParams, WrcParams};
pub use rng::RngStream;
pub use weight::LogWeight;
pub use dynamics::{ChainKind, ChainState, Dynamics};
