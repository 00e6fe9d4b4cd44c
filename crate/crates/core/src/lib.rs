//! Error exponents for binary hypothesis testing, the method of types,
//! maximum-entropy Boltzmann distributions and Gaussian binary detection.
//!
//! Information quantities are in bits; the Boltzmann solver works in nats.
//! Every probability that can be computed exactly over types is computed
//! exactly, in log space, rather than sampled.

pub mod boltzmann;
pub mod cli;
pub mod combinatorics;
pub mod detection;
pub mod dist;
pub mod error;
pub mod hypothesis;
pub mod logspace;
pub mod types;

pub use dist::{entropy, kl_divergence, make_distribution, tilted, DiscreteDistribution, TiltedFamily};
pub use error::{Error, Result};
