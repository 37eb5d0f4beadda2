//! Semantic-visual graph embedding for freely annotated action videos.
//!
//! Training videos become nodes of a graph whose edges join semantically
//! related annotations and visually confusable but semantically distinct
//! videos. An unlabelled query is attached to its nearest nodes and a
//! fixed-length Markov walk over the graph yields a distribution over
//! semantic classes.
//!
//! The crate is organised bottom-up:
//!
//! * [`dataset`] reads manifests and descriptor files and makes
//!   leave-one-person-out splits.
//! * [`semantics`] holds the verb-meaning taxonomy and the relation modes.
//! * [`encoding`] turns descriptor sets into Bag-of-Words or Fisher vectors.
//! * [`svg`] builds the semantic-visual graph and its transition matrix.
//! * [`inference`] embeds queries and runs the walk.
//! * [`baselines`] provides K-NN and a class-weighted linear classifier.
//! * [`evaluation`] runs cross-validation, sweeps and synthetic data.

pub mod baselines;
pub mod config;
pub mod dataset;
pub mod encoding;
mod error;
pub mod evaluation;
pub mod inference;
pub mod semantics;
pub mod svg;
mod textio;

pub use error::{Error, Result};
pub use textio::write_atomic;
