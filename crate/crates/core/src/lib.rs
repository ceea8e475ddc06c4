//! Machine-learned selection of variable orderings for cylindrical
//! algebraic decomposition.

pub mod cli;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod features;
pub mod heuristics;
pub mod learn;
pub mod metrics;
pub mod polyset;
pub mod projection;

pub use error::{Error, Result};
