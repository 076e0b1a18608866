//! Low-regularity exponential integrators derived from decorated trees.
//!
//! The pipeline enumerates the trees of a Duhamel expansion, extracts dominant
//! frequencies, builds a symbolic scheme per tree and evaluates it on a
//! spectral grid.

pub mod cli_experiments;
pub mod error;
pub mod integrators;
pub mod operator_algebra;
pub mod scheme_engine;
pub mod spectral_backend;
pub mod tree_core;

pub use error::{Error, Result};
