//! Simulation and verification suite for single-step structured quantum
//! search on 1-SAT formulas, including the two-spin NMR realization:
//! operator construction, state evolution, pulse-sequence simulation under
//! explicit sign conventions, and nine-readout state tomography.

pub mod cli;
pub mod error;
pub mod nmr;
pub mod operators;
pub mod sat;
pub mod search;
pub mod state;
pub mod tomography;

pub use error::{Error, Result};
