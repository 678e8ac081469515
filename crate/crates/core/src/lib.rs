//! Simulation of open quantum system dynamics on small qubit registers:
//! analytic channel families, their circuit decompositions, noisy
//! execution with readout mitigation and tomography, and the
//! non-Markovianity diagnostics built on top.

pub mod analysis;
pub mod channels;
pub mod circuit;
pub mod cli;
pub mod decomp;
pub mod error;
pub mod qstate;
pub mod tomomit;

pub use error::{Error, Result};
