//! Hamiltonian partitioning into exactly solvable fragments and the Trotter
//! error metrics that compare them.

pub mod error;
pub mod fermionic;
pub mod hamiltonian;
pub mod linalg;
pub mod metrics;
pub mod optimize;
pub mod pipeline;
pub mod qubit;
pub mod spectra;

pub use error::{Error, Result};

/// Crate version, recorded in run provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
