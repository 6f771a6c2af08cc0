//! Entanglement of free fermions hopping on Hamming graphs `H(d, q)`.
//!
//! The crate computes the chopped correlation spectrum of `n` disjoint
//! Hamming subgraphs in closed form, turns it into entanglement entropy,
//! mutual information and tripartite information at arbitrary `d` through
//! log-space arithmetic, evaluates the leading asymptotics, and certifies
//! every closed form against a dense brute-force oracle at small sizes.

pub mod asymptotics;
pub mod error;
pub mod measures;
pub mod model;
pub mod oracle;
pub mod specfun;
pub mod subsystem;

pub use error::{Error, Result};
pub use measures::EntropyResult;
pub use model::{FermiSet, GraphParams, HoppingModel};
pub use specfun::{LogValue, Sign};
pub use subsystem::{SpectrumEntry, SubsystemSpec};
