//! Quantum circuit Born machines informed by Markov networks.
//!
//! The crate covers the classical side (graphs, factor models, benchmark
//! distributions, Gibbs sampling), the circuit side (Ising Hamiltonians built
//! from cliques, QCIBM / QCMRF / BBQC ansatz builders, an exact statevector
//! simulator with gradients) and the training and experiment harness on top.
//!
//! Conventions used throughout:
//! - basis index bit `q` holds qubit / variable `q` (qubit 0 is the least
//!   significant bit);
//! - factor and conditional tables are indexed with the *first* scope node as
//!   the most significant bit.

pub mod ansatz;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod graph;
pub mod hamiltonian;
pub mod pgm;
pub mod seed;
pub mod simulator;
pub mod training;

pub use error::{Error, Result};

/// Largest variable / qubit count handled by exact enumeration.
pub const MAX_EXACT_QUBITS: usize = 24;
