//! Walk-operator encodings of Pauli-sum Hamiltonians, exact statevector
//! simulation of spectral measurement, and fault-tolerant cost accounting.

pub mod census;
pub mod cli;
pub mod error;
pub mod hamiltonian;
pub mod linalg;
pub mod pauli;
pub mod resources;
pub mod sim;
pub mod spectral;
pub mod walk_binary;
pub mod walk_unary;

pub use error::{Error, Result};
