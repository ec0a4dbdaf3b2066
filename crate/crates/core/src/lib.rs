pub mod clifford;
pub mod dirac;
pub mod error;
pub mod lattice;
pub mod linalg;
pub mod pauli;
pub mod rng;
pub mod suite;
pub mod symmetry;
pub mod tensor;

pub use error::{Error, Result};
