//! Statevector simulation of variational eigensolvers whose input state is a
//! designed superposition of computational-basis states.
//!
//! Qubit 0 is the least-significant bit of a basis index.

pub mod ansatz;
pub mod circuit;
pub mod encoder;
pub mod error;
pub mod ground;
pub mod models;
pub mod pauli;
pub mod rng;
pub mod statevector;
pub mod vqe;

pub use circuit::{count_resources, Angle, Circuit, Gate, GateKind, Resources};
pub use encoder::{BasisSet, Encoder};
pub use error::{Error, Result};
pub use ground::{exact_ground, exact_ground_in_sector, fidelity, GroundTruth};
pub use models::{Boundary, ModelSpec};
pub use pauli::{expectation, Pauli, PauliString, PauliSum};
pub use statevector::Statevector;
