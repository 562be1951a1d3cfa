//! Entanglement dynamics of independent qubits coupled to local
//! reservoirs.
//!
//! Each qubit evolves under a single-site map `(u, v, z)` produced by one of
//! the environment models in [`env`]. Two-qubit states are evolved by
//! composing the local maps ([`channels`]) and their entanglement is
//! measured by the Wootters concurrence ([`entanglement`]).

pub mod analysis;
pub mod channels;
pub mod density;
pub mod entanglement;
pub mod env;
pub mod error;
pub mod matrix;
pub mod states;
pub mod validate;

pub use channels::{compose_product, two_qubit_evolve, ChoiMatrix, TransferTensor};
pub use density::DensityMatrix;
pub use entanglement::{concurrence_general, concurrence_x, initial_concurrence, r_star, Concurrence};
pub use env::{EnvModel, StrongCouplingParams, ThermalParams, Uvz};
pub use error::{Error, Result};
pub use matrix::{CMatrix, Complex};
pub use states::{make_ewl, EwlSpec, Family, XState};
