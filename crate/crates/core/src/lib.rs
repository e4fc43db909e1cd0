//! Open-system simulation of dissipative excitation and state transfer
//! between detuned, flip-flop coupled qubits that share a lossy cavity mode
//! through a longitudinal (`sigma_z (a + a^dagger)`) coupling.
//!
//! Frequencies in every public parameter are ordinary frequencies; the
//! Hamiltonian and collapse operators multiply them by `2pi`, and times are
//! in the reciprocal unit.

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod linalg;
pub mod model;
pub mod observables;

#[cfg(feature = "cli")]
pub mod cli;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
pub use model::{CavitySystem, ModelParams};
