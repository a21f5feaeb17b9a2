//! Pauli-spectral diagnostics for quantum operators and circuits.

pub mod coherence;
pub mod eigen;
pub mod error;
pub mod gates;
pub mod gaussian;
pub mod harness;
pub mod io;
pub mod magic;
pub mod otoc;
pub mod random;
pub mod search;
pub mod sensitivity;
pub mod spectrum;
pub mod tensor;
pub mod wigner;

pub use error::{Error, Result};
pub use tensor::{Operator, PauliIndex, SubsetMask, C64};
