//! Control toolkit for the spin-1 ground state of the NV center: SU(3)
//! decomposition, pulse compilation from two-pulse double-quantum primitives,
//! RWA and lab-frame simulation, and state tomography under |0⟩-only readout.

pub mod algebra;
pub mod compiler;
pub mod error;
pub mod io;
pub mod nv;
pub mod random;
pub mod simulator;
pub mod tomography;

pub use error::{Error, Result};
