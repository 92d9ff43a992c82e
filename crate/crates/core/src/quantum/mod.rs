//! Exact spin-1/2 state vectors, XXZ Hamiltonians, propagation and observables.

mod dense;
mod evolve;
mod hamiltonian;
pub mod krylov;
mod state;

use serde::{Deserialize, Serialize};

pub use dense::DenseEigen;
pub use evolve::{apply_driven_pulse, driven_pulse_hamiltonian, evolve, EvolutionConfig, Method, Propagator};
pub use hamiltonian::{build_hamiltonian, Drive, Hamiltonian, XXZCouplings};
pub use state::{
    apply_rotation, initial_product_state, magnetization, phase_contrast_amplitude, rotate_in_place,
    transverse_magnetization, SpinState,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

#[inline]
pub(crate) fn bit(site: usize) -> usize {
    1usize << site
}

/// Inserts a zero bit at position `pos`.
#[inline]
pub(crate) fn insert_zero_bit(x: usize, pos: usize) -> usize {
    let low = x & ((1usize << pos) - 1);
    ((x >> pos) << (pos + 1)) | low
}
