//! Photon blockade in the driven dispersive Jaynes-Cummings model.
//!
//! The crate builds the rotating-frame Hamiltonians on a truncated
//! atom ⊗ field space, solves the Lindblad master equation for its steady
//! state, evaluates the photon-number distribution and `g²(0)`, checks the
//! dispersive approximation against the effective Hamiltonian, and runs the
//! parameter sweeps that produce CSV output.

// `!(x > 0.0)` style guards are used on purpose so NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod lindblad;
pub mod linop;
pub mod model;
pub mod sweep;
pub mod validity;

pub use error::{Error, Result};
