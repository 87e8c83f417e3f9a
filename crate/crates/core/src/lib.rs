//! Mean-field model of a polariton Josephson junction with one pumped pillar.
//!
//! Units: energies and rates in meV, `hbar = 1`, times in `hbar/meV`.

// Negated comparisons reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod emission;
pub mod error;
pub mod integrate;
pub mod model;
pub mod reduced;
pub mod roots;
pub mod signal;
pub mod spectrum;
pub mod stability;
pub mod stationary;
pub mod verify;

pub use error::{Error, Result};
pub use model::{FullState, ModelParams, ReducedState};
