//! Entangling power and entangling efficiency of probabilistic two-qubit gates.
//!
//! Entangling power is the largest output negativity a gate produces from a
//! product input. Entangling efficiency weights that negativity by the
//! probability that the gate heralds success and maximizes the product, which
//! makes deterministic and post-selected devices directly comparable.
//!
//! Modules:
//! - [`qmath`]: complex matrices, partial transpose, Jacobi eigensolver.
//! - [`fock`]: two-photon beam-splitter simulation with coincidence post-selection.
//! - [`gates`]: the beam-splitter, c-phase and generalized c-phase gates.
//! - [`measures`]: negativity and the two gate measures.
//! - [`choi`]: process matrices, channel application and the text file format.
//! - [`sweep`]: CSV tables over gate or input-state parameters.

pub mod choi;
pub mod error;
pub mod fock;
pub mod gates;
pub mod measures;
pub mod qmath;
pub mod sweep;

pub use error::{Error, Result};
