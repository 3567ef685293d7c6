//! Monte Carlo laboratory for particles accelerated by a periodic
//! stochastic wave field.
//!
//! The crate simulates `dQ = A P dt`, `dP = sin Q ∘ dC + cos Q ∘ dS` for any
//! number of particles sharing one realization of the driving pair
//! `(C, S)`, the rescaled relative dynamics `dX = Y dt`, `dY = sin X dB`,
//! and the deterministic finite-wave model, and checks their limiting
//! statistics with dedicated estimators.
//!
//! See the `examples/` directory for one runnable program per capability.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod ergodic;
pub mod error;
pub mod experiments;
pub mod noise_field;
pub mod path;
pub mod rescaling;
pub mod rng;
pub mod stats;

pub use error::{Error, Result};
