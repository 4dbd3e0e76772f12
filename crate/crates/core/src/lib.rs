//! Monte Carlo simulation of asymmetric stabilizer codes under biased unital
//! noise, with in-situ Bayesian channel estimation and codespace realignment.
//!
//! The crate is organized bottom-up:
//!
//! - [`geom3`]: 3×3 rotations, symmetric eigendecomposition, Haar sampling.
//! - [`channel`]: oriented Pauli and single-angle dephasing channels, twirled
//!   rates and the optimal counter-rotation.
//! - [`codes`]: asymmetric code parameters and uncorrectable-error rates.
//! - [`angle_estimator`]: discretized posterior over a dephasing angle.
//! - [`grid_estimator`]: randomized grid posterior over Bloch matrices.
//! - [`simulation`]: per-trial engines and the seeded ensemble runner.
//! - [`analysis`]: lifetime statistics, fits and closed-form evaluators.

pub mod analysis;
pub mod angle_estimator;
pub mod channel;
pub mod codes;
mod error;
pub mod geom3;
pub mod grid_estimator;
pub mod seed;
pub mod simulation;

pub use error::{Error, Result};
