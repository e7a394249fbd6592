//! Mean-field type-dependent stochastic Ising model (TDSIM) on a cyclic
//! feedback loop.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the loop parameterisation, flip rates, macroscopic jump
//!   rates, the limiting vector field and its Jacobian.
//! * [`micro`] works at the spin level on tiny systems (Hamiltonian, Gibbs
//!   measure, exact generator, per-site simulation).
//! * [`jump`] simulates the density-profile jump process exactly.
//! * [`ode`] integrates the fluid limit and small linear systems.
//! * [`analysis`] covers spectra, fixed-point branches, bifurcation scans,
//!   the rotated linearisation and the finite-N convergence experiment.

pub mod analysis;
pub mod error;
pub mod jump;
pub mod micro;
pub mod model;
pub mod ode;
pub mod rng;
pub mod trajectory;

pub use error::{Error, Result};
pub use model::{DensityState, Grid, JumpDirection, LoopSpec};
pub use trajectory::{Trajectory, TrajectoryKind};
