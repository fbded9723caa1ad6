//! Classical mechanics under fast noise, end to end.
//!
//! The crate is organised as a chain of numerical experiments:
//!
//! * [`classical`] integrates Hamiltonian systems and tabulates on-shell
//!   actions, checking the Hamilton-Jacobi equation on the table.
//! * [`stochastic`] simulates Langevin ensembles, estimates Kramers-Moyal
//!   coefficients and realises the action as a drifting random variable.
//! * [`fokker_planck`] is a conservative Chang-Cooper solver for the
//!   Fokker-Planck equation with stationary and Green-function tools.
//! * [`path_measure`] samples lattice paths under `exp(-S/hbar)` with
//!   single-site Metropolis and extracts correlators and energy gaps.
//! * [`os_field`] builds the Gaussian free field on a lattice and certifies
//!   reflection positivity of the time-reflected Gram matrix.
//! * [`harness`] wires everything into reproducible experiments with CSV
//!   output and run manifests.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classical;
pub mod fokker_planck;
pub mod harness;
pub mod os_field;
pub mod path_measure;
pub mod rng;
pub mod stats;
pub mod stochastic;
