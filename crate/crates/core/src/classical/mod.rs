//! Hamiltonian dynamics and the on-shell action.
//!
//! Trajectories are integrated with leapfrog. Two-point boundary problems are
//! solved by shooting on the launch momentum, which yields the on-shell
//! action `S(q0, t0; q, t)`; tabulating it over `(q, t)` lets the
//! Hamilton-Jacobi equation be checked with finite differences.

mod action;
mod integrate;
mod model;
mod shooting;
mod table;

pub use action::{action_of, energy_series, EnergySeries};
pub use integrate::integrate_hamilton;
pub use model::{PhaseState, Potential, SystemModel, Trajectory};
pub use shooting::{onshell_action, solve_classical_path, ClassicalPath, ShootingOptions};
pub use table::{
    action_gradients_check, hamilton_jacobi_refinement, hamilton_jacobi_residual, linspace, ActionTable,
    GradientReport, HjNode, HjRefinement, HjResidual,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClassicalError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("integration diverged after t = {time}")]
    Diverged { last: Box<PhaseState>, time: f64 },
    #[error("trajectory has {0} state(s); the action needs at least 2")]
    DegenerateTrajectory(usize),
    #[error("no classical path for coordinate {coord}: {reason}")]
    NoClassicalPath { coord: usize, reason: String },
    #[error("action table too sparse ({nq} x {nt}); need at least 3 nodes per axis")]
    InsufficientGrid { nq: usize, nt: usize },
}
