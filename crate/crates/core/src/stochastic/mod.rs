//! Langevin dynamics with additive Gaussian noise.
//!
//! Convention used throughout the crate: the process
//! `dx = -beta(x) dt + eta`, `Var(eta) = 2 D dt`, has the Fokker-Planck
//! generator `d/dx [beta + D d/dx]`. Kramers-Moyal estimates therefore
//! report `a2 = <dx^2> / (2 dt)`, which converges to `D`.

mod ensemble;
mod km;

pub use ensemble::{
    action_ensemble, action_process, langevin_step, simulate_ensemble, simulate_ensemble_with,
    EnsembleSample, QualityReport, Recording,
};
pub use km::{estimate_km_coefficients, estimate_km_with, KmBin, KmCoefficients, KmOptions};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum StochasticError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("Langevin step diverged from x = {from}")]
    Diverged { from: f64 },
    #[error("ensemble has {0} recorded time point(s); need at least lag + 1")]
    TooShort(usize),
}

/// Slow drift `beta(x)` of `dx/dt = -beta(x) + f(t)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DriftField {
    Zero,
    /// `beta = gamma x` (Ornstein-Uhlenbeck).
    Linear { gamma: f64 },
    /// `beta = k x^3`
    Cubic { k: f64 },
    /// `beta = c`; with `c = E` this is the action's drift.
    Constant { value: f64 },
}

impl DriftField {
    pub fn beta(&self, x: f64) -> f64 {
        match *self {
            DriftField::Zero => 0.0,
            DriftField::Linear { gamma } => gamma * x,
            DriftField::Cubic { k } => k * x * x * x,
            DriftField::Constant { value } => value,
        }
    }

    /// An antiderivative of `beta`.
    pub fn antiderivative(&self, x: f64) -> f64 {
        match *self {
            DriftField::Zero => 0.0,
            DriftField::Linear { gamma } => 0.5 * gamma * x * x,
            DriftField::Cubic { k } => 0.25 * k * x.powi(4),
            DriftField::Constant { value } => value * x,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DriftField::Zero => "zero",
            DriftField::Linear { .. } => "linear",
            DriftField::Cubic { .. } => "cubic",
            DriftField::Constant { .. } => "constant",
        }
    }
}

/// Additive white noise of strength `D`, i.e. `<f(t) f(t')> = 2 D delta(t - t')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub diffusion: f64,
    pub seed: u64,
}

impl NoiseSpec {
    pub fn new(diffusion: f64, seed: u64) -> Result<Self, StochasticError> {
        if !(diffusion.is_finite() && diffusion >= 0.0) {
            return Err(StochasticError::InvalidArgument(format!(
                "diffusion must be finite and non-negative, got {diffusion}"
            )));
        }
        Ok(Self { diffusion, seed })
    }
}

/// Parameters of the action process `dS/dt = -E - eps(t)`. The noise is
/// normalised so that the density obeys `dP/dt = d/dS [E + hbar E d/dS] P`,
/// i.e. `<eps(t) eps(t')> = 2 hbar E delta(t - t')`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub energy: f64,
    /// `hbar = 0` is accepted as the noiseless limit.
    pub hbar: f64,
    pub dt: f64,
}

impl PerturbationSpec {
    pub fn new(energy: f64, hbar: f64, dt: f64) -> Result<Self, StochasticError> {
        if !(energy.is_finite() && energy > 0.0) {
            return Err(StochasticError::InvalidArgument(format!("energy must be positive, got {energy}")));
        }
        if !(hbar.is_finite() && hbar >= 0.0) {
            return Err(StochasticError::InvalidArgument(format!("hbar must be non-negative, got {hbar}")));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(StochasticError::InvalidArgument(format!("dt must be positive, got {dt}")));
        }
        Ok(Self { energy, hbar, dt })
    }

    /// Drift field of the action variable.
    pub fn drift(&self) -> DriftField {
        DriftField::Constant { value: self.energy }
    }

    /// Diffusion constant `hbar E` of the action variable.
    pub fn diffusion(&self) -> f64 {
        self.hbar * self.energy
    }
}
