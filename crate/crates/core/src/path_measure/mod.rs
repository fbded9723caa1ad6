//! Euclidean path sampling on a periodic time lattice.
//!
//! Paths `q_0 .. q_{N-1}` carry the weight `exp(-S/hbar)` with
//!
//! ```text
//! S = sum_i  m (q_{i+1} - q_i)^2 / (2a) + a V(q_i) + offset,   q_N = q_0
//! ```
//!
//! sampled by single-site random-walk Metropolis. Observables are streamed
//! into block accumulators so long chains need no path storage.

mod exact;
mod observables;
mod sampler;
mod scan;

pub use exact::{harmonic_lattice_correlator, harmonic_lattice_gap, harmonic_lattice_q2};
pub use observables::{energy_gap, two_point, Correlator, GapEstimate, GapOptions};
pub use sampler::{
    metropolis_sample, metropolis_sample_chains, single_site_update, ChainSummary, MetropolisConfig,
    ObservableBlock, PathEnsemble, UpdateRecord,
};
pub use scan::{classical_limit_scan, ScanEntry, ScanReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum PathError {
    #[error("invalid action spec: {0}")]
    InvalidSpec(String),
    #[error("invalid sampler config: {0}")]
    InvalidConfig(String),
    #[error("invalid lattice path: {0}")]
    InvalidPath(String),
    #[error("spacing mismatch: spec has a = {spec}, path has a = {path}")]
    SpacingMismatch { spec: f64, path: f64 },
    #[error("action is not finite")]
    NonFinite,
    #[error("no effective-mass plateau (chi2/dof = {chi2_dof:.3}): {diagnostics}")]
    NoPlateau { chi2_dof: f64, diagnostics: String },
    #[error("property violated: {0}")]
    PropertyViolation(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PathPotential {
    /// `V = m omega^2 q^2 / 2`
    Harmonic { omega: f64 },
    /// `V = m omega^2 q^2 / 2 + lambda q^4`
    Quartic { omega: f64, lambda: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscreteActionSpec {
    pub mass: f64,
    pub potential: PathPotential,
    pub hbar: f64,
    pub spacing: f64,
    /// Constant added to `S`; cancels from every observable.
    pub offset: f64,
}

impl DiscreteActionSpec {
    pub fn new(mass: f64, potential: PathPotential, hbar: f64, spacing: f64) -> Result<Self, PathError> {
        let spec = Self {
            mass,
            potential,
            hbar,
            spacing,
            offset: 0.0,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn harmonic(mass: f64, omega: f64, hbar: f64, spacing: f64) -> Result<Self, PathError> {
        Self::new(mass, PathPotential::Harmonic { omega }, hbar, spacing)
    }

    pub fn quartic(mass: f64, omega: f64, lambda: f64, hbar: f64, spacing: f64) -> Result<Self, PathError> {
        Self::new(mass, PathPotential::Quartic { omega, lambda }, hbar, spacing)
    }

    pub fn with_offset(mut self, offset: f64) -> Self {
        self.offset = offset;
        self
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self, PathError> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), PathError> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(PathError::InvalidSpec(format!("{name} must be positive, got {v}")))
            }
        };
        positive("mass", self.mass)?;
        positive("hbar", self.hbar)?;
        positive("spacing", self.spacing)?;
        let (omega, lambda) = match self.potential {
            PathPotential::Harmonic { omega } => (omega, 0.0),
            PathPotential::Quartic { omega, lambda } => (omega, lambda),
        };
        if !(omega.is_finite() && omega >= 0.0) {
            return Err(PathError::InvalidSpec(format!("omega must be >= 0, got {omega}")));
        }
        if !(lambda.is_finite() && lambda >= 0.0) {
            return Err(PathError::InvalidSpec(format!("lambda must be >= 0, got {lambda}")));
        }
        if omega == 0.0 && lambda == 0.0 {
            return Err(PathError::InvalidSpec("potential does not confine".into()));
        }
        if !self.offset.is_finite() {
            return Err(PathError::InvalidSpec("offset must be finite".into()));
        }
        Ok(())
    }

    pub fn potential(&self, q: f64) -> f64 {
        match self.potential {
            PathPotential::Harmonic { omega } => 0.5 * self.mass * omega * omega * q * q,
            PathPotential::Quartic { omega, lambda } => {
                let q2 = q * q;
                0.5 * self.mass * omega * omega * q2 + lambda * q2 * q2
            }
        }
    }

    /// Change of `S` when site value `old` becomes `new` between neighbours
    /// `left` and `right`.
    pub fn local_delta(&self, left: f64, right: f64, old: f64, new: f64) -> f64 {
        let k = self.mass / (2.0 * self.spacing);
        let kinetic = (new - left).powi(2) + (right - new).powi(2) - (old - left).powi(2) - (right - old).powi(2);
        k * kinetic + self.spacing * (self.potential(new) - self.potential(old))
    }
}

/// Periodic lattice path.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticePath {
    pub values: Vec<f64>,
    pub spacing: f64,
}

/// Smallest accepted lattice; four slices already admit exact quadrature
/// checks.
pub const MIN_SLICES: usize = 4;

impl LatticePath {
    pub fn new(values: Vec<f64>, spacing: f64) -> Result<Self, PathError> {
        if values.len() < MIN_SLICES {
            return Err(PathError::InvalidPath(format!(
                "need at least {MIN_SLICES} slices, got {}",
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(PathError::InvalidPath("values must be finite".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(PathError::InvalidPath(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self { values, spacing })
    }

    pub fn constant(n: usize, value: f64, spacing: f64) -> Result<Self, PathError> {
        Self::new(vec![value; n], spacing)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Euclidean lattice action of `path`.
pub fn discrete_action(spec: &DiscreteActionSpec, path: &LatticePath) -> Result<f64, PathError> {
    if spec.spacing != path.spacing {
        return Err(PathError::SpacingMismatch {
            spec: spec.spacing,
            path: path.spacing,
        });
    }
    let s = action_of_values(spec, &path.values);
    if s.is_finite() {
        Ok(s)
    } else {
        Err(PathError::NonFinite)
    }
}

pub(crate) fn action_of_values(spec: &DiscreteActionSpec, q: &[f64]) -> f64 {
    let n = q.len();
    let a = spec.spacing;
    let mut s = spec.offset;
    for i in 0..n {
        let next = q[(i + 1) % n];
        s += spec.mass * (next - q[i]).powi(2) / (2.0 * a) + a * spec.potential(q[i]);
    }
    s
}
