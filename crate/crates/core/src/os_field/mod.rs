//! Gaussian free field on a Euclidean lattice and its reflection-positivity
//! structure.
//!
//! The lattice has `T` time sites `t = 1 - T/2 ..= T/2` with Dirichlet ends
//! and an optional periodic space axis of `L` sites. The reflection plane
//! sits on the link between `t = 0` and `t = 1`, so `Theta: t -> 1 - t` and
//! "positive time" means `t >= 1`.

mod covariance;
mod gram;
mod wick;

pub use covariance::CovarianceOp;
pub use gram::{
    gram_matrix, inner_product, translation_covariance_check, FieldStateExpr, GramMatrix, Shift, ShiftResult,
    TranslationReport, POSITIVITY_TOLERANCE,
};
pub use wick::{wick_continue, EuclideanSeries, WickContinuation, WickOptions};

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum OsError {
    #[error("invalid lattice: {0}")]
    InvalidLattice(String),
    #[error("lattice mismatch")]
    LatticeMismatch,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("covariance is ill-conditioned: {0}")]
    IllConditioned(String),
    #[error("function {index} has support at t = {time} <= 0")]
    PositivityDomain { index: usize, time: i64 },
    #[error("time shift {shift} would leave the positive half-lattice")]
    SemigroupViolation { shift: i64 },
    #[error("shift moves support off the lattice: {0}")]
    Domain(String),
    #[error("single-exponential model rejected (chi2/dof = {chi2_dof:.3e})")]
    ContinuationAmbiguous { chi2_dof: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub time_sites: usize,
    /// `1` for a time-only lattice.
    pub space_sites: usize,
    pub spacing: f64,
}

impl Lattice {
    pub fn new(time_sites: usize, space_sites: usize, spacing: f64) -> Result<Self, OsError> {
        if time_sites < 4 || !time_sites.is_multiple_of(2) {
            return Err(OsError::InvalidLattice(format!(
                "time extent must be even and >= 4, got {time_sites}"
            )));
        }
        if space_sites == 0 {
            return Err(OsError::InvalidLattice("space extent must be >= 1".into()));
        }
        if !(spacing.is_finite() && spacing > 0.0) {
            return Err(OsError::InvalidLattice(format!("spacing must be positive, got {spacing}")));
        }
        Ok(Self {
            time_sites,
            space_sites,
            spacing,
        })
    }

    pub fn time_only(time_sites: usize, spacing: f64) -> Result<Self, OsError> {
        Self::new(time_sites, 1, spacing)
    }

    /// Spacetime dimension.
    pub fn dim(&self) -> i32 {
        if self.space_sites > 1 {
            2
        } else {
            1
        }
    }

    pub fn volume_element(&self) -> f64 {
        self.spacing.powi(self.dim())
    }

    pub fn n_sites(&self) -> usize {
        self.time_sites * self.space_sites
    }

    pub fn t_min(&self) -> i64 {
        1 - (self.time_sites / 2) as i64
    }

    pub fn t_max(&self) -> i64 {
        (self.time_sites / 2) as i64
    }

    /// Flat index of site `(t, x)`.
    pub fn index(&self, t: i64, x: usize) -> Option<usize> {
        if t < self.t_min() || t > self.t_max() || x >= self.space_sites {
            return None;
        }
        Some((t - self.t_min()) as usize * self.space_sites + x)
    }

    /// `(t, x)` of a flat index.
    pub fn site(&self, i: usize) -> (i64, usize) {
        (
            (i / self.space_sites) as i64 + self.t_min(),
            i % self.space_sites,
        )
    }
}

/// Real, finitely supported function on a [`Lattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct TestFunction {
    pub lattice: Lattice,
    pub values: Vec<f64>,
}

impl TestFunction {
    pub fn zeros(lattice: Lattice) -> Self {
        Self {
            lattice,
            values: vec![0.0; lattice.n_sites()],
        }
    }

    pub fn new(lattice: Lattice, values: Vec<f64>) -> Result<Self, OsError> {
        if values.len() != lattice.n_sites() {
            return Err(OsError::InvalidArgument(format!(
                "{} values for {} sites",
                values.len(),
                lattice.n_sites()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(OsError::InvalidArgument("test function values must be finite".into()));
        }
        Ok(Self { lattice, values })
    }

    /// `value` at site `(t, x)`, zero elsewhere.
    pub fn spike(lattice: Lattice, t: i64, x: usize, value: f64) -> Result<Self, OsError> {
        let i = lattice
            .index(t, x)
            .ok_or_else(|| OsError::Domain(format!("site ({t}, {x}) is off the lattice")))?;
        let mut f = Self::zeros(lattice);
        f.values[i] = value;
        Ok(f)
    }

    /// Earliest time carrying a nonzero value.
    pub fn min_time(&self) -> Option<i64> {
        self.values
            .iter()
            .position(|v| *v != 0.0)
            .map(|i| self.lattice.site(i).0)
    }

    pub fn max_time(&self) -> Option<i64> {
        self.values
            .iter()
            .rposition(|v| *v != 0.0)
            .map(|i| self.lattice.site(i).0)
    }

    /// `alpha * self + other`
    pub fn axpy(&self, alpha: f64, other: &TestFunction) -> Result<TestFunction, OsError> {
        if self.lattice != other.lattice {
            return Err(OsError::LatticeMismatch);
        }
        Ok(TestFunction {
            lattice: self.lattice,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| alpha * a + b)
                .collect(),
        })
    }

    /// Translation by `dt` in time and `dx` (periodic) in space.
    pub fn shifted(&self, dt: i64, dx: i64) -> Result<TestFunction, OsError> {
        let lat = self.lattice;
        let l = lat.space_sites as i64;
        let mut out = TestFunction::zeros(lat);
        for (i, &v) in self.values.iter().enumerate() {
            if v == 0.0 {
                continue;
            }
            let (t, x) = lat.site(i);
            let x2 = (x as i64 + dx).rem_euclid(l) as usize;
            let j = lat
                .index(t + dt, x2)
                .ok_or_else(|| OsError::Domain(format!("time {} is off the lattice", t + dt)))?;
            out.values[j] = v;
        }
        Ok(out)
    }

    /// Random function supported on `t in 1..=max_time` with standard
    /// normal values on a fraction `density` of those sites (at least one).
    pub fn random_positive<R: Rng + ?Sized>(
        lattice: Lattice,
        max_time: i64,
        density: f64,
        rng: &mut R,
    ) -> Result<TestFunction, OsError> {
        let max_time = max_time.min(lattice.t_max());
        if max_time < 1 {
            return Err(OsError::InvalidArgument("no positive-time sites available".into()));
        }
        let mut f = TestFunction::zeros(lattice);
        let sites: Vec<usize> = (1..=max_time)
            .flat_map(|t| (0..lattice.space_sites).map(move |x| (t, x)))
            .filter_map(|(t, x)| lattice.index(t, x))
            .collect();
        for &i in &sites {
            if rng.random::<f64>() < density {
                f.values[i] = rng.sample(StandardNormal);
            }
        }
        if f.values.iter().all(|v| *v == 0.0) {
            let i = sites[rng.random_range(0..sites.len())];
            f.values[i] = rng.sample::<f64, _>(StandardNormal);
        }
        Ok(f)
    }
}

/// Field configuration on a [`Lattice`].
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeField {
    pub lattice: Lattice,
    pub values: Vec<f64>,
}

/// `phi(f) = sum_x f(x) phi(x) a^d`.
pub fn pair(field: &LatticeField, f: &TestFunction) -> Result<f64, OsError> {
    if field.lattice != f.lattice {
        return Err(OsError::LatticeMismatch);
    }
    Ok(field.values.iter().zip(&f.values).map(|(p, g)| p * g).sum::<f64>() * f.lattice.volume_element())
}

/// `(Theta f)(t, x) = f(1 - t, x)`.
pub fn time_reflect(f: &TestFunction) -> TestFunction {
    let lat = f.lattice;
    let mut out = TestFunction::zeros(lat);
    for (i, &v) in f.values.iter().enumerate() {
        let (t, x) = lat.site(i);
        // The map is a bijection of {1 - T/2, ..., T/2}.
        let j = lat.index(1 - t, x).expect("reflection stays on the lattice");
        out.values[j] = v;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn site_indexing_round_trips() {
        let lat = Lattice::new(8, 3, 0.5).unwrap();
        assert_eq!(lat.t_min(), -3);
        assert_eq!(lat.t_max(), 4);
        for i in 0..lat.n_sites() {
            let (t, x) = lat.site(i);
            assert_eq!(lat.index(t, x), Some(i));
        }
        assert!(lat.index(5, 0).is_none());
        assert!(Lattice::new(7, 1, 1.0).is_err());
    }

    #[test]
    fn reflection_maps_support() {
        let lat = Lattice::new(8, 2, 1.0).unwrap();
        let f = TestFunction::spike(lat, 2, 1, 1.5).unwrap();
        let g = time_reflect(&f);
        assert_eq!(g.min_time(), Some(-1));
        assert_eq!(time_reflect(&g), f);
    }

    #[test]
    fn spike_pairing_reads_the_field() {
        let lat = Lattice::new(6, 1, 0.25).unwrap();
        let field = LatticeField {
            lattice: lat,
            values: (0..6).map(|i| i as f64).collect(),
        };
        let f = TestFunction::spike(lat, 1, 0, 1.0 / lat.volume_element()).unwrap();
        assert!((pair(&field, &f).unwrap() - 3.0).abs() < 1e-15);
        assert_eq!(pair(&field, &TestFunction::zeros(lat)).unwrap(), 0.0);
    }

    #[test]
    fn shifts_wrap_in_space_only() {
        let lat = Lattice::new(6, 4, 1.0).unwrap();
        let f = TestFunction::spike(lat, 1, 3, 1.0).unwrap();
        let g = f.shifted(1, 2).unwrap();
        assert_eq!(g, TestFunction::spike(lat, 2, 1, 1.0).unwrap());
        assert!(f.shifted(3, 0).is_err());
    }
}
