use super::{Lattice, LatticeField, OsError, TestFunction};
use crate::rng::stream;
use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

/// Free-field covariance `C = (-Laplacian + m^2)^(-1)` on a [`Lattice`].
///
/// Field samples have `<phi_x phi_y> = (A^-1)_{xy} / a^d`, where `A` is the
/// lattice operator, so `<phi(f) phi(g)> = a^d f^T A^-1 g`.
#[derive(Debug, Clone)]
pub struct CovarianceOp {
    pub lattice: Lattice,
    pub mass: f64,
    chol: Cholesky<f64, Dyn>,
}

impl CovarianceOp {
    pub fn new(lattice: Lattice, mass: f64) -> Result<Self, OsError> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(OsError::InvalidArgument(format!("mass must be positive, got {mass}")));
        }
        let a = Self::operator(&lattice, mass);
        let chol = Cholesky::new(a)
            .ok_or_else(|| OsError::IllConditioned("lattice operator is not positive definite".into()))?;
        Ok(Self { lattice, mass, chol })
    }

    /// Dense `-Laplacian + m^2` with Dirichlet time ends and periodic space.
    pub fn operator(lattice: &Lattice, mass: f64) -> DMatrix<f64> {
        let n = lattice.n_sites();
        let inv_a2 = 1.0 / (lattice.spacing * lattice.spacing);
        let l = lattice.space_sites;
        let mut a = DMatrix::zeros(n, n);
        for i in 0..n {
            let (t, x) = lattice.site(i);
            a[(i, i)] += mass * mass + 2.0 * inv_a2;
            for dt in [-1, 1] {
                if let Some(j) = lattice.index(t + dt, x) {
                    a[(i, j)] -= inv_a2;
                }
            }
            if l > 1 {
                a[(i, i)] += 2.0 * inv_a2;
                for x2 in [(x + l - 1) % l, (x + 1) % l] {
                    let j = lattice.index(t, x2).expect("same time slice");
                    a[(i, j)] -= inv_a2;
                }
            }
        }
        a
    }

    fn check(&self, f: &TestFunction) -> Result<(), OsError> {
        if f.lattice != self.lattice {
            return Err(OsError::LatticeMismatch);
        }
        Ok(())
    }

    /// `u = A^-1 g`.
    pub fn solve(&self, g: &TestFunction) -> Result<Vec<f64>, OsError> {
        self.check(g)?;
        let u = self.chol.solve(&DVector::from_column_slice(&g.values));
        if u.iter().any(|v| !v.is_finite()) {
            return Err(OsError::IllConditioned("solve produced non-finite values".into()));
        }
        Ok(u.as_slice().to_vec())
    }

    /// `<f, C g> = a^d f^T A^-1 g`.
    pub fn bilinear(&self, f: &TestFunction, g: &TestFunction) -> Result<f64, OsError> {
        self.check(f)?;
        let u = self.solve(g)?;
        Ok(f.values.iter().zip(&u).map(|(a, b)| a * b).sum::<f64>() * self.lattice.volume_element())
    }

    /// `int exp(i phi(g)) dmu = exp(-<g, C g> / 2)`.
    pub fn characteristic(&self, g: &TestFunction) -> Result<f64, OsError> {
        Ok((-0.5 * self.bilinear(g, g)?).exp())
    }

    /// Field two-point function `<phi(t0, 0) phi(t0 + lag, 0)>` for
    /// `lag = 0..=max_lag`.
    pub fn time_correlator(&self, t0: i64, max_lag: usize) -> Result<Vec<f64>, OsError> {
        let lat = self.lattice;
        let src = TestFunction::spike(lat, t0, 0, 1.0)?;
        let u = self.solve(&src)?;
        (0..=max_lag as i64)
            .map(|lag| {
                lat.index(t0 + lag, 0)
                    .map(|j| u[j] / lat.volume_element())
                    .ok_or_else(|| OsError::Domain(format!("lag {lag} runs off the lattice")))
            })
            .collect()
    }

    /// Field configuration from the standard normal vector `z`.
    pub fn field_from_normals(&self, z: &[f64]) -> LatticeField {
        let l = self.chol.l();
        let z = DVector::from_column_slice(z);
        let phi = l
            .transpose()
            .solve_upper_triangular(&z)
            .expect("Cholesky factor has a nonzero diagonal");
        let scale = self.lattice.volume_element().sqrt().recip();
        LatticeField {
            lattice: self.lattice,
            values: phi.iter().map(|v| v * scale).collect(),
        }
    }

    /// Monte-Carlo estimates of the characteristic functional for each `g`
    /// with standard errors; draw `k` uses stream `k` of `seed`.
    pub fn characteristic_mc(
        &self,
        gs: &[TestFunction],
        draws: usize,
        seed: u64,
    ) -> Result<Vec<(f64, f64)>, OsError> {
        for g in gs {
            self.check(g)?;
        }
        if draws < 2 {
            return Err(OsError::InvalidArgument("need at least two draws".into()));
        }
        let n = self.lattice.n_sites();
        let samples: Vec<Vec<f64>> = (0..draws as u64)
            .into_par_iter()
            .map(|k| {
                let mut rng = stream(seed, k);
                let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
                let field = self.field_from_normals(&z);
                gs.iter()
                    .map(|g| super::pair(&field, g).map(f64::cos).unwrap_or(f64::NAN))
                    .collect()
            })
            .collect();
        Ok((0..gs.len())
            .map(|j| {
                let col: Vec<f64> = samples.iter().map(|s| s[j]).collect();
                crate::stats::mean_se(&col)
            })
            .collect())
    }
}
