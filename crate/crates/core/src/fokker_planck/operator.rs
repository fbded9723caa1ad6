use super::{Boundary, FpError, Grid1D};
use crate::stochastic::DriftField;

/// Bernoulli function `z / (e^z - 1)`.
fn bernoulli(z: f64) -> f64 {
    if z.abs() < 1e-10 {
        1.0 - 0.5 * z
    } else {
        z / z.exp_m1()
    }
}

/// Exponentially fitted flux coefficients across a gap of length `dist`
/// carrying drift `b`: `J = fwd * P_left - bwd * P_right`.
fn flux_coefficients(b: f64, diffusion: f64, dist: f64) -> (f64, f64) {
    if diffusion == 0.0 {
        // Pure transport with velocity -b, upwinded.
        return ((-b).max(0.0), b.max(0.0));
    }
    let w = b * dist / diffusion;
    let scale = diffusion / dist;
    (scale * bernoulli(w), scale * bernoulli(-w))
}

/// Discrete generator `d/dx [beta + D d/dx]` on a [`Grid1D`].
///
/// Interior face drifts are the exact averages of `beta` between the two
/// neighbouring cell centres, so the zero-flux null vector reproduces
/// `exp(-int beta / D)` at the centres for any drift.
#[derive(Debug, Clone, PartialEq)]
pub struct FpOperator {
    pub grid: Grid1D,
    pub drift: DriftField,
    pub diffusion: f64,
    /// Drift on faces `0..=n`; face `f` separates cells `f-1` and `f`.
    pub face_drift: Vec<f64>,
    pub(crate) fwd: Vec<f64>,
    pub(crate) bwd: Vec<f64>,
}

impl FpOperator {
    pub fn new(grid: Grid1D, drift: DriftField, diffusion: f64) -> Result<Self, FpError> {
        if !(diffusion.is_finite() && diffusion >= 0.0) {
            return Err(FpError::InvalidArgument(format!(
                "diffusion must be finite and non-negative, got {diffusion}"
            )));
        }
        let n = grid.n_cells;
        let h = grid.width();
        let mut face_drift = vec![0.0; n + 1];
        face_drift[0] = drift.beta(grid.lower);
        face_drift[n] = drift.beta(grid.upper);
        for (f, b) in face_drift.iter_mut().enumerate().take(n).skip(1) {
            *b = (drift.antiderivative(grid.center(f)) - drift.antiderivative(grid.center(f - 1))) / h;
        }
        if face_drift.iter().any(|b| !b.is_finite()) {
            return Err(FpError::InvalidArgument("drift is not finite on the grid".into()));
        }

        let mut fwd = vec![0.0; n + 1];
        let mut bwd = vec![0.0; n + 1];
        for f in 1..n {
            (fwd[f], bwd[f]) = flux_coefficients(face_drift[f], diffusion, h);
        }
        if grid.boundary == Boundary::Absorbing {
            // Zero density on the outer faces, half a cell from the centres.
            bwd[0] = flux_coefficients(face_drift[0], diffusion, 0.5 * h).1;
            fwd[n] = flux_coefficients(face_drift[n], diffusion, 0.5 * h).0;
        }
        Ok(Self {
            grid,
            drift,
            diffusion,
            face_drift,
            fwd,
            bwd,
        })
    }

    /// Same drift and diffusion on another grid.
    pub fn on_grid(&self, grid: Grid1D) -> Result<Self, FpError> {
        Self::new(grid, self.drift, self.diffusion)
    }

    /// Tridiagonal rows `(sub, diag, sup)` of the generator.
    pub fn tridiagonal(&self) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
        let n = self.grid.n_cells;
        let h = self.grid.width();
        let mut sub = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut sup = vec![0.0; n];
        for i in 0..n {
            if i > 0 {
                sub[i] = self.fwd[i] / h;
            }
            diag[i] = -(self.bwd[i] + self.fwd[i + 1]) / h;
            if i + 1 < n {
                sup[i] = self.bwd[i + 1] / h;
            }
        }
        (sub, diag, sup)
    }

    /// Probability flux `J = -(beta P + D dP/dx)` on every face.
    pub fn fluxes(&self, values: &[f64]) -> Vec<f64> {
        let n = self.grid.n_cells;
        (0..=n)
            .map(|f| {
                let left = if f > 0 { values[f - 1] } else { 0.0 };
                let right = if f < n { values[f] } else { 0.0 };
                self.fwd[f] * left - self.bwd[f] * right
            })
            .collect()
    }

    /// `dP/dt` for the given cell values.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let h = self.grid.width();
        let j = self.fluxes(values);
        (0..self.grid.n_cells).map(|i| (j[i] - j[i + 1]) / h).collect()
    }

    /// Step suggested for accuracy: `h^2 / (2D)`, or a CFL-like `h / |beta|`
    /// for pure transport.
    pub fn suggested_dt(&self) -> f64 {
        let h = self.grid.width();
        if self.diffusion > 0.0 {
            h * h / (2.0 * self.diffusion)
        } else {
            let vmax = self.face_drift.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if vmax > 0.0 {
                h / vmax
            } else {
                1.0
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn op(drift: DriftField, d: f64, bc: Boundary) -> FpOperator {
        FpOperator::new(Grid1D::new(-2.0, 3.0, 17, bc).unwrap(), drift, d).unwrap()
    }

    #[test]
    fn zero_flux_columns_sum_to_zero() {
        for drift in [
            DriftField::Zero,
            DriftField::Linear { gamma: 1.3 },
            DriftField::Cubic { k: 0.7 },
            DriftField::Constant { value: -2.0 },
        ] {
            for d in [0.0, 0.05, 1.0] {
                let o = op(drift, d, Boundary::ZeroFlux);
                let (sub, diag, sup) = o.tridiagonal();
                let n = diag.len();
                for j in 0..n {
                    let mut s = diag[j];
                    if j > 0 {
                        s += sup[j - 1];
                    }
                    if j + 1 < n {
                        s += sub[j + 1];
                    }
                    assert!(s.abs() < 1e-14 * (1.0 + diag[j].abs()), "col {j}: {s}");
                }
            }
        }
    }

    #[test]
    fn absorbing_walls_lose_mass() {
        let o = op(DriftField::Zero, 1.0, Boundary::Absorbing);
        let rate: f64 = o.apply(&[1.0; 17]).iter().sum();
        assert!(rate < 0.0);
    }

    #[test]
    fn bernoulli_is_smooth_through_zero() {
        assert!((bernoulli(1e-12) - bernoulli(-1e-12)).abs() < 1e-11);
        assert!((bernoulli(1e-6) - 1e-6 / 1e-6f64.exp_m1()).abs() < 1e-12);
        assert_eq!(bernoulli(800.0), 0.0);
        assert_eq!(bernoulli(-800.0), 800.0);
    }
}
