use super::{gauss_legendre, Boundary, DensityField, FpError, FpOperator};

/// Both routes to the stationary density and their disagreement.
#[derive(Debug, Clone, PartialEq)]
pub struct StationaryReport {
    /// Null vector of the discrete generator.
    pub generator: DensityField,
    /// `exp(-int beta / D)` by Gauss-Legendre quadrature.
    pub quadrature: DensityField,
    /// `max |P_gen - P_quad| / max P_quad`
    pub max_discrepancy: f64,
    /// `max |J|` over faces for the generator route.
    pub max_flux: f64,
}

const AGREEMENT: f64 = 1e-8;

/// Zero-flux stationary density; both routes must agree to `1e-8`.
pub fn stationary_density(op: &FpOperator) -> Result<DensityField, FpError> {
    let report = stationary_dual(op)?;
    if report.max_discrepancy > AGREEMENT {
        return Err(FpError::StationaryMismatch(report.max_discrepancy));
    }
    Ok(report.generator)
}

pub fn stationary_dual(op: &FpOperator) -> Result<StationaryReport, FpError> {
    if op.grid.boundary != Boundary::ZeroFlux {
        return Err(FpError::NoStationary("requires zero-flux boundaries".into()));
    }
    if op.diffusion == 0.0 {
        return Err(FpError::NoStationary("diffusion is zero".into()));
    }
    let generator = null_vector(op)?;
    let quadrature = quadrature_route(op)?;
    let peak = quadrature.values.iter().fold(0.0f64, |a, b| a.max(*b));
    let max_discrepancy = generator
        .values
        .iter()
        .zip(&quadrature.values)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0f64, f64::max)
        / peak;
    let max_flux = op
        .fluxes(&generator.values)
        .iter()
        .fold(0.0f64, |a, j| a.max(j.abs()));
    Ok(StationaryReport {
        generator,
        quadrature,
        max_discrepancy,
        max_flux,
    })
}

/// Solves `A P = 0` with `P_0 = 1` pinned. Row 0 is redundant because the
/// columns of `A` sum to zero; the remaining rows form a tridiagonal system.
fn null_vector(op: &FpOperator) -> Result<DensityField, FpError> {
    let (sub, diag, sup) = op.tridiagonal();
    let n = diag.len();
    // Unknowns P_1..P_{n-1}; equation i (1..n) reads
    // sub[i] P_{i-1} + diag[i] P_i + sup[i] P_{i+1} = 0.
    let m = n - 1;
    let mut rhs = vec![0.0; m];
    rhs[0] = -sub[1];
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    let mut pivot = diag[1];
    c[0] = sup[1] / pivot;
    d[0] = rhs[0] / pivot;
    for k in 1..m {
        let i = k + 1;
        pivot = diag[i] - sub[i] * c[k - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(FpError::NoStationary("singular generator".into()));
        }
        c[k] = if i + 1 < n { sup[i] / pivot } else { 0.0 };
        d[k] = (rhs[k] - sub[i] * d[k - 1]) / pivot;
    }
    let mut values = vec![0.0; n];
    values[0] = 1.0;
    values[m] = d[m - 1];
    for k in (0..m - 1).rev() {
        values[k + 1] = d[k] - c[k] * values[k + 2];
    }
    finish(op, values)
}

fn quadrature_route(op: &FpOperator) -> Result<DensityField, FpError> {
    let g = op.grid;
    let n = g.n_cells;
    let mut potential = vec![0.0; n];
    for i in 1..n {
        let piece = gauss_legendre(|x| op.drift.beta(x), g.center(i - 1), g.center(i));
        potential[i] = potential[i - 1] + piece / op.diffusion;
    }
    let floor = potential.iter().fold(f64::INFINITY, |a, b| a.min(*b));
    let values = potential.iter().map(|u| (-(u - floor)).exp()).collect();
    finish(op, values)
}

fn finish(op: &FpOperator, values: Vec<f64>) -> Result<DensityField, FpError> {
    if values.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return Err(FpError::NoStationary(
            "exp(-int beta/D) is not representable on this grid".into(),
        ));
    }
    let mut rho = DensityField {
        grid: op.grid,
        values,
        time: f64::INFINITY,
        clamped: 0,
    };
    rho.normalize();
    Ok(rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fokker_planck::Grid1D;
    use crate::stochastic::DriftField;

    #[test]
    fn zero_drift_gives_uniform_density() {
        let g = Grid1D::new(0.0, 2.0, 16, Boundary::ZeroFlux).unwrap();
        let op = FpOperator::new(g, DriftField::Zero, 0.7).unwrap();
        let p = stationary_density(&op).unwrap();
        for v in &p.values {
            assert!((v - 0.5).abs() < 1e-13);
        }
    }

    #[test]
    fn requires_diffusion_and_zero_flux() {
        let g = Grid1D::new(0.0, 2.0, 16, Boundary::ZeroFlux).unwrap();
        let op = FpOperator::new(g, DriftField::Zero, 0.0).unwrap();
        assert!(matches!(stationary_density(&op), Err(FpError::NoStationary(_))));
        let g = Grid1D::new(0.0, 2.0, 16, Boundary::Absorbing).unwrap();
        let op = FpOperator::new(g, DriftField::Zero, 1.0).unwrap();
        assert!(matches!(stationary_density(&op), Err(FpError::NoStationary(_))));
    }

    #[test]
    fn routes_agree_for_cubic_drift() {
        let g = Grid1D::new(-2.0, 2.5, 90, Boundary::ZeroFlux).unwrap();
        let op = FpOperator::new(g, DriftField::Cubic { k: 1.5 }, 0.4).unwrap();
        let r = stationary_dual(&op).unwrap();
        assert!(r.max_discrepancy < 1e-10, "{}", r.max_discrepancy);
        assert!(r.max_flux < 1e-10);
    }
}
