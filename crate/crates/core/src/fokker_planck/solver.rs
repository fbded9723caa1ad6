use super::{DensityField, FpError, FpOperator};

/// Factorised backward-Euler step `(I - dt A) P_next = P`.
#[derive(Debug, Clone)]
pub struct Propagator {
    dt: f64,
    sub: Vec<f64>,
    /// Modified super-diagonal of the Thomas elimination.
    sup_mod: Vec<f64>,
    /// Pivots of the Thomas elimination.
    pivot: Vec<f64>,
}

impl Propagator {
    pub fn new(op: &FpOperator, dt: f64) -> Result<Self, FpError> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(FpError::StabilityBound {
                dt,
                suggested: op.suggested_dt(),
            });
        }
        let (a_sub, a_diag, a_sup) = op.tridiagonal();
        let n = a_diag.len();
        let sub: Vec<f64> = a_sub.iter().map(|v| -dt * v).collect();
        let diag: Vec<f64> = a_diag.iter().map(|v| 1.0 - dt * v).collect();
        let sup: Vec<f64> = a_sup.iter().map(|v| -dt * v).collect();
        // The matrix is column diagonally dominant, so no pivoting is needed.
        let mut sup_mod = vec![0.0; n];
        let mut pivot = vec![0.0; n];
        pivot[0] = diag[0];
        sup_mod[0] = sup[0] / pivot[0];
        for i in 1..n {
            pivot[i] = diag[i] - sub[i] * sup_mod[i - 1];
            sup_mod[i] = if i + 1 < n { sup[i] / pivot[i] } else { 0.0 };
        }
        Ok(Self {
            dt,
            sub,
            sup_mod,
            pivot,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// Advances `values` by one step in place.
    pub fn step(&self, values: &mut [f64]) {
        let n = values.len();
        values[0] /= self.pivot[0];
        for i in 1..n {
            values[i] = (values[i] - self.sub[i] * values[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            values[i] -= self.sup_mod[i] * values[i + 1];
        }
    }

    /// Advances `steps` times, clamping round-off negatives; returns the
    /// number of clamped cells.
    pub fn advance(&self, values: &mut [f64], steps: usize) -> usize {
        let mut clamped = 0;
        for _ in 0..steps {
            self.step(values);
            for v in values.iter_mut() {
                if *v < 0.0 {
                    *v = 0.0;
                    clamped += 1;
                }
            }
        }
        clamped
    }
}

/// Advances `rho` by `steps` backward-Euler steps of size `dt`.
pub fn evolve(op: &FpOperator, rho: &DensityField, dt: f64, steps: usize) -> Result<DensityField, FpError> {
    if rho.grid != op.grid {
        return Err(FpError::Domain("density and operator live on different grids".into()));
    }
    let prop = Propagator::new(op, dt)?;
    let mut out = rho.clone();
    out.clamped += prop.advance(&mut out.values, steps);
    out.time = rho.time + steps as f64 * dt;
    Ok(out)
}

fn steps_for(t: f64, dt: f64) -> usize {
    (t / dt).round().max(0.0) as usize
}

/// Transition density `P(x, t | x0, 0)` from a unit point mass at `x0`,
/// using `round(t / dt)` steps.
pub fn greens_function(op: &FpOperator, x0: f64, t: f64, dt: f64) -> Result<DensityField, FpError> {
    if !(t >= 0.0) {
        return Err(FpError::InvalidArgument(format!("t must be non-negative, got {t}")));
    }
    let start = DensityField::point_mass(op.grid, x0)?;
    evolve(op, &start, dt, steps_for(t, dt))
}

/// L1 distance between direct propagation `0 -> t` and the composition
/// through `t_mid`, `int P(x, t | x', t_mid) P(x', t_mid | x0, 0) dx'`, where
/// the first factor is obtained by propagating every cell-delta separately.
pub fn chapman_kolmogorov_residual(
    op: &FpOperator,
    x0: f64,
    t_mid: f64,
    t: f64,
    dt: f64,
) -> Result<f64, FpError> {
    if !(t_mid >= 0.0 && t_mid <= t) {
        return Err(FpError::InvalidArgument(format!("need 0 <= t_mid <= t, got {t_mid}, {t}")));
    }
    let prop = Propagator::new(op, dt)?;
    let n_total = steps_for(t, dt);
    let n_mid = steps_for(t_mid, dt).min(n_total);
    let n = op.grid.n_cells;
    let h = op.grid.width();

    let mut direct = DensityField::point_mass(op.grid, x0)?.values;
    prop.advance(&mut direct, n_total);

    let mut middle = DensityField::point_mass(op.grid, x0)?.values;
    prop.advance(&mut middle, n_mid);

    let mut composed = vec![0.0; n];
    for (j, &pj) in middle.iter().enumerate() {
        if pj == 0.0 {
            continue;
        }
        let mut column = vec![0.0; n];
        column[j] = 1.0 / h;
        prop.advance(&mut column, n_total - n_mid);
        let weight = pj * h;
        for (c, col) in composed.iter_mut().zip(&column) {
            *c += weight * col;
        }
    }
    Ok(direct
        .iter()
        .zip(&composed)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        * h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fokker_planck::{Boundary, Grid1D};
    use crate::stochastic::DriftField;

    #[test]
    fn rejects_non_positive_step_with_suggestion() {
        let op = FpOperator::new(
            Grid1D::new(0.0, 1.0, 10, Boundary::ZeroFlux).unwrap(),
            DriftField::Zero,
            0.5,
        )
        .unwrap();
        match Propagator::new(&op, 0.0) {
            Err(FpError::StabilityBound { suggested, .. }) => assert!((suggested - 0.01).abs() < 1e-15),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn null_generator_leaves_density_unchanged() {
        let g = Grid1D::new(0.0, 1.0, 12, Boundary::ZeroFlux).unwrap();
        let op = FpOperator::new(g, DriftField::Zero, 0.0).unwrap();
        let values: Vec<f64> = (0..12).map(|i| 1.0 + 0.1 * i as f64).collect();
        let rho = DensityField::new(g, values.clone(), 0.0).unwrap();
        let out = evolve(&op, &rho, 0.1, 50).unwrap();
        assert_eq!(out.values, values);
    }

    #[test]
    fn zero_time_greens_function_is_the_spike() {
        let g = Grid1D::new(0.0, 1.0, 10, Boundary::ZeroFlux).unwrap();
        let op = FpOperator::new(g, DriftField::Linear { gamma: 1.0 }, 0.3).unwrap();
        let p = greens_function(&op, 0.45, 0.0, 0.01).unwrap();
        assert_eq!(p.values[4], 10.0);
        assert_eq!(p.mass(), 1.0);
    }

    #[test]
    fn composition_through_zero_is_exact() {
        let g = Grid1D::new(-1.0, 1.0, 8, Boundary::ZeroFlux).unwrap();
        let op = FpOperator::new(g, DriftField::Cubic { k: 2.0 }, 0.2).unwrap();
        assert_eq!(chapman_kolmogorov_residual(&op, 0.125, 0.0, 0.5, 0.01).unwrap(), 0.0);
    }
}
