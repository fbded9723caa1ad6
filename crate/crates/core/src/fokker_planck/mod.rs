//! Finite-volume Fokker-Planck solver.
//!
//! Solves `dP/dt = d/dx [beta(x) P + D dP/dx]` on a uniform cell grid. Face
//! fluxes use exponential fitting (Chang-Cooper / Scharfetter-Gummel), so
//! the discrete stationary state is `exp(-int beta/D)` sampled exactly at the
//! cell centres. Time stepping is backward Euler with a tridiagonal solve,
//! which conserves mass under zero-flux walls and keeps densities
//! non-negative.

mod crosscheck;
mod operator;
mod solver;
mod stationary;

pub use crosscheck::{langevin_crosscheck, CrosscheckOptions, CrosscheckReport};
pub use operator::FpOperator;
pub use solver::{chapman_kolmogorov_residual, evolve, greens_function, Propagator};
pub use stationary::{stationary_density, stationary_dual, StationaryReport};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum FpError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("time step {dt} rejected; try dt = {suggested:.3e}")]
    StabilityBound { dt: f64, suggested: f64 },
    #[error("no diffusive stationary state: {0}")]
    NoStationary(String),
    #[error("stationary routes disagree by {0:.3e}")]
    StationaryMismatch(f64),
    #[error("domain mismatch: {0}")]
    Domain(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Boundary {
    ZeroFlux,
    /// Density pinned to zero on the outer faces.
    Absorbing,
}

impl Boundary {
    pub fn name(&self) -> &'static str {
        match self {
            Boundary::ZeroFlux => "zeroflux",
            Boundary::Absorbing => "absorbing",
        }
    }
}

/// Uniform cell grid on `[lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid1D {
    pub lower: f64,
    pub upper: f64,
    pub n_cells: usize,
    pub boundary: Boundary,
}

impl Grid1D {
    pub fn new(lower: f64, upper: f64, n_cells: usize, boundary: Boundary) -> Result<Self, FpError> {
        if !(lower.is_finite() && upper.is_finite() && upper > lower) {
            return Err(FpError::InvalidGrid(format!("need lower < upper, got [{lower}, {upper}]")));
        }
        if n_cells < 8 {
            return Err(FpError::InvalidGrid(format!("need at least 8 cells, got {n_cells}")));
        }
        Ok(Self {
            lower,
            upper,
            n_cells,
            boundary,
        })
    }

    pub fn width(&self) -> f64 {
        (self.upper - self.lower) / self.n_cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        self.lower + (i as f64 + 0.5) * self.width()
    }

    pub fn centers(&self) -> Vec<f64> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    pub fn face(&self, f: usize) -> f64 {
        self.lower + f as f64 * self.width()
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.lower && x <= self.upper
    }

    /// Cell holding `x`; the upper edge belongs to the last cell.
    pub fn cell_of(&self, x: f64) -> Option<usize> {
        if !self.contains(x) {
            return None;
        }
        Some((((x - self.lower) / self.width()) as usize).min(self.n_cells - 1))
    }

    /// Same domain and boundary with `factor` times more cells.
    pub fn refined(&self, factor: usize) -> Self {
        Self {
            n_cells: self.n_cells * factor,
            ..*self
        }
    }
}

/// Cell-averaged probability density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: Grid1D,
    pub values: Vec<f64>,
    pub time: f64,
    /// Cells whose round-off negatives were clamped to zero.
    pub clamped: usize,
}

impl DensityField {
    pub fn new(grid: Grid1D, values: Vec<f64>, time: f64) -> Result<Self, FpError> {
        if values.len() != grid.n_cells {
            return Err(FpError::InvalidArgument(format!(
                "{} values for {} cells",
                values.len(),
                grid.n_cells
            )));
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(FpError::InvalidArgument("density values must be finite and >= 0".into()));
        }
        Ok(Self {
            grid,
            values,
            time,
            clamped: 0,
        })
    }

    /// Unit mass deposited at `x0`, split linearly between the two nearest
    /// cell centres (a single-cell spike when `x0` sits on a centre).
    pub fn point_mass(grid: Grid1D, x0: f64) -> Result<Self, FpError> {
        if !grid.contains(x0) {
            return Err(FpError::Domain(format!(
                "x0 = {x0} outside [{}, {}]",
                grid.lower, grid.upper
            )));
        }
        let h = grid.width();
        let n = grid.n_cells;
        let mut u = ((x0 - grid.lower) / h - 0.5).clamp(0.0, (n - 1) as f64);
        if (u - u.round()).abs() < 1e-9 {
            u = u.round();
        }
        let i = (u.floor() as usize).min(n - 1);
        let frac = u - i as f64;
        let mut values = vec![0.0; n];
        values[i] += (1.0 - frac) / h;
        if frac > 0.0 {
            values[i + 1] += frac / h;
        }
        Ok(Self {
            grid,
            values,
            time: 0.0,
            clamped: 0,
        })
    }

    pub fn mass(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.width()
    }

    pub fn cell_masses(&self) -> Vec<f64> {
        let h = self.grid.width();
        self.values.iter().map(|v| v * h).collect()
    }

    pub fn normalize(&mut self) {
        let m = self.mass();
        if m > 0.0 {
            self.values.iter_mut().for_each(|v| *v /= m);
        }
    }

    pub fn mean(&self) -> f64 {
        let h = self.grid.width();
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * h * self.grid.center(i))
            .sum::<f64>()
            / self.mass()
    }

    /// Variance of the cell-average density (includes the `h^2/12` spread
    /// inside each cell).
    pub fn variance(&self) -> f64 {
        let h = self.grid.width();
        let mu = self.mean();
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| v * h * (self.grid.center(i) - mu).powi(2))
            .sum::<f64>()
            / self.mass()
            + h * h / 12.0
    }

    /// `int |P - Q| dx` for densities on the same grid.
    pub fn l1_distance(&self, other: &DensityField) -> f64 {
        let h = self.grid.width();
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>()
            * h
    }
}

/// Five-point Gauss-Legendre quadrature of `f` over `[a, b]`.
pub(crate) fn gauss_legendre(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    const NODES: [f64; 5] = [
        0.0,
        -0.538_469_310_105_683_1,
        0.538_469_310_105_683_1,
        -0.906_179_845_938_664,
        0.906_179_845_938_664,
    ];
    const WEIGHTS: [f64; 5] = [
        0.568_888_888_888_888_9,
        0.478_628_670_499_366_47,
        0.478_628_670_499_366_47,
        0.236_926_885_056_189_08,
        0.236_926_885_056_189_08,
    ];
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    NODES
        .iter()
        .zip(WEIGHTS)
        .map(|(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 7, Boundary::ZeroFlux).is_err());
        assert!(Grid1D::new(1.0, 1.0, 10, Boundary::ZeroFlux).is_err());
        let g = Grid1D::new(-1.0, 1.0, 10, Boundary::Absorbing).unwrap();
        assert_eq!(g.cell_of(1.0), Some(9));
        assert_eq!(g.cell_of(-1.0), Some(0));
        assert_eq!(g.cell_of(1.5), None);
    }

    #[test]
    fn point_mass_on_a_centre_is_a_spike() {
        let g = Grid1D::new(0.0, 1.0, 10, Boundary::ZeroFlux).unwrap();
        let d = DensityField::point_mass(g, 0.35).unwrap();
        assert!((d.mass() - 1.0).abs() < 1e-14);
        assert_eq!(d.values.iter().filter(|v| **v > 0.0).count(), 1);
        let off = DensityField::point_mass(g, 0.4).unwrap();
        assert!((off.mean() - 0.4).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_is_exact_for_degree_nine() {
        let v = gauss_legendre(|x| x.powi(9) + x.powi(4), -1.0, 2.0);
        let exact = (2f64.powi(10) - 1.0) / 10.0 + (2f64.powi(5) + 1.0) / 5.0;
        assert!((v - exact).abs() < 1e-11);
    }
}
