use super::{greens_function, FpError, FpOperator};
use crate::stochastic::EnsembleSample;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrosscheckOptions {
    /// Fokker-Planck time step.
    pub dt: f64,
    /// Histogram bins merge this many adjacent cells of the operator grid.
    pub coarsen: usize,
    /// Largest tolerated fraction of samples outside the grid.
    pub max_outside: f64,
}

impl Default for CrosscheckOptions {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            coarsen: 1,
            max_outside: 1e-3,
        }
    }
}

/// Ensemble histogram against the evolved transition density.
#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckReport {
    /// `sum |p_hist - p_fp|` over bins, with out-of-grid samples counted as
    /// misfit mass.
    pub l1: f64,
    /// Monte-Carlo floor `n^(-1/2)`.
    pub mc_floor: f64,
    /// Richardson estimate of the discretisation error of the Fokker-Planck
    /// bin masses, from a run on a grid twice as fine with a quarter step.
    pub grid_error: f64,
    pub n_samples: usize,
    pub outside: usize,
    pub bin_edges: Vec<f64>,
    pub histogram: Vec<f64>,
    pub evolved: Vec<f64>,
}

fn bin_masses(masses: &[f64], group: usize) -> Vec<f64> {
    masses.chunks(group).map(|c| c.iter().sum()).collect()
}

/// Compares the ensemble at time `t` with `P(x, t | x0, 0)` evolved from the
/// ensemble's starting point on the operator's grid.
pub fn langevin_crosscheck(
    op: &FpOperator,
    ensemble: &EnsembleSample,
    t: f64,
    opts: &CrosscheckOptions,
) -> Result<CrosscheckReport, FpError> {
    let grid = op.grid;
    if opts.coarsen == 0 || !grid.n_cells.is_multiple_of(opts.coarsen) {
        return Err(FpError::InvalidArgument(format!(
            "coarsening factor {} does not divide {} cells",
            opts.coarsen, grid.n_cells
        )));
    }
    if !grid.contains(ensemble.x0) {
        return Err(FpError::Domain(format!("ensemble starts outside the grid at {}", ensemble.x0)));
    }
    let k = ensemble
        .index_at(t)
        .ok_or_else(|| FpError::Domain(format!("ensemble has no recorded time near t = {t}")))?;
    let n = ensemble.n_traj();
    if n == 0 {
        return Err(FpError::Domain("ensemble is empty".into()));
    }

    let n_bins = grid.n_cells / opts.coarsen;
    let bin_width = grid.width() * opts.coarsen as f64;
    let mut counts = vec![0usize; n_bins];
    let mut outside = 0;
    for tr in &ensemble.trajectories {
        match grid.cell_of(tr[k]) {
            Some(c) => counts[c / opts.coarsen] += 1,
            None => outside += 1,
        }
    }
    if outside as f64 > opts.max_outside * n as f64 {
        return Err(FpError::Domain(format!(
            "{outside} of {n} samples fall outside [{}, {}]",
            grid.lower, grid.upper
        )));
    }
    let histogram: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();

    let coarse = greens_function(op, ensemble.x0, t, opts.dt)?;
    let evolved = bin_masses(&coarse.cell_masses(), opts.coarsen);
    let fine_op = op.on_grid(grid.refined(2))?;
    let fine = greens_function(&fine_op, ensemble.x0, t, opts.dt / 4.0)?;
    let evolved_fine = bin_masses(&fine.cell_masses(), 2 * opts.coarsen);
    let grid_error = 4.0 / 3.0
        * evolved
            .iter()
            .zip(&evolved_fine)
            .map(|(a, b)| (a - b).abs())
            .sum::<f64>();

    let l1 = histogram
        .iter()
        .zip(&evolved)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        + outside as f64 / n as f64;
    Ok(CrosscheckReport {
        l1,
        mc_floor: 1.0 / (n as f64).sqrt(),
        grid_error,
        n_samples: n,
        outside,
        bin_edges: (0..=n_bins).map(|b| grid.lower + b as f64 * bin_width).collect(),
        histogram,
        evolved,
    })
}
