use rayon::prelude::*;

use super::{solve_classical_path, ClassicalError, ShootingOptions, SystemModel};

/// On-shell actions `S(q0, t0; q, t)` tabulated over a rectangular `(q, t)`
/// grid for a one-dimensional system. Alongside `S`, every node keeps the
/// final momentum and energy of its classical path.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionTable {
    pub q0: f64,
    pub t0: f64,
    pub qs: Vec<f64>,
    pub ts: Vec<f64>,
    /// Row-major in `t`: entry `it * qs.len() + iq`.
    pub action: Vec<f64>,
    pub final_momentum: Vec<f64>,
    pub energy: Vec<f64>,
}

fn strictly_increasing(xs: &[f64]) -> bool {
    xs.windows(2).all(|w| w[1] > w[0]) && xs.iter().all(|x| x.is_finite())
}

/// `n` evenly spaced points from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    (0..n)
        .map(|k| lo + (hi - lo) * k as f64 / (n - 1) as f64)
        .collect()
}

impl ActionTable {
    /// Shoots every node independently (in parallel; results do not depend
    /// on scheduling).
    pub fn build(
        model: &SystemModel,
        q0: f64,
        t0: f64,
        qs: Vec<f64>,
        ts: Vec<f64>,
        opts: &ShootingOptions,
    ) -> Result<Self, ClassicalError> {
        if model.dim() != 1 {
            return Err(ClassicalError::DimensionMismatch {
                expected: 1,
                got: model.dim(),
            });
        }
        if qs.is_empty() || ts.is_empty() || !strictly_increasing(&qs) || !strictly_increasing(&ts) {
            return Err(ClassicalError::InvalidArgument(
                "table axes must be non-empty and strictly increasing".into(),
            ));
        }
        if ts[0] <= t0 {
            return Err(ClassicalError::InvalidArgument(
                "every table time must exceed t0".into(),
            ));
        }
        let nq = qs.len();
        let nodes: Vec<(usize, usize)> = (0..ts.len())
            .flat_map(|it| (0..nq).map(move |iq| (it, iq)))
            .collect();
        let paths = nodes
            .par_iter()
            .map(|&(it, iq)| solve_classical_path(model, &[q0], t0, &[qs[iq]], ts[it], opts))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            q0,
            t0,
            action: paths.iter().map(|p| p.action).collect(),
            final_momentum: paths.iter().map(|p| p.final_momentum[0]).collect(),
            energy: paths.iter().map(|p| p.final_energy).collect(),
            qs,
            ts,
        })
    }

    pub fn nq(&self) -> usize {
        self.qs.len()
    }

    pub fn nt(&self) -> usize {
        self.ts.len()
    }

    pub fn index(&self, iq: usize, it: usize) -> usize {
        it * self.nq() + iq
    }

    fn check_density(&self) -> Result<(), ClassicalError> {
        if self.nq() < 3 || self.nt() < 3 {
            return Err(ClassicalError::InsufficientGrid {
                nq: self.nq(),
                nt: self.nt(),
            });
        }
        Ok(())
    }

    /// `(dS/dq, dS/dt)` at every node. Three-point Lagrange stencils:
    /// centred inside, one-sided on the boundary.
    pub fn gradients(&self) -> Result<(Vec<f64>, Vec<f64>), ClassicalError> {
        self.check_density()?;
        let (nq, nt) = (self.nq(), self.nt());
        let mut dq = vec![0.0; nq * nt];
        let mut dt = vec![0.0; nq * nt];
        for it in 0..nt {
            for iq in 0..nq {
                let idx = self.index(iq, it);
                let (a, b, c) = stencil(iq, nq);
                dq[idx] = lagrange3_derivative(
                    [self.qs[a], self.qs[b], self.qs[c]],
                    [
                        self.action[self.index(a, it)],
                        self.action[self.index(b, it)],
                        self.action[self.index(c, it)],
                    ],
                    self.qs[iq],
                );
                let (a, b, c) = stencil(it, nt);
                dt[idx] = lagrange3_derivative(
                    [self.ts[a], self.ts[b], self.ts[c]],
                    [
                        self.action[self.index(iq, a)],
                        self.action[self.index(iq, b)],
                        self.action[self.index(iq, c)],
                    ],
                    self.ts[it],
                );
            }
        }
        Ok((dq, dt))
    }

    fn is_interior(&self, iq: usize, it: usize) -> bool {
        iq > 0 && it > 0 && iq + 1 < self.nq() && it + 1 < self.nt()
    }
}

fn stencil(i: usize, n: usize) -> (usize, usize, usize) {
    if i == 0 {
        (0, 1, 2)
    } else if i == n - 1 {
        (n - 3, n - 2, n - 1)
    } else {
        (i - 1, i, i + 1)
    }
}

/// Derivative at `x` of the parabola through three points.
fn lagrange3_derivative(x: [f64; 3], f: [f64; 3], at: f64) -> f64 {
    let d0 = ((at - x[1]) + (at - x[2])) / ((x[0] - x[1]) * (x[0] - x[2]));
    let d1 = ((at - x[0]) + (at - x[2])) / ((x[1] - x[0]) * (x[1] - x[2]));
    let d2 = ((at - x[0]) + (at - x[1])) / ((x[2] - x[0]) * (x[2] - x[1]));
    f[0] * d0 + f[1] * d1 + f[2] * d2
}

/// Maxima over interior nodes of `|dS/dq - p|` and `|dS/dt + H|`, with `p`
/// and `H` taken from each node's classical path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientReport {
    pub max_momentum_residual: f64,
    pub max_energy_residual: f64,
}

pub fn action_gradients_check(
    table: &ActionTable,
    _model: &SystemModel,
) -> Result<GradientReport, ClassicalError> {
    let (dq, dt) = table.gradients()?;
    let mut report = GradientReport {
        max_momentum_residual: 0.0,
        max_energy_residual: 0.0,
    };
    for it in 0..table.nt() {
        for iq in 0..table.nq() {
            if !table.is_interior(iq, it) {
                continue;
            }
            let idx = table.index(iq, it);
            report.max_momentum_residual =
                report.max_momentum_residual.max((dq[idx] - table.final_momentum[idx]).abs());
            report.max_energy_residual =
                report.max_energy_residual.max((dt[idx] + table.energy[idx]).abs());
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HjNode {
    pub q: f64,
    pub t: f64,
    pub action: f64,
    pub ds_dq: f64,
    pub ds_dt: f64,
    /// `dS/dt + H(q, dS/dq, t)`
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HjResidual {
    pub nodes: Vec<HjNode>,
    pub max_interior: f64,
    /// For closed systems, `max |dS/dt + E|` over interior nodes.
    pub max_energy_interior: Option<f64>,
}

/// Hamilton-Jacobi residual of a tabulated action.
pub fn hamilton_jacobi_residual(
    table: &ActionTable,
    model: &SystemModel,
) -> Result<HjResidual, ClassicalError> {
    let (dq, dt) = table.gradients()?;
    let closed = !model.time_dependent();
    let mut nodes = Vec::with_capacity(table.action.len());
    let mut max_interior: f64 = 0.0;
    let mut max_energy: f64 = 0.0;
    for it in 0..table.nt() {
        for iq in 0..table.nq() {
            let idx = table.index(iq, it);
            let (q, t) = (table.qs[iq], table.ts[it]);
            let residual = dt[idx] + model.hamiltonian(&[q], &[dq[idx]], t);
            if table.is_interior(iq, it) {
                max_interior = max_interior.max(residual.abs());
                max_energy = max_energy.max((dt[idx] + table.energy[idx]).abs());
            }
            nodes.push(HjNode {
                q,
                t,
                action: table.action[idx],
                ds_dq: dq[idx],
                ds_dt: dt[idx],
                residual,
            });
        }
    }
    Ok(HjResidual {
        nodes,
        max_interior,
        max_energy_interior: closed.then_some(max_energy),
    })
}

/// Residuals of a table and of its 2x refinement, compared on the nodes
/// they share.
#[derive(Debug, Clone, PartialEq)]
pub struct HjRefinement {
    pub coarse: HjResidual,
    pub fine: HjResidual,
    /// `max |residual|` over interior nodes of the coarse table.
    pub coarse_max: f64,
    /// `max |residual|` of the refined table at those same nodes.
    pub fine_max: f64,
    /// Same pair for `|dS/dt + E|` on closed systems.
    pub energy: Option<(f64, f64)>,
}

impl HjRefinement {
    /// `coarse_max / fine_max`; about 4 for second-order stencils.
    pub fn ratio(&self) -> f64 {
        self.coarse_max / self.fine_max
    }
}

/// Rebuilds `table` with `2n - 1` nodes per axis over the same ranges and
/// evaluates both Hamilton-Jacobi residuals.
pub fn hamilton_jacobi_refinement(
    table: &ActionTable,
    model: &SystemModel,
    opts: &ShootingOptions,
) -> Result<HjRefinement, ClassicalError> {
    let (nq, nt) = (table.nq(), table.nt());
    let refine = |xs: &[f64]| {
        let mut out = Vec::with_capacity(2 * xs.len() - 1);
        for w in xs.windows(2) {
            out.extend([w[0], 0.5 * (w[0] + w[1])]);
        }
        out.extend(xs.last());
        out
    };
    let fine_table = ActionTable::build(model, table.q0, table.t0, refine(&table.qs), refine(&table.ts), opts)?;
    let coarse = hamilton_jacobi_residual(table, model)?;
    let fine = hamilton_jacobi_residual(&fine_table, model)?;
    let (mut fine_max, mut e_coarse, mut e_fine) = (0.0f64, 0.0f64, 0.0f64);
    for it in 1..nt - 1 {
        for iq in 1..nq - 1 {
            let c = table.index(iq, it);
            let f = fine_table.index(2 * iq, 2 * it);
            fine_max = fine_max.max(fine.nodes[f].residual.abs());
            e_coarse = e_coarse.max((coarse.nodes[c].ds_dt + table.energy[c]).abs());
            e_fine = e_fine.max((fine.nodes[f].ds_dt + fine_table.energy[f]).abs());
        }
    }
    Ok(HjRefinement {
        coarse_max: coarse.max_interior,
        fine_max,
        energy: (!model.time_dependent()).then_some((e_coarse, e_fine)),
        coarse,
        fine,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stencil_is_exact_on_parabolas() {
        let x = [0.0, 0.3, 1.0];
        let f = x.map(|x| 2.0 * x * x - x + 4.0);
        for at in [0.0, 0.3, 1.0] {
            assert!((lagrange3_derivative(x, f, at) - (4.0 * at - 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn single_node_axis_is_insufficient() {
        let m = SystemModel::free(1.0);
        let table = ActionTable::build(
            &m,
            0.0,
            0.0,
            vec![0.5],
            linspace(1.0, 2.0, 5),
            &ShootingOptions::default(),
        )
        .unwrap();
        assert!(matches!(
            action_gradients_check(&table, &m),
            Err(ClassicalError::InsufficientGrid { nq: 1, nt: 5 })
        ));
        assert!(hamilton_jacobi_residual(&table, &m).is_err());
    }

    #[test]
    fn rejects_times_before_origin() {
        let m = SystemModel::free(1.0);
        let r = ActionTable::build(
            &m,
            0.0,
            1.0,
            linspace(0.0, 1.0, 4),
            linspace(0.5, 2.0, 4),
            &ShootingOptions::default(),
        );
        assert!(r.is_err());
    }
}
