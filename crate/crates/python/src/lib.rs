use emergence_core::{classical, fokker_planck as fp, harness, os_field as os, path_measure as pm, stochastic};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use std::fmt::Display;

fn err<E: Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn drift(kind: &str, coefficient: f64) -> PyResult<stochastic::DriftField> {
    Ok(match kind {
        "zero" => stochastic::DriftField::Zero,
        "linear" => stochastic::DriftField::Linear { gamma: coefficient },
        "cubic" => stochastic::DriftField::Cubic { k: coefficient },
        "constant" => stochastic::DriftField::Constant { value: coefficient },
        other => return Err(err(format!("unknown drift {other:?}"))),
    })
}

/// `(times, q, p, energy)`
type Series4 = (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>);

/// One-dimensional mechanical system.
#[pyclass(name = "SystemModel", frozen)]
struct PySystemModel(classical::SystemModel);

#[pymethods]
impl PySystemModel {
    #[staticmethod]
    fn free(mass: f64) -> Self {
        Self(classical::SystemModel::free(mass))
    }

    #[staticmethod]
    fn harmonic(mass: f64, omega: f64) -> Self {
        Self(classical::SystemModel::harmonic(mass, omega))
    }

    #[staticmethod]
    fn quartic(mass: f64, lambda: f64) -> Self {
        Self(classical::SystemModel::quartic(mass, lambda))
    }

    /// On-shell action between `(q0, t0)` and `(q1, t1)`.
    fn action(&self, q0: f64, t0: f64, q1: f64, t1: f64) -> PyResult<f64> {
        classical::onshell_action(&self.0, &[q0], t0, &[q1], t1).map_err(err)
    }

    /// Leapfrog trajectory.
    fn trajectory(&self, q0: f64, p0: f64, t_end: f64, dt: f64) -> PyResult<Series4> {
        let tr = classical::integrate_hamilton(&self.0, &classical::PhaseState::scalar(q0, p0, 0.0), t_end, dt)
            .map_err(err)?;
        let e = classical::energy_series(&self.0, &tr);
        let q = tr.states.iter().map(|s| s.q[0]).collect();
        let p = tr.states.iter().map(|s| s.p[0]).collect();
        Ok((e.times, q, p, e.values))
    }

    /// Hamilton-Jacobi residual maxima `(coarse, fine)` at nodes shared by
    /// an `nq x nt` action table and its 2x refinement.
    #[pyo3(signature = (q0, q_range, t_range, nq = 16, nt = 16))]
    fn hj_refinement(&self, q0: f64, q_range: (f64, f64), t_range: (f64, f64), nq: usize, nt: usize) -> PyResult<(f64, f64)> {
        let opts = classical::ShootingOptions::default();
        let table = classical::ActionTable::build(
            &self.0,
            q0,
            0.0,
            classical::linspace(q_range.0, q_range.1, nq),
            classical::linspace(t_range.0, t_range.1, nt),
            &opts,
        )
        .map_err(err)?;
        let r = classical::hamilton_jacobi_refinement(&table, &self.0, &opts).map_err(err)?;
        Ok((r.coarse_max, r.fine_max))
    }
}

/// Kramers-Moyal bin: `(center, a1, a1_se, a2, a2_se, a3, a3_se, count)`.
type KmRow = (f64, f64, f64, f64, f64, f64, f64, usize);

/// Euler-Maruyama ensemble.
#[pyclass(name = "Ensemble", frozen)]
struct PyEnsemble(stochastic::EnsembleSample);

#[pymethods]
impl PyEnsemble {
    #[new]
    #[pyo3(signature = (drift_kind, coefficient, diffusion, x0, t_end, dt, n_traj, seed = 0, km_window = None))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        drift_kind: &str,
        coefficient: f64,
        diffusion: f64,
        x0: f64,
        t_end: f64,
        dt: f64,
        n_traj: usize,
        seed: u64,
        km_window: Option<usize>,
    ) -> PyResult<Self> {
        let noise = stochastic::NoiseSpec::new(diffusion, seed).map_err(err)?;
        let rec = match km_window {
            Some(w) => stochastic::Recording::tail(t_end, dt, w),
            None => stochastic::Recording::default(),
        };
        stochastic::simulate_ensemble_with(&drift(drift_kind, coefficient)?, &noise, x0, t_end, dt, n_traj, &rec)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn times(&self) -> Vec<f64> {
        self.0.times.clone()
    }

    /// Positions of every trajectory at recorded time index `k`.
    fn column(&self, k: usize) -> PyResult<Vec<f64>> {
        if k >= self.0.times.len() {
            return Err(err(format!("time index {k} out of range")));
        }
        Ok(self.0.column(k))
    }

    fn kramers_moyal(&self, lag: usize, bins: usize) -> PyResult<Vec<KmRow>> {
        let km = stochastic::estimate_km_coefficients(&self.0, lag, bins).map_err(err)?;
        Ok(km
            .bins
            .iter()
            .map(|b| (b.center, b.a1, b.a1_se, b.a2, b.a2_se, b.a3, b.a3_se, b.count))
            .collect())
    }

    fn __len__(&self) -> usize {
        self.0.trajectories.len()
    }
}

/// Chang-Cooper Fokker-Planck operator on a finite-volume grid.
#[pyclass(name = "FokkerPlanck", frozen)]
struct PyFokkerPlanck(fp::FpOperator);

#[pymethods]
impl PyFokkerPlanck {
    #[new]
    #[pyo3(signature = (lower, upper, cells, drift_kind, coefficient, diffusion, absorbing = false))]
    fn new(
        lower: f64,
        upper: f64,
        cells: usize,
        drift_kind: &str,
        coefficient: f64,
        diffusion: f64,
        absorbing: bool,
    ) -> PyResult<Self> {
        let bc = if absorbing { fp::Boundary::Absorbing } else { fp::Boundary::ZeroFlux };
        let grid = fp::Grid1D::new(lower, upper, cells, bc).map_err(err)?;
        fp::FpOperator::new(grid, drift(drift_kind, coefficient)?, diffusion)
            .map(Self)
            .map_err(err)
    }

    #[getter]
    fn centers(&self) -> Vec<f64> {
        self.0.grid.centers()
    }

    /// Stationary density values per cell.
    fn stationary(&self) -> PyResult<Vec<f64>> {
        fp::stationary_density(&self.0).map(|d| d.values).map_err(err)
    }

    /// Density after `steps` backward-Euler steps from a point mass at `x0`.
    fn evolve(&self, x0: f64, dt: f64, steps: usize) -> PyResult<Vec<f64>> {
        let start = fp::DensityField::point_mass(self.0.grid, x0).map_err(err)?;
        fp::evolve(&self.0, &start, dt, steps).map(|d| d.values).map_err(err)
    }
}

/// Euclidean lattice action for path sampling.
#[pyclass(name = "PathAction", frozen)]
struct PyPathAction(pm::DiscreteActionSpec);

#[pymethods]
impl PyPathAction {
    #[staticmethod]
    fn harmonic(mass: f64, omega: f64, hbar: f64, spacing: f64) -> PyResult<Self> {
        pm::DiscreteActionSpec::harmonic(mass, omega, hbar, spacing)
            .map(Self)
            .map_err(err)
    }

    #[staticmethod]
    fn quartic(mass: f64, omega: f64, lambda: f64, hbar: f64, spacing: f64) -> PyResult<Self> {
        pm::DiscreteActionSpec::quartic(mass, omega, lambda, hbar, spacing)
            .map(Self)
            .map_err(err)
    }

    fn action(&self, path: Vec<f64>) -> PyResult<f64> {
        let p = pm::LatticePath::new(path, self.0.spacing).map_err(err)?;
        pm::discrete_action(&self.0, &p).map_err(err)
    }

    /// Exact `<q^2>` on `n` slices; `None` unless harmonic.
    fn exact_q2(&self, n: usize) -> Option<f64> {
        pm::harmonic_lattice_q2(&self.0, n)
    }

    #[pyo3(signature = (n_slices, sweeps, thermalization = 1000, chains = 1, seed = 0, proposal_width = None))]
    fn sample(
        &self,
        n_slices: usize,
        sweeps: usize,
        thermalization: usize,
        chains: usize,
        seed: u64,
        proposal_width: Option<f64>,
    ) -> PyResult<PyPathEnsemble> {
        let cfg = pm::MetropolisConfig {
            n_slices,
            proposal_width: proposal_width.unwrap_or_else(|| (self.0.hbar * self.0.spacing / self.0.mass).sqrt()),
            sweeps,
            thermalization,
            seed,
            ..Default::default()
        };
        let ens = pm::metropolis_sample_chains(&self.0, &cfg, chains).map_err(err)?;
        Ok(PyPathEnsemble(ens))
    }
}

/// Sampled path ensemble.
#[pyclass(name = "PathEnsemble", frozen)]
struct PyPathEnsemble(pm::PathEnsemble);

#[pymethods]
impl PyPathEnsemble {
    /// `(<q^2>, error)`
    fn q2(&self) -> (f64, f64) {
        self.0.q2()
    }

    #[getter]
    fn acceptance(&self) -> f64 {
        self.0.acceptance_rate()
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.0.warnings.clone()
    }

    /// `(values, errors)` for lags `0..=max_lag`.
    fn correlator(&self, max_lag: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let c = pm::two_point(&self.0, &self.0.spec, max_lag).map_err(err)?;
        Ok((c.values, c.errors))
    }

    /// `(gap, error)` from the effective-mass plateau.
    fn gap(&self, max_lag: usize) -> PyResult<(f64, f64)> {
        let c = pm::two_point(&self.0, &self.0.spec, max_lag).map_err(err)?;
        let g = pm::energy_gap(&c, &pm::GapOptions::default()).map_err(err)?;
        Ok((g.gap, g.error))
    }
}

/// Free lattice field with Dirichlet time ends.
#[pyclass(name = "FreeField", frozen)]
struct PyFreeField(os::CovarianceOp);

impl PyFreeField {
    fn function(&self, values: Vec<f64>) -> PyResult<os::TestFunction> {
        os::TestFunction::new(self.0.lattice, values).map_err(err)
    }
}

#[pymethods]
impl PyFreeField {
    #[new]
    #[pyo3(signature = (time_sites, mass, spacing = 1.0, space_sites = 1))]
    fn new(time_sites: usize, mass: f64, spacing: f64, space_sites: usize) -> PyResult<Self> {
        let lat = os::Lattice::new(time_sites, space_sites, spacing).map_err(err)?;
        os::CovarianceOp::new(lat, mass).map(Self).map_err(err)
    }

    /// Times of the flat site order, `1 - T/2 ..= T/2` per slice.
    #[getter]
    fn times(&self) -> Vec<i64> {
        let lat = self.0.lattice;
        (0..lat.n_sites()).map(|i| lat.site(i).0).collect()
    }

    fn characteristic(&self, g: Vec<f64>) -> PyResult<f64> {
        self.0.characteristic(&self.function(g)?).map_err(err)
    }

    /// `(min_eigenvalue, hermiticity_error)` of the reflection Gram matrix.
    fn gram(&self, functions: Vec<Vec<f64>>) -> PyResult<(f64, f64)> {
        let fs = functions
            .into_iter()
            .map(|v| self.function(v))
            .collect::<PyResult<Vec<_>>>()?;
        let g = os::gram_matrix(&self.0, &fs, &fs, os::POSITIVITY_TOLERANCE).map_err(err)?;
        Ok((
            g.min_eigenvalue.unwrap_or(f64::NAN),
            g.hermiticity_error.unwrap_or(f64::NAN),
        ))
    }

    fn time_correlator(&self, t0: i64, max_lag: usize) -> PyResult<Vec<f64>> {
        self.0.time_correlator(t0, max_lag).map_err(err)
    }
}

/// Runs a named experiment and returns its manifest as JSON.
#[pyfunction]
#[pyo3(signature = (name, out_dir, params = Vec::new(), seed = 0))]
fn run_experiment(name: &str, out_dir: &str, params: Vec<(String, String)>, seed: u64) -> PyResult<String> {
    let exp = harness::Experiment::parse(name).ok_or_else(|| err(format!("unknown experiment {name:?}")))?;
    let cfg = harness::ExperimentConfig::new(exp, params.iter().map(|(k, v)| (k.as_str(), v.as_str())), seed, out_dir)
        .map_err(err)?;
    let m = harness::run_experiment(&cfg).map_err(err)?;
    harness::write_manifest(&m, true).map_err(err)?;
    Ok(m.to_json())
}

#[pymodule]
fn emergence(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemModel>()?;
    m.add_class::<PyEnsemble>()?;
    m.add_class::<PyFokkerPlanck>()?;
    m.add_class::<PyPathAction>()?;
    m.add_class::<PyPathEnsemble>()?;
    m.add_class::<PyFreeField>()?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
