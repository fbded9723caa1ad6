//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

mod common;

use emergence_core::classical::{hamilton_jacobi_refinement, linspace, ActionTable, ShootingOptions, SystemModel};
use emergence_core::fokker_planck::{
    chapman_kolmogorov_residual, evolve, langevin_crosscheck, stationary_density, Boundary, CrosscheckOptions,
    DensityField, FpOperator, Grid1D,
};
use emergence_core::harness::{run_experiment, Experiment, ExperimentConfig};
use emergence_core::os_field::{
    gram_matrix, wick_continue, CovarianceOp, EuclideanSeries, Lattice, TestFunction, WickOptions,
    POSITIVITY_TOLERANCE,
};
use emergence_core::path_measure::{
    classical_limit_scan, energy_gap, metropolis_sample_chains, two_point, DiscreteActionSpec, GapOptions,
    MetropolisConfig,
};
use emergence_core::rng::stream;
use emergence_core::stochastic::{
    action_ensemble, estimate_km_coefficients, simulate_ensemble_with, DriftField, NoiseSpec, PerturbationSpec,
    Recording,
};
use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

type Outcome = (bool, String);
type Criterion = (&'static str, fn() -> Outcome);

fn ac1_hamilton_jacobi() -> Outcome {
    let m = SystemModel::harmonic(1.0, 1.0);
    let opts = ShootingOptions::default();
    let table = ActionTable::build(&m, 0.3, 0.0, linspace(-1.0, 1.0, 32), linspace(0.6, 2.0, 32), &opts).unwrap();
    let r = hamilton_jacobi_refinement(&table, &m, &opts).unwrap();
    let (e0, e1) = r.energy.expect("closed system");
    let (hj, en) = (r.coarse_max / r.fine_max, e0 / e1);
    (
        hj >= 3.5 && en >= 3.5,
        format!(
            "HJ residual {:.3e} -> {:.3e} (ratio {hj:.2}), |dS/dt + E| {e0:.3e} -> {e1:.3e} (ratio {en:.2}), at nodes shared by both grids",
            r.coarse_max, r.fine_max
        ),
    )
}

fn ac2_kramers_moyal() -> Outcome {
    let (d, dt, t_end) = (0.5, 1e-3, 5.01);
    let noise = NoiseSpec::new(d, 0).unwrap();
    let drift = DriftField::Linear { gamma: 1.0 };
    let ens = simulate_ensemble_with(&drift, &noise, 0.0, t_end, dt, 10_000, &Recording::tail(t_end, dt, 1)).unwrap();
    let km = estimate_km_coefficients(&ens, 1, 20).unwrap();
    let max = |f: &dyn Fn(&emergence_core::stochastic::KmBin) -> f64| km.bins.iter().map(f).fold(0.0f64, f64::max);
    let z1 = max(&|b| (b.a1 + b.center).abs() / b.a1_se);
    let z2 = max(&|b| (b.a2 - 0.5).abs() / b.a2_se);
    let z3 = max(&|b| b.a3.abs() / b.a3_se);
    (
        !km.bins.is_empty() && z1 <= 3.0 && z2 <= 3.0 && z3 <= 3.0,
        format!(
            "{} bins; max z: a1 vs -x {z1:.2}, a2 vs 0.5 {z2:.2}, a3 vs 0 {z3:.2}",
            km.bins.len()
        ),
    )
}

fn ac3_stationary() -> Outcome {
    let (e, hbar) = (1.0, 0.1);
    let grid = Grid1D::new(0.0, 20.0 * hbar, 200, Boundary::ZeroFlux).unwrap();
    let op = FpOperator::new(grid, DriftField::Constant { value: e }, hbar * e).unwrap();
    let p = stationary_density(&op).unwrap();
    let z = 1.0 - (-20.0f64).exp();
    let l1: f64 = p
        .cell_masses()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let (a, b) = (grid.face(i), grid.face(i + 1));
            (m - ((-a / hbar).exp() - (-b / hbar).exp()) / z).abs()
        })
        .sum();
    (l1 < 1e-6, format!("L1 to exp(-S/hbar)/hbar = {l1:.3e}"))
}

fn ac4_langevin_vs_fp() -> Outcome {
    let (e, hbar, t) = (1.0, 0.1, 5.0);
    let spec = PerturbationSpec::new(e, hbar, 1e-3).unwrap();
    let n = 100_000;
    let ens = action_ensemble(&spec, t, n, 0, &Recording { start: t, stride: 1 }).unwrap();
    let d = hbar * e;
    let sigma = (2.0 * d * t).sqrt();
    let h = sigma / 50.0;
    let left = ((e * t + 8.0 * sigma) / h).ceil() as usize;
    let right = (8.0 * sigma / h).ceil() as usize;
    let cells = (left + 1 + right).div_ceil(20) * 20;
    let lower = -(left as f64 + 0.5) * h;
    let grid = Grid1D::new(lower, lower + cells as f64 * h, cells, Boundary::ZeroFlux).unwrap();
    let op = FpOperator::new(grid, DriftField::Constant { value: e }, d).unwrap();
    let opts = CrosscheckOptions {
        dt: 2e-3,
        coarsen: 20,
        max_outside: 1e-3,
    };
    let rep = langevin_crosscheck(&op, &ens, t, &opts).unwrap();
    let floor = 5.0 / (n as f64).sqrt();
    let bound = floor + rep.grid_error;
    (
        rep.l1 < bound,
        format!(
            "L1 = {:.4e} vs 5/sqrt(n) + grid error = {floor:.4e} + {:.3e}; {} bins",
            rep.l1,
            rep.grid_error,
            rep.histogram.len()
        ),
    )
}

fn ac5_chapman_kolmogorov() -> Outcome {
    let grid = Grid1D::new(-1.0, 1.0, 8, Boundary::ZeroFlux).unwrap();
    let op = FpOperator::new(grid, DriftField::Cubic { k: 2.0 }, 0.3).unwrap();
    let (dt, t) = (1e-2, 0.6);
    let residual = [t / 3.0, t / 2.0, 2.0 * t / 3.0]
        .iter()
        .map(|&mid| chapman_kolmogorov_residual(&op, 0.125, mid, t, dt).unwrap())
        .fold(0.0f64, f64::max);
    let (sub, diag, sup) = op.tridiagonal();
    let step = common::dense_step(&sub, &diag, &sup, dt);
    let start = DensityField::point_mass(grid, 0.125).unwrap();
    let mut dense = DVector::from_column_slice(&start.values);
    for _ in 0..60 {
        dense = &step * dense;
    }
    let lib = evolve(&op, &start, dt, 60).unwrap();
    let oracle: f64 = lib.values.iter().zip(dense.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>() * grid.width();
    (
        residual < 1e-8 && oracle < 1e-8,
        format!("composition residual {residual:.3e}; distance to dense matrix powers {oracle:.3e}"),
    )
}

fn ac6_path_observables() -> Outcome {
    let (n, a) = (64, 0.25);
    let spec = DiscreteActionSpec::harmonic(1.0, 1.0, 1.0, a).unwrap();
    let cfg = MetropolisConfig {
        n_slices: n,
        proposal_width: a.sqrt(),
        sweeps: 51_000,
        thermalization: 1_000,
        stride: 1,
        seed: 0,
        blocks: 128,
        store_paths: false,
    };
    let ens = metropolis_sample_chains(&spec, &cfg, 4).unwrap();
    let (q2, q2_err) = ens.q2();
    let q2_exact = common::harmonic_lattice_covariance(1.0, 1.0, 1.0, a, n)[(0, 0)];
    let gap_exact = (1.0 + 0.5 * a * a).acosh() / a;
    let gap = energy_gap(&two_point(&ens, &spec, 16).unwrap(), &GapOptions::default());
    let (gap_ok, gap_text) = match gap {
        Ok(g) => (
            (g.gap - gap_exact).abs() <= 3.0 * g.error,
            format!("gap {:.5} +- {:.5} vs {gap_exact:.5}", g.gap, g.error),
        ),
        Err(e) => (false, format!("gap: {e}")),
    };
    let q2_ok = (q2 - q2_exact).abs() <= 3.0 * q2_err;

    let (m, w, lambda, a4) = (1.0, 1.0, 1.0, 0.5);
    let tiny = DiscreteActionSpec::quartic(m, w, lambda, 1.0, a4).unwrap();
    let tiny_cfg = MetropolisConfig {
        n_slices: 4,
        proposal_width: 0.8,
        sweeps: 101_000,
        blocks: 64,
        ..cfg
    };
    let (t2, t2_err) = metropolis_sample_chains(&tiny, &tiny_cfg, 4).unwrap().q2();
    let v = |q: f64| 0.5 * m * w * w * q * q + lambda * q.powi(4);
    let quad = common::transfer_matrix_q2(v, m, 1.0, a4, 4, 5.0, 801);
    let tiny_ok = (t2 - quad).abs() <= 3.0 * t2_err;
    (
        q2_ok && gap_ok && tiny_ok,
        format!(
            "<q^2> {q2:.5} +- {q2_err:.5} vs {q2_exact:.5}; {gap_text}; {} measured sweeps; N=4 quartic {t2:.5} +- {t2_err:.5} vs quadrature {quad:.5}",
            ens.measurements()
        ),
    )
}

fn ac7_classical_limit() -> Outcome {
    let spec = DiscreteActionSpec::quartic(1.0, 1.0, 1.0, 1.0, 0.25).unwrap();
    let cfg = MetropolisConfig {
        n_slices: 64,
        proposal_width: 0.5,
        sweeps: 21_000,
        ..Default::default()
    };
    let r = classical_limit_scan(&spec, &cfg, &[1.0, 0.01]).unwrap();
    let (hi, lo) = (&r.entries[0], &r.entries[1]);
    let ratio = lo.q2 / hi.q2;
    (
        ratio < 0.05,
        format!(
            "quartic: <q^2> {:.4e} at hbar 1, {:.4e} at hbar 0.01, ratio {ratio:.4}",
            hi.q2, lo.q2
        ),
    )
}

fn scaled(cov_inv: &nalgebra::DMatrix<f64>, a: f64, f: TestFunction, target: f64) -> TestFunction {
    let v = DVector::from_column_slice(&f.values);
    let q = a * v.dot(&(cov_inv * &v));
    let s = (target / q).sqrt();
    f.axpy(s - 1.0, &f).unwrap()
}

fn ac8_reflection_positivity() -> Outcome {
    let (t_sites, a, mass) = (64, 1.0, 1.0);
    let lat = Lattice::time_only(t_sites, a).unwrap();
    let cov = CovarianceOp::new(lat, mass).unwrap();
    let inv = common::dirichlet_operator(t_sites, a, mass).try_inverse().unwrap();
    let mut min_eig = f64::INFINITY;
    let mut herm = 0.0f64;
    for set in 0..50u64 {
        let mut rng = stream(0, set);
        let size = 1 + set as usize % 8;
        let fs: Vec<TestFunction> = (0..size)
            .map(|_| {
                let f = TestFunction::random_positive(lat, 8, 0.5, &mut rng).unwrap();
                let target = 0.25 + 2.0 * rng.random::<f64>();
                scaled(&inv, a, f, target)
            })
            .collect();
        let g = gram_matrix(&cov, &fs, &fs, POSITIVITY_TOLERANCE).unwrap();
        min_eig = min_eig.min(g.min_eigenvalue.unwrap());
        herm = herm.max(g.hermiticity_error.unwrap());
    }

    let mut rng = stream(1, 0);
    let gs: Vec<TestFunction> = (0..20)
        .map(|_| {
            let f = TestFunction::random_positive(lat, 8, 0.5, &mut rng).unwrap();
            let shift = rng.random_range(0..12);
            let target = 0.25 + 2.0 * rng.random::<f64>();
            scaled(&inv, a, f.shifted(-shift, 0).unwrap(), target)
        })
        .collect();
    let mc = cov.characteristic_mc(&gs, 20_000, 2).unwrap();
    let worst_z = gs
        .iter()
        .zip(&mc)
        .map(|(g, (est, se))| {
            let v = DVector::from_column_slice(&g.values);
            let exact = (-0.5 * a * v.dot(&(&inv * &v))).exp();
            (est - exact).abs() / se
        })
        .fold(0.0f64, f64::max);
    (
        min_eig >= -1e-10 && herm <= 1e-12 && worst_z <= 3.0,
        format!(
            "50 sets: min eigenvalue {min_eig:.3e}, max |M - M^H| {herm:.1e}; characteristic MC worst z {worst_z:.2} over 20 functions"
        ),
    )
}

fn ac9_wick() -> Outcome {
    let (mass, a) = (1.0f64, 0.1);
    let sites = 2 * (20.0 / (mass * a)).ceil() as usize;
    let cov = CovarianceOp::new(Lattice::time_only(sites, a).unwrap(), mass).unwrap();
    let lags = (3.0 / (mass * a)).round() as usize;
    let c = cov.time_correlator(0, lags).unwrap();
    let taus: Vec<f64> = (0..=lags).map(|l| l as f64 * a).collect();
    let times: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
    let w = wick_continue(&EuclideanSeries::exact(taus, c), &times, &WickOptions::default()).unwrap();
    let worst = w
        .times
        .iter()
        .zip(&w.values)
        .map(|(t, z)| {
            let exact = Complex64::new(0.0, -mass * t).exp() / (2.0 * mass);
            (z - exact).norm() * 2.0 * mass
        })
        .fold(0.0f64, f64::max);
    let rel = (w.mass - mass).abs() / mass;
    (
        rel <= 0.02,
        format!(
            "fitted M = {:.6} ({:.3}% off); max |C(it) - exp(-imt)/2m| * 2m = {worst:.3e} on t in [0, 5]",
            w.mass,
            100.0 * rel
        ),
    )
}

fn reduced(exp: Experiment) -> Vec<(&'static str, &'static str)> {
    match exp {
        Experiment::Classical => vec![("hj-grid", "12x12"), ("t-end", "2")],
        Experiment::Langevin => vec![("n-traj", "2000")],
        Experiment::FokkerPlanck => vec![("steps", "500")],
        Experiment::PathMc => vec![("sweeps", "4000"), ("therm", "500")],
        Experiment::OsCheck => vec![("lattice", "16"), ("n-test-functions", "10"), ("draws", "2000"), ("mc-functions", "5")],
        Experiment::Pipeline => vec![("n-traj", "2000"), ("sweeps", "4000")],
    }
}

fn csv_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "csv").then(|| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        })
        .collect()
}

fn ac10_determinism() -> Outcome {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let mut files = 0;
    let mut mismatched = Vec::new();
    for exp in Experiment::ALL {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let run = |dir: &Path| run_experiment(&ExperimentConfig::new(exp, reduced(exp), 7, dir).unwrap()).unwrap();
        let ma = run(a.path());
        // The rerun uses a single worker thread.
        let mb = single.install(|| run(b.path()));
        let (ba, bb) = (csv_bytes(a.path()), csv_bytes(b.path()));
        files += ba.len();
        if ba.is_empty() || ba != bb || ma.outputs != mb.outputs {
            mismatched.push(exp.name());
        }
    }
    (
        mismatched.is_empty(),
        if mismatched.is_empty() {
            format!("{files} CSV files byte-identical across reruns of all 6 experiments")
        } else {
            format!("outputs differ for {}", mismatched.join(", "))
        },
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1 hamilton-jacobi", ac1_hamilton_jacobi),
        ("AC2 kramers-moyal", ac2_kramers_moyal),
        ("AC3 fokker-planck-stationary", ac3_stationary),
        ("AC4 langevin-fokker-planck", ac4_langevin_vs_fp),
        ("AC5 chapman-kolmogorov", ac5_chapman_kolmogorov),
        ("AC6 path-observables", ac6_path_observables),
        ("AC7 classical-limit", ac7_classical_limit),
        ("AC8 reflection-positivity", ac8_reflection_positivity),
        ("AC9 wick-continuation", ac9_wick),
        ("AC10 determinism", ac10_determinism),
    ];
    let mut failed = 0;
    for (name, run) in criteria {
        let start = Instant::now();
        let (ok, detail) = run();
        failed += !ok as usize;
        println!(
            "{} {name}: {detail} [{:.1}s]",
            if ok { "PASS" } else { "FAIL" },
            start.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
