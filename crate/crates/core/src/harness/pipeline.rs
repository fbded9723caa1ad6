//! The five-stage chain from classical mechanics to the field-theory checks.

use super::experiments::{hj_rows, path_mc_run, positivity_sets, ratio_check, wick_check};
use super::output::{svg_plot, Cell, Csv, OutputSet, Series};
use super::{
    run_experiment, write_manifest, Check, Context, Experiment, ExperimentConfig, HarnessError, Params, RunManifest,
    StageRecord, StageStatus,
};
use crate::classical::{hamilton_jacobi_refinement, linspace, ActionTable, ShootingOptions, SystemModel};
use crate::fokker_planck::{
    langevin_crosscheck, stationary_dual, Boundary, CrosscheckOptions, FpOperator, Grid1D,
};
use crate::os_field::{CovarianceOp, Lattice};
use crate::path_measure::{DiscreteActionSpec, MetropolisConfig};
use crate::stats::mean_se;
use crate::stochastic::{action_ensemble, EnsembleSample, PerturbationSpec, Recording};
use std::path::Path;

pub(crate) const FAULTS: [&str; 6] = ["none", "classical", "stochastic", "fokker-planck", "path-mc", "os-check"];

const STAGES: [&str; 5] = ["1-classical", "2-action", "3-fokker-planck", "4-path", "5-os"];

enum Outcome {
    Ran(Result<Vec<Check>, HarnessError>),
    Skipped(String),
}

fn record(name: &str, outcome: Outcome, checks: &mut Vec<Check>, stages: &mut Vec<StageRecord>) {
    let (status, reason) = match outcome {
        Outcome::Skipped(reason) => (StageStatus::Skipped, reason),
        Outcome::Ran(Err(e)) => {
            checks.push(Check::new(&format!("{name}/error"), false, e.to_string()));
            (StageStatus::Failed, e.to_string())
        }
        Outcome::Ran(Ok(cs)) => {
            let failed: Vec<String> = cs.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
            checks.extend(cs.into_iter().map(|c| Check {
                name: format!("{name}/{}", c.name),
                ..c
            }));
            if failed.is_empty() {
                (StageStatus::Passed, "all checks passed".to_string())
            } else {
                (StageStatus::Failed, format!("failed: {}", failed.join(", ")))
            }
        }
    };
    stages.push(StageRecord {
        name: name.to_string(),
        status,
        reason,
    });
}

fn injected(fault: &str, stage: &str) -> Result<(), HarnessError> {
    if fault == stage {
        Err(HarnessError::Module {
            context: format!("stage {stage}"),
            message: "injected fault".into(),
        })
    } else {
        Ok(())
    }
}

fn stage_classical(out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let model = SystemModel::harmonic(1.0, 1.0);
    let opts = ShootingOptions::default();
    let table = ActionTable::build(&model, 0.3, 0.0, linspace(-1.0, 1.0, 16), linspace(0.6, 2.0, 16), &opts)
        .context("action table")?;
    let r = hamilton_jacobi_refinement(&table, &model, &opts).context("refined action table")?;
    out.csv("1_hj_residual.csv", hj_rows(&r.coarse))?;
    Ok(vec![ratio_check("hj_convergence", r.coarse_max, r.fine_max)])
}

fn stage_action(
    spec: &PerturbationSpec,
    t_end: f64,
    n_traj: usize,
    seed: u64,
    out: &mut OutputSet,
) -> Result<(Vec<Check>, EnsembleSample), HarnessError> {
    let ens = action_ensemble(spec, t_end, n_traj, seed, &Recording { start: t_end, stride: 1 })
        .context("action ensemble")?;
    let finals = ens.column(ens.times.len() - 1);
    let t = *ens.times.last().expect("one recorded time");
    let (mean, mean_se) = mean_se(&finals);
    let var = crate::stats::variance(&finals);
    let (mean_exact, var_exact) = (-spec.energy * t, 2.0 * spec.diffusion() * t);

    let mut csv = Csv::new(&["quantity", "value", "stderr", "expected"]);
    csv.row(&[Cell::S("mean".into()), Cell::F(mean), Cell::F(mean_se), Cell::F(mean_exact)]);
    let n = finals.len() as f64;
    let var_se = var * (2.0 / (n - 1.0)).sqrt();
    csv.row(&[Cell::S("variance".into()), Cell::F(var), Cell::F(var_se), Cell::F(var_exact)]);
    out.csv("2_action_moments.csv", csv)?;

    let checks = if spec.hbar == 0.0 {
        let spread = finals.iter().map(|x| (x - mean_exact).abs()).fold(0.0f64, f64::max);
        vec![Check::new(
            "deterministic",
            spread <= 1e-9 * mean_exact.abs().max(1.0),
            format!("max |S - (-E t)| = {spread:.3e} without noise"),
        )]
    } else {
        let zm = (mean - mean_exact).abs() / mean_se;
        let zv = (var - var_exact).abs() / var_se;
        vec![
            Check::new(
                "mean_drift",
                zm <= 3.0,
                format!("<S> = {mean:.5} +- {mean_se:.5}, expected {mean_exact:.5} ({zm:.2} se)"),
            ),
            Check::new(
                "variance_growth",
                zv <= 3.0,
                format!("var S = {var:.5} +- {var_se:.5}, expected {var_exact:.5} ({zv:.2} se)"),
            ),
        ]
    };
    Ok((checks, ens))
}

fn stage_fokker_planck(
    spec: &PerturbationSpec,
    ens: &EnsembleSample,
    out: &mut OutputSet,
) -> Result<Vec<Check>, HarnessError> {
    let (e, hbar, d) = (spec.energy, spec.hbar, spec.diffusion());
    let mut checks = Vec::new();

    // Stationary density on a box: exp(-x / hbar) up to normalisation.
    let n = 200;
    let box_grid = Grid1D::new(0.0, 20.0 * hbar, n, Boundary::ZeroFlux).context("grid")?;
    let op = FpOperator::new(box_grid, spec.drift(), d).context("operator")?;
    let rep = stationary_dual(&op).context("stationary density")?;
    let z = 1.0 - (-20.0f64).exp();
    let l1: f64 = rep
        .generator
        .cell_masses()
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let (a, b) = (box_grid.face(i), box_grid.face(i + 1));
            (m - ((-a / hbar).exp() - (-b / hbar).exp()) / z).abs()
        })
        .sum();
    checks.push(Check::new(
        "stationary_exp",
        l1 < 1e-6,
        format!("L1 to exp(-S/hbar) = {l1:.3e}, routes differ by {:.3e}", rep.max_discrepancy),
    ));

    // Transition density against the ensemble.
    let t = *ens.times.last().expect("one recorded time");
    let sigma = (2.0 * d * t).sqrt();
    let h = sigma / 50.0;
    let left = ((e * t + 8.0 * sigma) / h).ceil() as usize;
    let right = (8.0 * sigma / h).ceil() as usize;
    let cells = (left + 1 + right).div_ceil(20) * 20;
    let lower = -(left as f64 + 0.5) * h;
    let grid = Grid1D::new(lower, lower + cells as f64 * h, cells, Boundary::ZeroFlux).context("grid")?;
    let op = FpOperator::new(grid, spec.drift(), d).context("operator")?;
    let opts = CrosscheckOptions {
        dt: 2e-3,
        coarsen: 20,
        max_outside: 1e-3,
    };
    let rep = langevin_crosscheck(&op, ens, t, &opts).context("Langevin cross-check")?;
    let bound = 5.0 * rep.mc_floor + rep.grid_error;
    let mut csv = Csv::new(&["bin_lo", "bin_hi", "histogram", "fokker_planck"]);
    for (k, (hh, f)) in rep.histogram.iter().zip(&rep.evolved).enumerate() {
        csv.row(&[Cell::F(rep.bin_edges[k]), Cell::F(rep.bin_edges[k + 1]), Cell::F(*hh), Cell::F(*f)]);
    }
    out.csv("3_crosscheck.csv", csv)?;
    let mid = |k: usize| 0.5 * (rep.bin_edges[k] + rep.bin_edges[k + 1]);
    out.svg(
        "3_crosscheck.svg",
        svg_plot(
            "Action density at t_end",
            "S",
            "bin mass",
            &[
                Series::markers("Langevin", rep.histogram.iter().enumerate().map(|(k, v)| (mid(k), *v)).collect()),
                Series::line("Fokker-Planck", rep.evolved.iter().enumerate().map(|(k, v)| (mid(k), *v)).collect()),
            ],
        ),
    )?;
    checks.push(Check::new(
        "langevin_vs_fokker_planck",
        rep.l1 <= bound,
        format!(
            "L1 = {:.4e} vs bound {bound:.4e} (5/sqrt(n) = {:.3e}, grid error {:.3e}); {} of {} samples outside",
            rep.l1,
            5.0 * rep.mc_floor,
            rep.grid_error,
            rep.outside,
            rep.n_samples
        ),
    ));
    Ok(checks)
}

fn stage_path(hbar: f64, sweeps: usize, seed: u64, out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let a = 0.25;
    let spec = DiscreteActionSpec::harmonic(1.0, 1.0, hbar, a).context("action spec")?;
    let cfg = MetropolisConfig {
        n_slices: 64,
        proposal_width: (hbar * a).sqrt(),
        sweeps: sweeps + 1000,
        thermalization: 1000,
        stride: 1,
        seed,
        blocks: 128,
        store_paths: false,
    };
    Ok(path_mc_run(&spec, &cfg, 4, 16, "4_", out)?.checks)
}

fn stage_os(seed: u64, out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let lat = Lattice::new(16, 4, 1.0).context("lattice")?;
    let cov = CovarianceOp::new(lat, 1.0).context("covariance")?;
    let (csv, mut checks) = positivity_sets(&cov, 10, 4, 4, 1e-10, seed)?;
    out.csv("5_os_report.csv", csv)?;
    checks.push(wick_check(1.0, 0.1, out, "5_wick.csv")?);
    Ok(checks)
}

pub(crate) fn run(p: &Params, seed: u64, out: &mut OutputSet) -> Result<(Vec<Check>, Vec<StageRecord>), HarnessError> {
    let (energy, hbar) = (p.f64("energy")?, p.f64("hbar")?);
    let fault = p.choice("inject-fault", &FAULTS)?;
    let spec = PerturbationSpec::new(energy, hbar, 1e-3).map_err(|e| HarnessError::Usage(e.to_string()))?;
    let (n_traj, t_end, sweeps) = (p.usize("n-traj")?, p.f64("t-end")?, p.usize("sweeps")?);
    let (mut checks, mut stages) = (Vec::new(), Vec::new());

    let r = injected(&fault, "classical").and_then(|_| stage_classical(out));
    record(STAGES[0], Outcome::Ran(r), &mut checks, &mut stages);

    let r = injected(&fault, "stochastic").and_then(|_| stage_action(&spec, t_end, n_traj, seed, out));
    let ensemble = match r {
        Ok((cs, ens)) => {
            record(STAGES[1], Outcome::Ran(Ok(cs)), &mut checks, &mut stages);
            Some(ens)
        }
        Err(e) => {
            record(STAGES[1], Outcome::Ran(Err(e)), &mut checks, &mut stages);
            None
        }
    };

    let outcome = match (&ensemble, hbar == 0.0) {
        (_, true) => Outcome::Skipped("no diffusion: stationary density does not exist (hbar = 0)".into()),
        (None, false) => Outcome::Skipped("needs the action ensemble of stage 2".into()),
        (Some(ens), false) => {
            Outcome::Ran(injected(&fault, "fokker-planck").and_then(|_| stage_fokker_planck(&spec, ens, out)))
        }
    };
    record(STAGES[2], outcome, &mut checks, &mut stages);

    let outcome = if hbar == 0.0 {
        Outcome::Skipped("hbar = 0: the path measure collapses onto the classical path".into())
    } else {
        Outcome::Ran(injected(&fault, "path-mc").and_then(|_| stage_path(hbar, sweeps, seed, out)))
    };
    record(STAGES[3], outcome, &mut checks, &mut stages);

    let r = injected(&fault, "os-check").and_then(|_| stage_os(seed, out));
    record(STAGES[4], Outcome::Ran(r), &mut checks, &mut stages);
    Ok((checks, stages))
}

/// Runs the pipeline with default parameters and writes `manifest.json`.
pub fn emergence_pipeline(seed: u64, out_dir: &Path) -> Result<RunManifest, HarnessError> {
    let cfg = ExperimentConfig::new(Experiment::Pipeline, [], seed, out_dir)?;
    let manifest = run_experiment(&cfg)?;
    write_manifest(&manifest, true)?;
    Ok(manifest)
}
