use super::output::{svg_plot, Cell, Csv, OutputSet, Series};
use super::{Check, Context, HarnessError, Params};
use crate::classical::{
    energy_series, hamilton_jacobi_refinement, hamilton_jacobi_residual, integrate_hamilton, linspace, ActionTable, HjResidual, PhaseState, Potential,
    ShootingOptions, SystemModel,
};
use crate::fokker_planck::{evolve, stationary_dual, Boundary, DensityField, FpOperator, Grid1D};
use crate::os_field::{
    gram_matrix, time_reflect, translation_covariance_check, wick_continue, CovarianceOp, EuclideanSeries, Lattice,
    Shift, TestFunction, WickOptions,
};
use crate::path_measure::{
    energy_gap, harmonic_lattice_correlator, harmonic_lattice_gap, harmonic_lattice_q2, metropolis_sample_chains,
    two_point, DiscreteActionSpec, GapOptions, MetropolisConfig,
};
use crate::rng::stream;
use crate::stochastic::{estimate_km_coefficients, simulate_ensemble_with, DriftField, NoiseSpec, Recording};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

/// Seed offset separating Monte-Carlo draws from other random streams.
pub(crate) const DRAW_SEED_OFFSET: u64 = 0x9e37_79b9_7f4a_7c15;

pub(crate) fn drift_from(p: &Params) -> Result<DriftField, HarnessError> {
    let g = p.f64("gamma")?;
    Ok(match p.choice("drift", &["zero", "linear", "cubic", "constant"])?.as_str() {
        "zero" => DriftField::Zero,
        "linear" => DriftField::Linear { gamma: g },
        "cubic" => DriftField::Cubic { k: g },
        _ => DriftField::Constant { value: g },
    })
}

pub(crate) fn hj_rows(hj: &HjResidual) -> Csv {
    let mut csv = Csv::new(&["q", "t", "S", "dSdq", "dSdt", "residual"]);
    for n in &hj.nodes {
        csv.row(&[
            Cell::F(n.q),
            Cell::F(n.t),
            Cell::F(n.action),
            Cell::F(n.ds_dq),
            Cell::F(n.ds_dt),
            Cell::F(n.residual),
        ]);
    }
    csv
}

/// Convergence ratio check; residuals at round-off level count as exact.
pub(crate) fn ratio_check(name: &str, coarse: f64, fine: f64) -> Check {
    if coarse < 1e-9 {
        return Check::new(name, true, format!("residual {coarse:.3e} is at round-off level"));
    }
    let ratio = coarse / fine;
    Check::new(
        name,
        ratio >= 3.5,
        format!("max residual {coarse:.4e} -> {fine:.4e} at shared nodes under 2x refinement, ratio {ratio:.3} (need >= 3.5)"),
    )
}

pub(crate) fn classical(p: &Params, out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let mass = p.f64("mass")?;
    let potential = match p.choice("system", &["free", "harmonic", "quartic"])?.as_str() {
        "free" => Potential::Free,
        "harmonic" => Potential::Harmonic { omega: p.f64("omega")? },
        _ => Potential::Quartic { lambda: p.f64("lambda")? },
    };
    let model = SystemModel::new(vec![mass], potential).context("system model")?;
    let q0 = p.f64("q0")?;
    let mut checks = Vec::new();

    let traj = integrate_hamilton(&model, &PhaseState::scalar(q0, p.f64("p0")?, 0.0), p.f64("t-end")?, p.f64("dt")?)
        .context("trajectory")?;
    let energy = energy_series(&model, &traj);
    let scale = energy.values[0].abs().max(1e-300);
    checks.push(Check::new(
        "energy_conservation",
        energy.max_drift <= 1e-4 * scale,
        format!("max |H - H0| = {:.3e} (H0 = {:.6})", energy.max_drift, energy.values[0]),
    ));
    let mut csv = Csv::new(&["t", "q", "p", "energy"]);
    for (s, h) in traj.states.iter().zip(&energy.values) {
        csv.row(&[Cell::F(s.t), Cell::F(s.q[0]), Cell::F(s.p[0]), Cell::F(*h)]);
    }
    out.csv("trajectory.csv", csv)?;
    let drift: Vec<(f64, f64)> = energy
        .times
        .iter()
        .zip(&energy.values)
        .map(|(t, h)| (*t, h - energy.values[0]))
        .collect();
    out.svg("energy.svg", svg_plot("Energy drift", "t", "H - H0", &[Series::line("leapfrog", drift)]))?;

    let (nq, nt) = p.dims("hj-grid")?;
    let (qlo, qhi) = p.range("q-range")?;
    let (tlo, thi) = p.range("t-range")?;
    let opts = ShootingOptions::default();
    let table = ActionTable::build(&model, q0, 0.0, linspace(qlo, qhi, nq), linspace(tlo, thi, nt), &opts)
        .context("action table")?;
    let refinement = if p.bool("refine")? {
        Some(hamilton_jacobi_refinement(&table, &model, &opts).context("refined action table")?)
    } else {
        None
    };
    let hj = match &refinement {
        Some(r) => r.coarse.clone(),
        None => hamilton_jacobi_residual(&table, &model).context("Hamilton-Jacobi residual")?,
    };
    out.csv(p.raw("out"), hj_rows(&hj))?;
    let rows: Vec<(f64, f64)> = (0..nt)
        .map(|it| (table.ts[it], table.action[table.index(nq / 2, it)]))
        .collect();
    out.svg(
        "action.svg",
        svg_plot("On-shell action at mid-table q", "t", "S", &[Series::markers("S(q_mid, t)", rows)]),
    )?;
    let res = hj.max_interior;
    checks.push(Check::new("hj_residual_finite", res.is_finite(), format!("max interior residual {res:.4e}")));
    if let Some(r) = &refinement {
        checks.push(ratio_check("hj_convergence", r.coarse_max, r.fine_max));
        if let Some((a, b)) = r.energy {
            checks.push(ratio_check("energy_gradient_convergence", a, b));
        }
    }
    Ok(checks)
}

pub(crate) fn langevin(p: &Params, seed: u64, out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let drift = drift_from(p)?;
    let d = p.f64("diffusion")?;
    let noise = NoiseSpec::new(d, seed).context("noise")?;
    let (dt, t_end) = (p.f64("dt")?, p.f64("t-end")?);
    let rec = Recording::tail(t_end, dt, p.usize("km-window")?);
    let ens = simulate_ensemble_with(&drift, &noise, p.f64("x0")?, t_end, dt, p.usize("n-traj")?, &rec)
        .context("Langevin ensemble")?;
    let km = estimate_km_coefficients(&ens, 1, p.usize("km-bins")?).context("Kramers-Moyal estimate")?;

    let mut csv = Csv::new(&["bin_center", "a1", "a1_se", "a2", "a2_se", "a3", "a3_se", "count"]);
    for b in &km.bins {
        csv.row(&[
            Cell::F(b.center),
            Cell::F(b.a1),
            Cell::F(b.a1_se),
            Cell::F(b.a2),
            Cell::F(b.a2_se),
            Cell::F(b.a3),
            Cell::F(b.a3_se),
            Cell::U(b.count),
        ]);
    }
    out.csv(p.raw("out"), csv)?;
    out.svg(
        "km_coefficients.svg",
        svg_plot(
            "Kramers-Moyal drift",
            "x",
            "a1",
            &[
                Series::markers("estimate", km.bins.iter().map(|b| (b.center, b.a1)).collect()),
                Series::line("-beta(x)", km.bins.iter().map(|b| (b.center, -drift.beta(b.center))).collect()),
            ],
        ),
    )?;

    let worst = |f: &dyn Fn(&crate::stochastic::KmBin) -> f64| km.bins.iter().map(f).fold(0.0f64, f64::max);
    let z1 = worst(&|b| (b.a1 + drift.beta(b.center)).abs() / b.a1_se);
    let z2 = worst(&|b| (b.a2 - d).abs() / b.a2_se);
    let z3 = worst(&|b| b.a3.abs() / b.a3_se);
    let n_bins = km.bins.len();
    Ok(vec![
        Check::new("km_bins", n_bins > 0, format!("{n_bins} bins reported")),
        Check::new("km_drift", n_bins > 0 && z1 <= 3.0, format!("max |a1 + beta| / se = {z1:.3}")),
        Check::new("km_diffusion", n_bins > 0 && z2 <= 3.0, format!("max |a2 - D| / se = {z2:.3}")),
        Check::new("km_third", n_bins > 0 && z3 <= 3.0, format!("max |a3| / se = {z3:.3}")),
        Check::new(
            "ensemble_quality",
            ens.quality.excluded_fraction() <= 1e-3,
            format!("{} of {} trajectories diverged", ens.quality.diverged, ens.quality.requested),
        ),
    ])
}

pub(crate) fn density_csv(rho: &DensityField) -> Csv {
    let mut csv = Csv::new(&["x", "density"]);
    for (i, v) in rho.values.iter().enumerate() {
        csv.row(&[Cell::F(rho.grid.center(i)), Cell::F(*v)]);
    }
    csv
}

pub(crate) fn fokker_planck(p: &Params, out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let (lo, hi, n) = p.grid("grid")?;
    let bc = match p.choice("bc", &["zeroflux", "absorbing"])?.as_str() {
        "zeroflux" => Boundary::ZeroFlux,
        _ => Boundary::Absorbing,
    };
    let grid = Grid1D::new(lo, hi, n, bc).context("grid")?;
    let op = FpOperator::new(grid, drift_from(p)?, p.f64("diffusion")?).context("operator")?;
    let mut checks = Vec::new();
    let rho = if p.bool("stationary")? {
        let rep = stationary_dual(&op).context("stationary density")?;
        checks.push(Check::new(
            "stationary_routes_agree",
            rep.max_discrepancy <= 1e-8,
            format!("generator vs quadrature: {:.3e}", rep.max_discrepancy),
        ));
        let peak = rep.generator.values.iter().fold(0.0f64, |a, b| a.max(*b));
        checks.push(Check::new(
            "zero_flux",
            rep.max_flux <= 1e-10 * peak.max(1.0),
            format!("max |J| = {:.3e}", rep.max_flux),
        ));
        rep.generator
    } else {
        let start = DensityField::point_mass(grid, p.f64("x0")?).context("initial density")?;
        let rho = evolve(&op, &start, p.f64("dt")?, p.usize("steps")?).context("evolution")?;
        let mass = rho.mass();
        checks.push(match bc {
            Boundary::ZeroFlux => Check::new(
                "mass_conservation",
                (mass - 1.0).abs() <= 1e-10,
                format!("mass {mass:.15}"),
            ),
            Boundary::Absorbing => Check::new("mass_bounded", mass <= 1.0 + 1e-12, format!("mass {mass:.15}")),
        });
        checks.push(Check::new(
            "non_negative",
            rho.values.iter().all(|v| *v >= 0.0),
            format!("{} round-off clamps", rho.clamped),
        ));
        rho
    };
    out.csv(p.raw("out"), density_csv(&rho))?;
    out.svg(
        "density.svg",
        svg_plot(
            "Fokker-Planck density",
            "x",
            "P",
            &[Series::line(
                op.drift.name(),
                rho.values.iter().enumerate().map(|(i, v)| (grid.center(i), *v)).collect(),
            )],
        ),
    )?;
    Ok(checks)
}

pub(crate) struct PathMcResult {
    pub checks: Vec<Check>,
}

pub(crate) fn path_mc_run(
    spec: &DiscreteActionSpec,
    cfg: &MetropolisConfig,
    chains: usize,
    max_lag: usize,
    prefix: &str,
    out: &mut OutputSet,
) -> Result<PathMcResult, HarnessError> {
    let ens = metropolis_sample_chains(spec, cfg, chains).context("Metropolis sampler")?;
    let corr = two_point(&ens, spec, max_lag).context("two-point function")?;
    let gap = energy_gap(&corr, &GapOptions::default());
    let (q2, q2_se) = ens.q2();

    let mut csv = Csv::new(&["lag", "corr", "stderr"]);
    for (l, (c, e)) in corr.values.iter().zip(&corr.errors).enumerate() {
        csv.row(&[Cell::U(l), Cell::F(*c), Cell::F(*e)]);
    }
    out.csv(&format!("{prefix}correlator.csv"), csv)?;
    let mut summary = Csv::new(&["observable", "value", "stderr"]);
    summary.row(&[Cell::S("q2".into()), Cell::F(q2), Cell::F(q2_se)]);
    if let Ok(g) = &gap {
        summary.row(&[Cell::S("gap".into()), Cell::F(g.gap), Cell::F(g.error)]);
    }
    summary.row(&[Cell::S("acceptance".into()), Cell::F(ens.acceptance_rate()), Cell::F(0.0)]);
    summary.row(&[Cell::S("tau_int".into()), Cell::F(ens.autocorrelation_time()), Cell::F(f64::NAN)]);
    out.csv(&format!("{prefix}summary.csv"), summary)?;

    let mut series = vec![Series::markers(
        "Monte Carlo",
        corr.times().into_iter().zip(corr.values.iter().copied()).collect(),
    )];
    if let Some(exact) = (0..corr.values.len())
        .map(|l| harmonic_lattice_correlator(spec, cfg.n_slices, l).map(|c| (l as f64 * spec.spacing, c)))
        .collect::<Option<Vec<_>>>()
    {
        series.push(Series::line("exact lattice", exact));
    }
    out.svg(
        &format!("{prefix}correlator.svg"),
        svg_plot("Euclidean two-point function", "tau", "C(tau)", &series),
    )?;

    let rate = ens.acceptance_rate();
    let mut checks = vec![Check::new(
        "acceptance",
        (0.2..=0.8).contains(&rate),
        format!("acceptance {rate:.3}, tau_int {:.2}", ens.autocorrelation_time()),
    )];
    for w in &ens.warnings {
        checks.push(Check::new("sampler_warning", false, w.clone()));
    }
    match &gap {
        Ok(g) => checks.push(Check::new(
            "gap_plateau",
            true,
            format!("gap {:.5} +- {:.5} over lags {:?}, chi2/dof {:.2}", g.gap, g.error, g.window, g.chi2_dof),
        )),
        Err(e) => checks.push(Check::new("gap_plateau", false, e.to_string())),
    }
    if let (Some(q2_exact), Some(gap_exact)) = (harmonic_lattice_q2(spec, cfg.n_slices), harmonic_lattice_gap(spec)) {
        let z = (q2 - q2_exact).abs() / q2_se;
        checks.push(Check::new(
            "q2_vs_lattice",
            z <= 3.0,
            format!("<q^2> = {q2:.5} +- {q2_se:.5}, exact {q2_exact:.5} ({z:.2} se)"),
        ));
        if let Ok(g) = &gap {
            let z = (g.gap - gap_exact).abs() / g.error;
            checks.push(Check::new(
                "gap_vs_lattice",
                z <= 3.0,
                format!("gap {:.5} +- {:.5}, exact {gap_exact:.5} ({z:.2} se)", g.gap, g.error),
            ));
        }
    }
    Ok(PathMcResult { checks })
}

pub(crate) fn path_mc(p: &Params, seed: u64, out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let (m, omega, hbar, a) = (p.f64("m")?, p.f64("omega")?, p.f64("hbar")?, p.f64("spacing")?);
    let spec = match p.choice("potential", &["harmonic", "quartic"])?.as_str() {
        "harmonic" => DiscreteActionSpec::harmonic(m, omega, hbar, a),
        _ => DiscreteActionSpec::quartic(m, omega, p.f64("lambda")?, hbar, a),
    }
    .context("action spec")?;
    let cfg = MetropolisConfig {
        n_slices: p.usize("n-slices")?,
        proposal_width: (hbar * a / m).sqrt(),
        sweeps: p.usize("sweeps")?,
        thermalization: p.usize("therm")?,
        stride: p.usize("stride")?,
        seed,
        blocks: 128,
        store_paths: false,
    };
    let stem = p.raw("out").trim_end_matches(".csv");
    let prefix = stem.strip_suffix("correlator").unwrap_or("");
    let prefix = if prefix.is_empty() && stem != "correlator" {
        format!("{stem}_")
    } else {
        prefix.to_string()
    };
    Ok(path_mc_run(&spec, &cfg, p.usize("chains")?, p.usize("max-lag")?, &prefix, out)?.checks)
}

/// Random function on `t in [-3, 4]` normalised to `<g, C g>` in
/// `[0.25, 2.25]`.
pub(crate) fn random_probe<R: Rng + ?Sized>(cov: &CovarianceOp, rng: &mut R) -> Result<TestFunction, HarnessError> {
    let lat = cov.lattice;
    let mut g = TestFunction::zeros(lat);
    for t in -3..=4 {
        for x in 0..lat.space_sites {
            if let Some(i) = lat.index(t, x) {
                if rng.random::<f64>() < 0.5 {
                    g.values[i] = rng.sample(StandardNormal);
                }
            }
        }
    }
    if g.values.iter().all(|v| *v == 0.0) {
        let i = lat.index(1, 0).expect("t = 1 exists");
        g.values[i] = 1.0;
    }
    let q = cov.bilinear(&g, &g).context("probe norm")?;
    let target: f64 = 0.5 + rng.random::<f64>();
    let s = target / q.sqrt();
    g.values.iter_mut().for_each(|v| *v *= s);
    Ok(g)
}

pub(crate) fn positivity_sets(
    cov: &CovarianceOp,
    n_sets: usize,
    max_size: usize,
    support: i64,
    tolerance: f64,
    seed: u64,
) -> Result<(Csv, Vec<Check>), HarnessError> {
    let mut csv = Csv::new(&["set_id", "size", "min_eigenvalue", "certified"]);
    let (mut certified, mut worst_eig, mut worst_herm) = (0usize, f64::INFINITY, 0.0f64);
    for set in 0..n_sets {
        let size = 1 + set % max_size.max(1);
        let mut rng = stream(seed, set as u64);
        let fs: Vec<TestFunction> = (0..size)
            .map(|_| TestFunction::random_positive(cov.lattice, support, 0.5, &mut rng))
            .collect::<Result<_, _>>()
            .context("test functions")?;
        let g = gram_matrix(cov, &fs, &fs, tolerance).context("Gram matrix")?;
        let eig = g.min_eigenvalue.unwrap_or(f64::NAN);
        worst_eig = worst_eig.min(eig);
        worst_herm = worst_herm.max(g.hermiticity_error.unwrap_or(f64::INFINITY));
        certified += g.certified as usize;
        csv.row(&[Cell::U(set), Cell::U(size), Cell::F(eig), Cell::B(g.certified)]);
    }
    Ok((
        csv,
        vec![
            Check::new(
                "reflection_positivity",
                certified == n_sets,
                format!("{certified}/{n_sets} sets certified, smallest eigenvalue {worst_eig:.3e}"),
            ),
            Check::new("gram_hermitian", worst_herm <= 1e-12, format!("max |M - M^dagger| = {worst_herm:.3e}")),
        ],
    ))
}

/// Fits the free lattice correlator at spacing `a` and continues it.
pub(crate) fn wick_check(mass: f64, a: f64, out: &mut OutputSet, name: &str) -> Result<Check, HarnessError> {
    let half = ((20.0 / (mass * a)).ceil() as usize).max(8);
    let lat = Lattice::time_only(2 * half, a).context("continuation lattice")?;
    let cov = CovarianceOp::new(lat, mass).context("continuation covariance")?;
    let max_lag = ((3.0 / (mass * a)).round() as usize).max(2);
    let c = cov.time_correlator(0, max_lag).context("lattice correlator")?;
    let taus: Vec<f64> = (0..=max_lag).map(|l| l as f64 * a).collect();
    let times: Vec<f64> = (0..=20).map(|k| 0.25 * k as f64).collect();
    let w = wick_continue(&EuclideanSeries::exact(taus, c), &times, &WickOptions::default())
        .context("Wick continuation")?;
    let mut csv = Csv::new(&["t", "re", "im", "continuum_re", "continuum_im"]);
    let mut worst = 0.0f64;
    for (t, z) in w.times.iter().zip(&w.values) {
        let exact = Complex64::new(0.0, -mass * t).exp() / (2.0 * mass);
        worst = worst.max((z - exact).norm() / exact.norm());
        csv.row(&[Cell::F(*t), Cell::F(z.re), Cell::F(z.im), Cell::F(exact.re), Cell::F(exact.im)]);
    }
    out.csv(name, csv)?;
    let rel = (w.mass - mass).abs() / mass;
    Ok(Check::new(
        "wick_mass",
        rel <= 0.02,
        format!(
            "fitted M = {:.6} (input {mass}, off by {:.3}%), amplitude {:.6}; max relative deviation from exp(-imt)/2m {:.3e}",
            w.mass,
            100.0 * rel,
            w.amplitude,
            worst
        ),
    ))
}

pub(crate) fn os_check(p: &Params, seed: u64, out: &mut OutputSet) -> Result<Vec<Check>, HarnessError> {
    let mass = p.f64("mass")?;
    let (t_sites, l_sites) = p.dims("lattice")?;
    let lat = Lattice::new(t_sites, l_sites, p.f64("spacing")?).context("lattice")?;
    let cov = CovarianceOp::new(lat, mass).context("covariance")?;
    let tolerance = p.f64("tolerance")?;
    let support = p.usize("support")? as i64;

    let (csv, mut checks) = positivity_sets(
        &cov,
        p.usize("n-test-functions")?,
        p.usize("max-size")?,
        support,
        tolerance,
        seed,
    )?;
    let report_rows = String::from_utf8(csv.clone().into_bytes()).unwrap_or_default();
    out.csv(p.raw("out"), csv)?;
    let eigs: Vec<(f64, f64)> = report_rows
        .lines()
        .skip(1)
        .filter_map(|l| {
            let c: Vec<&str> = l.split(',').collect();
            Some((c[0].parse().ok()?, c[2].parse::<f64>().ok()?.abs().max(1e-300).log10()))
        })
        .collect();
    out.svg(
        "os_report.svg",
        svg_plot("Gram matrix spectrum", "set", "log10 |min eigenvalue|", &[Series::markers("min eigenvalue", eigs)]),
    )?;

    // Characteristic functional against Monte Carlo.
    let mut rng = stream(seed, u64::MAX);
    let probes: Vec<TestFunction> = (0..p.usize("mc-functions")?)
        .map(|_| random_probe(&cov, &mut rng))
        .collect::<Result<_, _>>()?;
    let mc = cov
        .characteristic_mc(&probes, p.usize("draws")?, seed.wrapping_add(DRAW_SEED_OFFSET))
        .context("Monte-Carlo characteristic functional")?;
    let mut csv = Csv::new(&["function_id", "closed_form", "mc_mean", "mc_stderr"]);
    let mut worst = 0.0f64;
    for (k, (g, (m, se))) in probes.iter().zip(&mc).enumerate() {
        let exact = cov.characteristic(g).context("characteristic functional")?;
        worst = worst.max((m - exact).abs() / se);
        csv.row(&[Cell::U(k), Cell::F(exact), Cell::F(*m), Cell::F(*se)]);
    }
    out.csv("characteristic.csv", csv)?;
    checks.push(Check::new(
        "characteristic_mc",
        worst <= 3.0,
        format!("max |MC - closed form| / se = {worst:.3} over {} functions", probes.len()),
    ));

    // Reflection symmetry of the covariance.
    let (f, g) = (&probes[0], &probes[probes.len() - 1]);
    let lhs = cov.bilinear(f, &time_reflect(g)).context("covariance")?;
    let rhs = cov.bilinear(&time_reflect(f), g).context("covariance")?;
    checks.push(Check::new(
        "reflection_symmetry",
        (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(1.0),
        format!("<f, C Theta g> - <Theta f, C g> = {:.3e}", lhs - rhs),
    ));

    // Joint translations of one positive-time set.
    let mut rng = stream(seed, u64::MAX - 1);
    let fs: Vec<TestFunction> = (0..4)
        .map(|_| TestFunction::random_positive(lat, support.min(lat.t_max() - 1), 0.5, &mut rng))
        .collect::<Result<_, _>>()
        .context("test functions")?;
    let mut shifts = vec![Shift { time: 0, space: 0 }, Shift { time: 1, space: 0 }];
    if l_sites > 1 {
        shifts.push(Shift { time: 0, space: 3 });
    }
    let tr = translation_covariance_check(&cov, &fs, &shifts, tolerance).context("translation check")?;
    let detail = tr
        .results
        .iter()
        .map(|r| {
            format!(
                "({}, {}): dev {:.2e}, min eig {:.2e}",
                r.shift.time, r.shift.space, r.max_deviation, r.min_eigenvalue
            )
        })
        .collect::<Vec<_>>()
        .join("; ");
    checks.push(Check::new("translation_covariance", tr.passed(1e-10), detail));

    checks.push(wick_check(mass, p.f64("wick-spacing")?, out, "wick.csv")?);
    Ok(checks)
}
