use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::{DriftField, NoiseSpec, PerturbationSpec, StochasticError};
use crate::rng;

/// One Euler-Maruyama step `x - beta(x) dt + sqrt(2 D dt) z`.
pub fn langevin_step<R: Rng + ?Sized>(
    drift: &DriftField,
    noise: &NoiseSpec,
    x: f64,
    dt: f64,
    rng: &mut R,
) -> Result<f64, StochasticError> {
    if !(dt > 0.0) {
        return Err(StochasticError::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    let next = euler_maruyama(drift, (2.0 * noise.diffusion * dt).sqrt(), x, dt, rng);
    if next.is_finite() {
        Ok(next)
    } else {
        Err(StochasticError::Diverged { from: x })
    }
}

#[inline]
fn euler_maruyama<R: Rng + ?Sized>(drift: &DriftField, sigma: f64, x: f64, dt: f64, rng: &mut R) -> f64 {
    let mut next = x - drift.beta(x) * dt;
    if sigma > 0.0 {
        let z: f64 = rng.sample(StandardNormal);
        next += sigma * z;
    }
    next
}

/// Which simulation steps are kept in an [`EnsembleSample`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recording {
    /// Time of the first stored point.
    pub start: f64,
    /// Keep every `stride`-th step from `start` on.
    pub stride: usize,
}

impl Default for Recording {
    fn default() -> Self {
        Self { start: 0.0, stride: 1 }
    }
}

impl Recording {
    /// Keep only the last `steps + 1` points of a run ending at `t_end`.
    pub fn tail(t_end: f64, dt: f64, steps: usize) -> Self {
        Self {
            start: (t_end - steps as f64 * dt).max(0.0),
            stride: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct QualityReport {
    pub requested: usize,
    pub diverged: usize,
    /// Stream ids of excluded trajectories.
    pub excluded: Vec<u64>,
}

impl QualityReport {
    pub fn excluded_fraction(&self) -> f64 {
        if self.requested == 0 {
            0.0
        } else {
            self.diverged as f64 / self.requested as f64
        }
    }
}

/// Trajectories on a shared recorded time grid. Trajectory `k` was driven by
/// random stream `streams[k]` of `seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleSample {
    pub x0: f64,
    pub seed: u64,
    /// Simulation step.
    pub sim_dt: f64,
    /// Spacing of the recorded grid (`stride * sim_dt`).
    pub dt: f64,
    pub times: Vec<f64>,
    pub trajectories: Vec<Vec<f64>>,
    pub streams: Vec<u64>,
    pub quality: QualityReport,
}

impl EnsembleSample {
    pub fn n_traj(&self) -> usize {
        self.trajectories.len()
    }

    /// Positions of all trajectories at recorded index `k`.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.trajectories.iter().map(|tr| tr[k]).collect()
    }

    /// Recorded index closest to time `t`, if within half a recorded step.
    pub fn index_at(&self, t: f64) -> Option<usize> {
        let (k, dist) = self
            .times
            .iter()
            .enumerate()
            .map(|(k, &tk)| (k, (tk - t).abs()))
            .min_by(|a, b| a.1.total_cmp(&b.1))?;
        (dist <= 0.5 * self.dt + 1e-12).then_some(k)
    }
}

/// Ensemble with every step recorded.
pub fn simulate_ensemble(
    drift: &DriftField,
    noise: &NoiseSpec,
    x0: f64,
    t_end: f64,
    dt: f64,
    n_traj: usize,
) -> Result<EnsembleSample, StochasticError> {
    simulate_ensemble_with(drift, noise, x0, t_end, dt, n_traj, &Recording::default())
}

/// Runs `n_traj` independent Euler-Maruyama trajectories from `x0` in
/// parallel. Trajectory `k` draws from stream `k`, so the sample is
/// bitwise-reproducible from `(seed, n_traj, dt)`. Diverged trajectories
/// are dropped and counted in the quality report.
pub fn simulate_ensemble_with(
    drift: &DriftField,
    noise: &NoiseSpec,
    x0: f64,
    t_end: f64,
    dt: f64,
    n_traj: usize,
    recording: &Recording,
) -> Result<EnsembleSample, StochasticError> {
    if n_traj == 0 {
        return Err(StochasticError::InvalidArgument("n_traj must be at least 1".into()));
    }
    if !(dt.is_finite() && dt > 0.0) || !(t_end.is_finite() && t_end > 0.0) {
        return Err(StochasticError::InvalidArgument(format!(
            "need dt > 0 and t_end > 0, got dt = {dt}, t_end = {t_end}"
        )));
    }
    if recording.stride == 0 {
        return Err(StochasticError::InvalidArgument("recording stride must be positive".into()));
    }
    let n_steps = (t_end / dt).round().max(1.0) as usize;
    let first = ((recording.start / dt) - 1e-9).ceil().max(0.0) as usize;
    if first > n_steps {
        return Err(StochasticError::InvalidArgument(
            "recording starts after the end of the run".into(),
        ));
    }
    let recorded: Vec<usize> = (first..=n_steps).step_by(recording.stride).collect();
    let times: Vec<f64> = recorded.iter().map(|&k| k as f64 * dt).collect();
    let sigma = (2.0 * noise.diffusion * dt).sqrt();

    let runs: Vec<Option<Vec<f64>>> = (0..n_traj as u64)
        .into_par_iter()
        .map(|stream| {
            let mut rng = rng::stream(noise.seed, stream);
            let mut out = Vec::with_capacity(recorded.len());
            let mut x = x0;
            let mut next_rec = 0;
            for k in 0..=n_steps {
                if k > 0 {
                    x = euler_maruyama(drift, sigma, x, dt, &mut rng);
                    if !x.is_finite() {
                        return None;
                    }
                }
                if next_rec < recorded.len() && recorded[next_rec] == k {
                    out.push(x);
                    next_rec += 1;
                }
            }
            Some(out)
        })
        .collect();

    let mut quality = QualityReport {
        requested: n_traj,
        ..Default::default()
    };
    let mut trajectories = Vec::with_capacity(n_traj);
    let mut streams = Vec::with_capacity(n_traj);
    for (stream, run) in runs.into_iter().enumerate() {
        match run {
            Some(tr) => {
                trajectories.push(tr);
                streams.push(stream as u64);
            }
            None => {
                quality.diverged += 1;
                quality.excluded.push(stream as u64);
            }
        }
    }
    Ok(EnsembleSample {
        x0,
        seed: noise.seed,
        sim_dt: dt,
        dt: dt * recording.stride as f64,
        times,
        trajectories,
        streams,
        quality,
    })
}

/// One realisation of the action process `dS = -E dt + eta`,
/// `Var(eta) = 2 hbar E dt`, from `S(0) = 0`. Element `k` is `S(k dt)`.
pub fn action_process<R: Rng + ?Sized>(p: &PerturbationSpec, t_end: f64, rng: &mut R) -> Vec<f64> {
    let n = (t_end / p.dt).round().max(1.0) as usize;
    let sigma = (2.0 * p.diffusion() * p.dt).sqrt();
    let mut out = Vec::with_capacity(n + 1);
    out.push(0.0);
    let mut noise_sum = 0.0;
    for k in 1..=n {
        if sigma > 0.0 {
            let z: f64 = rng.sample(StandardNormal);
            noise_sum += sigma * z;
        }
        out.push(-p.energy * (k as f64 * p.dt) + noise_sum);
    }
    out
}

/// Ensemble of action processes, one random stream per realisation.
pub fn action_ensemble(
    p: &PerturbationSpec,
    t_end: f64,
    n_traj: usize,
    seed: u64,
    recording: &Recording,
) -> Result<EnsembleSample, StochasticError> {
    let noise = NoiseSpec::new(p.diffusion(), seed)?;
    simulate_ensemble_with(&p.drift(), &noise, 0.0, t_end, p.dt, n_traj, recording)
}
