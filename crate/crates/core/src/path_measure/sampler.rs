use super::{DiscreteActionSpec, PathError, MIN_SLICES};
use crate::rng::stream;
use crate::stats::integrated_autocorrelation_time;
use rand::Rng;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetropolisConfig {
    pub n_slices: usize,
    /// Initial half-width of the uniform proposal.
    pub proposal_width: f64,
    /// Total sweeps including thermalization.
    pub sweeps: usize,
    pub thermalization: usize,
    /// Measure every `stride` sweeps after thermalization.
    pub stride: usize,
    pub seed: u64,
    /// Number of accumulator blocks for jackknife errors.
    pub blocks: usize,
    pub store_paths: bool,
}

impl Default for MetropolisConfig {
    fn default() -> Self {
        Self {
            n_slices: 64,
            proposal_width: 0.5,
            sweeps: 20_000,
            thermalization: 1_000,
            stride: 1,
            seed: 0,
            blocks: 128,
            store_paths: false,
        }
    }
}

impl MetropolisConfig {
    pub fn validate(&self) -> Result<(), PathError> {
        if self.n_slices < MIN_SLICES {
            return Err(PathError::InvalidConfig(format!(
                "need at least {MIN_SLICES} slices, got {}",
                self.n_slices
            )));
        }
        if !(self.proposal_width.is_finite() && self.proposal_width > 0.0) {
            return Err(PathError::InvalidConfig(format!(
                "proposal width must be positive, got {}",
                self.proposal_width
            )));
        }
        if self.sweeps <= self.thermalization {
            return Err(PathError::InvalidConfig(format!(
                "sweeps ({}) must exceed thermalization ({})",
                self.sweeps, self.thermalization
            )));
        }
        if self.stride == 0 || self.blocks < 2 {
            return Err(PathError::InvalidConfig("stride must be >= 1 and blocks >= 2".into()));
        }
        if self.measurements() < 2 {
            return Err(PathError::InvalidConfig("fewer than two measurements".into()));
        }
        Ok(())
    }

    pub fn measurements(&self) -> usize {
        (self.sweeps - self.thermalization) / self.stride
    }
}

/// One proposed single-site move, with everything needed to replay it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateRecord {
    pub site: usize,
    pub old: f64,
    pub proposed: f64,
    pub delta_action: f64,
    /// `min(1, exp(-dS / hbar))`
    pub acceptance: f64,
    pub uniform: f64,
    pub accepted: bool,
}

/// Random-walk Metropolis update of `q[site]` with a uniform proposal of
/// half-width `width`. Always consumes exactly two uniforms.
pub fn single_site_update<R: Rng + ?Sized>(
    spec: &DiscreteActionSpec,
    q: &mut [f64],
    site: usize,
    width: f64,
    rng: &mut R,
) -> UpdateRecord {
    let n = q.len();
    let old = q[site];
    let proposed = old + width * (2.0 * rng.random::<f64>() - 1.0);
    let left = q[(site + n - 1) % n];
    let right = q[(site + 1) % n];
    let delta_action = spec.local_delta(left, right, old, proposed);
    let acceptance = (-delta_action / spec.hbar).exp().min(1.0);
    let uniform = rng.random::<f64>();
    let accepted = uniform < acceptance;
    if accepted {
        q[site] = proposed;
    }
    UpdateRecord {
        site,
        old,
        proposed,
        delta_action,
        acceptance,
        uniform,
        accepted,
    }
}

/// Summed observables over a contiguous run of measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableBlock {
    pub chain: u64,
    pub index: usize,
    pub count: usize,
    /// Sum of the slice-averaged `q^2`.
    pub q2_sum: f64,
    /// Sums of the translation-averaged `q_t q_{t+lag}` for lags `0..N`.
    pub corr_sum: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainSummary {
    pub chain: u64,
    pub accepted: u64,
    pub attempts: u64,
    pub final_width: f64,
    /// Slice-averaged `q^2` at every measurement.
    pub q2_series: Vec<f64>,
    /// In units of measurements.
    pub tau_int: f64,
    /// Configurations at every measurement, when requested.
    pub paths: Option<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathEnsemble {
    pub spec: DiscreteActionSpec,
    pub config: MetropolisConfig,
    pub blocks: Vec<ObservableBlock>,
    pub chains: Vec<ChainSummary>,
    pub warnings: Vec<String>,
}

impl PathEnsemble {
    pub fn n_slices(&self) -> usize {
        self.config.n_slices
    }

    pub fn acceptance_rate(&self) -> f64 {
        let acc: u64 = self.chains.iter().map(|c| c.accepted).sum();
        let att: u64 = self.chains.iter().map(|c| c.attempts).sum();
        acc as f64 / att as f64
    }

    /// Mean integrated autocorrelation time of `q^2` over chains, in
    /// measurements.
    pub fn autocorrelation_time(&self) -> f64 {
        self.chains.iter().map(|c| c.tau_int).sum::<f64>() / self.chains.len() as f64
    }

    pub fn measurements(&self) -> usize {
        self.blocks.iter().map(|b| b.count).sum()
    }

    /// Block-jackknife estimate of `f(sums) / count`, for any vector of
    /// per-block sums extracted by `field`.
    pub(crate) fn jackknife<F>(&self, field: F) -> (f64, f64, Vec<f64>)
    where
        F: Fn(&ObservableBlock) -> f64,
    {
        let total_n = self.measurements() as f64;
        let total: f64 = self.blocks.iter().map(&field).sum();
        let mean = total / total_n;
        let replicas: Vec<f64> = self
            .blocks
            .iter()
            .map(|b| (total - field(b)) / (total_n - b.count as f64))
            .collect();
        (mean, crate::stats::jackknife_error(&replicas), replicas)
    }

    /// `<q^2>` with its block-jackknife error.
    pub fn q2(&self) -> (f64, f64) {
        let (m, e, _) = self.jackknife(|b| b.q2_sum);
        (m, e)
    }

    /// Translation-averaged correlator for all lags `0..N`, with errors.
    pub fn raw_correlator(&self) -> (Vec<f64>, Vec<f64>) {
        (0..self.n_slices())
            .map(|l| {
                let (m, e, _) = self.jackknife(|b| b.corr_sum[l]);
                (m, e)
            })
            .unzip()
    }

    /// Stored configurations of all chains in chain order.
    pub fn paths(&self) -> impl Iterator<Item = &Vec<f64>> {
        self.chains.iter().flat_map(|c| c.paths.iter().flatten())
    }

    /// Combines independent chains. The result depends only on the set of
    /// chains, not on the order or grouping of the merge.
    pub fn merge(parts: Vec<PathEnsemble>) -> Result<PathEnsemble, PathError> {
        let mut iter = parts.into_iter();
        let mut out = iter
            .next()
            .ok_or_else(|| PathError::InvalidArgument("nothing to merge".into()))?;
        for p in iter {
            if p.spec != out.spec || p.config.n_slices != out.config.n_slices {
                return Err(PathError::InvalidArgument("chains sample different actions".into()));
            }
            out.blocks.extend(p.blocks);
            out.chains.extend(p.chains);
            out.warnings.extend(p.warnings);
        }
        out.chains.sort_by_key(|c| c.chain);
        if out.chains.windows(2).any(|w| w[0].chain == w[1].chain) {
            return Err(PathError::InvalidArgument("duplicate chain ids".into()));
        }
        out.blocks.sort_by_key(|b| (b.chain, b.index));
        out.warnings.sort();
        out.warnings.dedup();
        Ok(out)
    }
}

const TUNE_INTERVAL: usize = 10;

fn run_chain(spec: &DiscreteActionSpec, config: &MetropolisConfig, chain: u64) -> PathEnsemble {
    let n = config.n_slices;
    let mut rng = stream(config.seed, chain);
    let mut q = vec![0.0; n];
    let mut width = config.proposal_width;

    let mut window_acc = 0usize;
    for sweep in 0..config.thermalization {
        for site in 0..n {
            window_acc += single_site_update(spec, &mut q, site, width, &mut rng).accepted as usize;
        }
        if (sweep + 1) % TUNE_INTERVAL == 0 {
            let rate = window_acc as f64 / (TUNE_INTERVAL * n) as f64;
            width *= (rate / 0.5).clamp(0.5, 2.0);
            window_acc = 0;
        }
    }

    let n_meas = config.measurements();
    let n_blocks = config.blocks.min(n_meas);
    let block_len = n_meas / n_blocks;
    let mut blocks: Vec<ObservableBlock> = (0..n_blocks)
        .map(|index| ObservableBlock {
            chain,
            index,
            count: 0,
            q2_sum: 0.0,
            corr_sum: vec![0.0; n],
        })
        .collect();
    let mut q2_series = Vec::with_capacity(n_meas);
    let mut paths = config.store_paths.then(|| Vec::with_capacity(n_meas));
    let mut accepted = 0u64;
    let mut attempts = 0u64;
    let mut corr = vec![0.0; n];

    for k in 0..n_meas {
        for _ in 0..config.stride {
            for site in 0..n {
                accepted += single_site_update(spec, &mut q, site, width, &mut rng).accepted as u64;
            }
            attempts += n as u64;
        }
        for (lag, c) in corr.iter_mut().enumerate() {
            *c = (0..n).map(|t| q[t] * q[(t + lag) % n]).sum::<f64>() / n as f64;
        }
        let b = &mut blocks[(k / block_len).min(n_blocks - 1)];
        b.count += 1;
        b.q2_sum += corr[0];
        for (s, c) in b.corr_sum.iter_mut().zip(&corr) {
            *s += c;
        }
        q2_series.push(corr[0]);
        if let Some(p) = paths.as_mut() {
            p.push(q.clone());
        }
    }

    let rate = accepted as f64 / attempts as f64;
    let mut warnings = Vec::new();
    if !(0.2..=0.8).contains(&rate) {
        warnings.push(format!(
            "chain {chain}: acceptance {rate:.3} outside [0.2, 0.8]; try proposal width {:.4}",
            width * (rate / 0.5).clamp(0.1, 10.0)
        ));
    }
    PathEnsemble {
        spec: *spec,
        config: *config,
        blocks,
        chains: vec![ChainSummary {
            chain,
            accepted,
            attempts,
            final_width: width,
            tau_int: integrated_autocorrelation_time(&q2_series),
            q2_series,
            paths,
        }],
        warnings,
    }
}

/// Single Markov chain on stream 0 of `config.seed`.
pub fn metropolis_sample(spec: &DiscreteActionSpec, config: &MetropolisConfig) -> Result<PathEnsemble, PathError> {
    spec.validate()?;
    config.validate()?;
    Ok(run_chain(spec, config, 0))
}

/// `n_chains` independent chains on streams `0..n_chains`, run in parallel
/// and merged.
pub fn metropolis_sample_chains(
    spec: &DiscreteActionSpec,
    config: &MetropolisConfig,
    n_chains: usize,
) -> Result<PathEnsemble, PathError> {
    spec.validate()?;
    config.validate()?;
    if n_chains == 0 {
        return Err(PathError::InvalidConfig("need at least one chain".into()));
    }
    let parts: Vec<PathEnsemble> = (0..n_chains as u64)
        .into_par_iter()
        .map(|c| run_chain(spec, config, c))
        .collect();
    PathEnsemble::merge(parts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> (DiscreteActionSpec, MetropolisConfig) {
        let spec = DiscreteActionSpec::harmonic(1.0, 1.0, 1.0, 0.5).unwrap();
        let cfg = MetropolisConfig {
            n_slices: 8,
            sweeps: 600,
            thermalization: 100,
            blocks: 10,
            ..Default::default()
        };
        (spec, cfg)
    }

    #[test]
    fn config_validation() {
        let (spec, mut cfg) = small();
        cfg.thermalization = cfg.sweeps;
        assert!(metropolis_sample(&spec, &cfg).is_err());
        let (_, mut cfg) = small();
        cfg.proposal_width = 0.0;
        assert!(matches!(metropolis_sample(&spec, &cfg), Err(PathError::InvalidConfig(_))));
    }

    #[test]
    fn deterministic_under_seed() {
        let (spec, cfg) = small();
        let a = metropolis_sample(&spec, &cfg).unwrap();
        let b = metropolis_sample(&spec, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.measurements(), 500);
        assert!(a.acceptance_rate() > 0.0 && a.acceptance_rate() < 1.0);
    }

    #[test]
    fn merge_is_order_independent() {
        let (spec, cfg) = small();
        let parts: Vec<_> = (0..3).map(|c| run_chain(&spec, &cfg, c)).collect();
        let ab_c = PathEnsemble::merge(vec![
            PathEnsemble::merge(vec![parts[1].clone(), parts[0].clone()]).unwrap(),
            parts[2].clone(),
        ])
        .unwrap();
        let a_bc = PathEnsemble::merge(vec![
            parts[2].clone(),
            PathEnsemble::merge(vec![parts[0].clone(), parts[1].clone()]).unwrap(),
        ])
        .unwrap();
        assert_eq!(ab_c, a_bc);
        assert!(PathEnsemble::merge(vec![parts[0].clone(), parts[0].clone()]).is_err());
    }
}
