use super::{EnsembleSample, StochasticError};
use crate::stats::quantile;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmOptions {
    /// Bins span this central fraction of the starting positions.
    pub central_fraction: f64,
    /// Bins with fewer increments are not reported.
    pub min_count: usize,
}

impl Default for KmOptions {
    fn default() -> Self {
        Self {
            central_fraction: 0.95,
            min_count: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KmBin {
    pub center: f64,
    pub a1: f64,
    pub a1_se: f64,
    pub a2: f64,
    pub a2_se: f64,
    pub a3: f64,
    pub a3_se: f64,
    pub count: usize,
}

/// Conditional-moment estimates of the first three Kramers-Moyal
/// coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct KmCoefficients {
    /// Increment horizon `lag * dt`.
    pub lag_time: f64,
    pub bins: Vec<KmBin>,
}

pub fn estimate_km_coefficients(
    ensemble: &EnsembleSample,
    lag: usize,
    bins: usize,
) -> Result<KmCoefficients, StochasticError> {
    estimate_km_with(ensemble, lag, bins, &KmOptions::default())
}

/// Bins every increment `x(t + lag dt) - x(t)` by its starting point `x(t)`
/// and reports, per bin,
/// `a1 = <dx>/dt`, `a2 = <dx^2>/(2 dt)`, `a3 = <dx^3>/dt`, with standard
/// errors from the per-increment spread.
pub fn estimate_km_with(
    ensemble: &EnsembleSample,
    lag: usize,
    bins: usize,
    opts: &KmOptions,
) -> Result<KmCoefficients, StochasticError> {
    if lag == 0 || bins == 0 {
        return Err(StochasticError::InvalidArgument("lag and bins must be positive".into()));
    }
    let len = ensemble.times.len();
    if len < lag + 1 {
        return Err(StochasticError::TooShort(len));
    }
    let tau = lag as f64 * ensemble.dt;
    let starts: Vec<f64> = ensemble
        .trajectories
        .iter()
        .flat_map(|tr| tr[..len - lag].iter().copied())
        .collect();
    let tail = 0.5 * (1.0 - opts.central_fraction);
    let lo = quantile(&starts, tail);
    let hi = quantile(&starts, 1.0 - tail);
    if !(hi > lo) {
        return Ok(KmCoefficients {
            lag_time: tau,
            bins: Vec::new(),
        });
    }
    let width = (hi - lo) / bins as f64;

    // Power sums of dx: index p holds sum dx^p, p = 0..=6.
    let mut sums = vec![[0.0f64; 7]; bins];
    for tr in &ensemble.trajectories {
        for k in 0..len - lag {
            let x = tr[k];
            if x < lo || x > hi {
                continue;
            }
            let b = (((x - lo) / width) as usize).min(bins - 1);
            let d = tr[k + lag] - x;
            let s = &mut sums[b];
            let mut pw = 1.0;
            for slot in s.iter_mut() {
                *slot += pw;
                pw *= d;
            }
        }
    }

    let out = sums
        .iter()
        .enumerate()
        .filter(|(_, s)| s[0] as usize >= opts.min_count.max(2))
        .map(|(b, s)| {
            let n = s[0];
            let m = |p: usize| s[p] / n;
            let var = |mean_sq: f64, mean: f64| (n / (n - 1.0) * (mean_sq - mean * mean)).max(0.0);
            let se = |v: f64| (v / n).sqrt();
            KmBin {
                center: lo + (b as f64 + 0.5) * width,
                a1: m(1) / tau,
                a1_se: se(var(m(2), m(1))) / tau,
                a2: m(2) / (2.0 * tau),
                a2_se: se(var(m(4), m(2))) / (2.0 * tau),
                a3: m(3) / tau,
                a3_se: se(var(m(6), m(3))) / tau,
                count: n as usize,
            }
        })
        .collect();
    Ok(KmCoefficients {
        lag_time: tau,
        bins: out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stochastic::{simulate_ensemble, DriftField, NoiseSpec};

    #[test]
    fn rejects_short_ensembles() {
        let noise = NoiseSpec::new(0.5, 1).unwrap();
        let e = simulate_ensemble(&DriftField::Zero, &noise, 0.0, 0.01, 0.01, 5).unwrap();
        assert!(matches!(estimate_km_coefficients(&e, 2, 4), Err(StochasticError::TooShort(2))));
    }

    #[test]
    fn sparse_bins_are_omitted() {
        let noise = NoiseSpec::new(0.5, 1).unwrap();
        let e = simulate_ensemble(&DriftField::Zero, &noise, 0.0, 0.05, 0.01, 20).unwrap();
        let km = estimate_km_coefficients(&e, 1, 50).unwrap();
        assert!(km.bins.iter().all(|b| b.count >= 100));
    }

    #[test]
    fn deterministic_drift_is_recovered_exactly() {
        let noise = NoiseSpec::new(0.0, 1).unwrap();
        let e = simulate_ensemble(&DriftField::Constant { value: 2.0 }, &noise, 0.0, 1.0, 0.001, 1)
            .unwrap();
        let km = estimate_km_coefficients(&e, 1, 4).unwrap();
        for b in &km.bins {
            assert!((b.a1 + 2.0).abs() < 1e-9, "{b:?}");
        }
    }
}
