use super::{DiscreteActionSpec, PathEnsemble, PathError};
use crate::stats::jackknife_error;

/// `C(lag) = <q(t) q(t + lag)>` averaged over `t`, lags `0..=max_lag`.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlator {
    pub spacing: f64,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Leave-one-block-out replicas, `replicas[block][lag]`. May be empty
    /// for exact input.
    pub replicas: Vec<Vec<f64>>,
    pub warnings: Vec<String>,
}

impl Correlator {
    /// Correlator without statistical errors.
    pub fn exact(spacing: f64, values: Vec<f64>) -> Self {
        let errors = vec![0.0; values.len()];
        Self {
            spacing,
            values,
            errors,
            replicas: Vec::new(),
            warnings: Vec::new(),
        }
    }

    pub fn max_lag(&self) -> usize {
        self.values.len() - 1
    }

    /// Euclidean times `lag * a`.
    pub fn times(&self) -> Vec<f64> {
        (0..self.values.len()).map(|l| l as f64 * self.spacing).collect()
    }
}

/// Two-point function with block-jackknife errors. Lags at or beyond `N/2`
/// fold back onto shorter ones and are dropped with a warning.
pub fn two_point(ensemble: &PathEnsemble, spec: &DiscreteActionSpec, max_lag: usize) -> Result<Correlator, PathError> {
    if spec.spacing != ensemble.spec.spacing {
        return Err(PathError::SpacingMismatch {
            spec: spec.spacing,
            path: ensemble.spec.spacing,
        });
    }
    let n = ensemble.n_slices();
    let mut warnings = Vec::new();
    let limit = n / 2 - 1;
    let max_lag = if max_lag > limit {
        warnings.push(format!("max_lag {max_lag} truncated to {limit} (periodic lattice of {n} slices)"));
        limit
    } else {
        max_lag
    };
    let mut values = Vec::with_capacity(max_lag + 1);
    let mut errors = Vec::with_capacity(max_lag + 1);
    let mut by_lag = Vec::with_capacity(max_lag + 1);
    for lag in 0..=max_lag {
        let (m, e, r) = ensemble.jackknife(|b| b.corr_sum[lag]);
        values.push(m);
        errors.push(e);
        by_lag.push(r);
    }
    let replicas = (0..ensemble.blocks.len())
        .map(|b| by_lag.iter().map(|r| r[b]).collect())
        .collect();
    Ok(Correlator {
        spacing: spec.spacing,
        values,
        errors,
        replicas,
        warnings,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapOptions {
    /// First lag of the plateau window.
    pub t_min: usize,
    /// Last lag of the plateau window, if capped.
    pub t_max: Option<usize>,
    /// Window stops at the first lag whose relative error exceeds this.
    pub max_rel_error: f64,
    pub chi2_threshold: f64,
}

impl Default for GapOptions {
    fn default() -> Self {
        Self {
            t_min: 1,
            t_max: None,
            max_rel_error: 0.25,
            chi2_threshold: 3.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapEstimate {
    pub gap: f64,
    pub error: f64,
    /// Inclusive lag window of the plateau.
    pub window: (usize, usize),
    pub chi2_dof: f64,
    /// `(lag, m_eff, error)` for every lag where it is defined.
    pub effective_mass: Vec<(usize, f64, f64)>,
}

fn effective_mass(c: &[f64], lag: usize, spacing: f64) -> f64 {
    if c[lag] <= 0.0 {
        return f64::NAN;
    }
    ((c[lag + 1] + c[lag - 1]) / (2.0 * c[lag])).acosh() / spacing
}

/// Plateau-averaged effective mass
/// `m_eff = acosh[(C(t+1) + C(t-1)) / 2C(t)] / a`.
pub fn energy_gap(corr: &Correlator, opts: &GapOptions) -> Result<GapEstimate, PathError> {
    let last = corr.values.len().saturating_sub(2);
    if last < 1 {
        return Err(PathError::InvalidArgument("correlator needs at least three lags".into()));
    }
    let t_min = opts.t_min.max(1);
    let mut meff = Vec::new();
    for lag in 1..=last {
        let m = effective_mass(&corr.values, lag, corr.spacing);
        if !m.is_finite() {
            continue;
        }
        let reps: Vec<f64> = corr
            .replicas
            .iter()
            .map(|r| effective_mass(r, lag, corr.spacing))
            .collect();
        let err = if reps.is_empty() {
            0.0
        } else if reps.iter().all(|v| v.is_finite()) {
            jackknife_error(&reps)
        } else {
            f64::INFINITY
        };
        meff.push((lag, m, err));
    }

    let t_max = opts.t_max.unwrap_or(last).min(last);
    let mut window = Vec::new();
    for &(lag, m, e) in meff.iter().filter(|p| p.0 >= t_min) {
        let expected = window.last().map_or(t_min, |&(l, _, _): &(usize, f64, f64)| l + 1);
        if lag != expected || lag > t_max {
            break;
        }
        let rel = if e == 0.0 { 0.0 } else { e / m.abs() };
        if !(rel <= opts.max_rel_error) {
            break;
        }
        window.push((lag, m, e));
    }
    let diagnostics = || {
        meff.iter()
            .map(|(l, m, e)| format!("{l}:{m:.4}+-{e:.4}"))
            .collect::<Vec<_>>()
            .join(" ")
    };
    if window.is_empty() {
        return Err(PathError::NoPlateau {
            chi2_dof: f64::NAN,
            diagnostics: format!("no usable lag from {t_min}; m_eff = [{}]", diagnostics()),
        });
    }

    let exact = window.iter().any(|w| w.2 == 0.0);
    let weights: Vec<f64> = window
        .iter()
        .map(|w| if exact { 1.0 } else { 1.0 / (w.2 * w.2) })
        .collect();
    let wsum: f64 = weights.iter().sum();
    let average = |vals: &mut dyn Iterator<Item = f64>| vals.zip(&weights).map(|(v, w)| v * w).sum::<f64>() / wsum;
    let gap = average(&mut window.iter().map(|w| w.1));
    let dof = window.len().saturating_sub(1);
    let chi2_dof = if dof == 0 || exact {
        0.0
    } else {
        window.iter().map(|w| ((w.1 - gap) / w.2).powi(2)).sum::<f64>() / dof as f64
    };
    let error = if corr.replicas.is_empty() {
        0.0
    } else {
        let reps: Vec<f64> = corr
            .replicas
            .iter()
            .map(|r| average(&mut window.iter().map(|w| effective_mass(r, w.0, corr.spacing))))
            .collect();
        jackknife_error(&reps)
    };
    let window_lags = (window[0].0, window[window.len() - 1].0);
    if chi2_dof > opts.chi2_threshold {
        return Err(PathError::NoPlateau {
            chi2_dof,
            diagnostics: format!("window {window_lags:?}; m_eff = [{}]", diagnostics()),
        });
    }
    Ok(GapEstimate {
        gap,
        error,
        window: window_lags,
        chi2_dof,
        effective_mass: meff,
    })
}
