use super::OsError;
use crate::stats::weighted_line_fit;
use num_complex::Complex64;

/// Euclidean correlator samples `C(tau)`; `errors` may be all zero for
/// exact input.
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
}

impl EuclideanSeries {
    pub fn exact(times: Vec<f64>, values: Vec<f64>) -> Self {
        let errors = vec![0.0; values.len()];
        Self { times, values, errors }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WickOptions {
    pub chi2_threshold: f64,
    /// Largest tolerated log-residual for exact input.
    pub exact_tolerance: f64,
}

impl Default for WickOptions {
    fn default() -> Self {
        Self {
            chi2_threshold: 3.0,
            exact_tolerance: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WickContinuation {
    pub amplitude: f64,
    pub amplitude_error: f64,
    pub mass: f64,
    pub mass_error: f64,
    pub chi2_dof: f64,
    pub times: Vec<f64>,
    /// `A exp(-i M t)` at `times`.
    pub values: Vec<Complex64>,
}

/// Fits `C(tau) = A exp(-M tau)` and continues the fit to real time,
/// `tau -> i t`.
pub fn wick_continue(series: &EuclideanSeries, times: &[f64], opts: &WickOptions) -> Result<WickContinuation, OsError> {
    let n = series.values.len();
    if n < 2 || series.times.len() != n || series.errors.len() != n {
        return Err(OsError::InvalidArgument("need at least two matched samples".into()));
    }
    if series.values.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(OsError::InvalidArgument("correlator must be positive".into()));
    }
    let exact = series.errors.iter().all(|e| *e == 0.0);
    if !exact && series.errors.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(OsError::InvalidArgument("errors must be all zero or all positive".into()));
    }
    let logs: Vec<f64> = series.values.iter().map(|v| v.ln()).collect();
    let weights: Vec<f64> = if exact {
        vec![1.0; n]
    } else {
        series
            .values
            .iter()
            .zip(&series.errors)
            .map(|(v, e)| (v / e).powi(2))
            .collect()
    };
    let fit = weighted_line_fit(&series.times, &logs, &weights);
    let residuals: Vec<f64> = series
        .times
        .iter()
        .zip(&logs)
        .map(|(t, l)| l - fit.intercept - fit.slope * t)
        .collect();
    let dof = n.saturating_sub(2).max(1) as f64;
    let chi2_dof = residuals.iter().zip(&weights).map(|(r, w)| r * r * w).sum::<f64>() / dof;
    let rejected = if exact {
        residuals.iter().any(|r| r.abs() > opts.exact_tolerance)
    } else {
        n > 2 && chi2_dof > opts.chi2_threshold
    };
    if rejected {
        return Err(OsError::ContinuationAmbiguous { chi2_dof });
    }

    let amplitude = fit.intercept.exp();
    let mass = -fit.slope;
    let (amplitude_error, mass_error) = if exact {
        (0.0, 0.0)
    } else {
        let sw: f64 = weights.iter().sum();
        let st: f64 = series.times.iter().zip(&weights).map(|(t, w)| t * w).sum();
        let stt: f64 = series.times.iter().zip(&weights).map(|(t, w)| t * t * w).sum();
        let det = sw * stt - st * st;
        (amplitude * (stt / det).sqrt(), fit.slope_se)
    };
    let values = times
        .iter()
        .map(|&t| amplitude * Complex64::new(0.0, -mass * t).exp())
        .collect();
    Ok(WickContinuation {
        amplitude,
        amplitude_error,
        mass,
        mass_error,
        chi2_dof,
        times: times.to_vec(),
        values,
    })
}
