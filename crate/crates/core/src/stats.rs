//! Small statistics toolkit shared by the estimators.

/// Sample mean and standard error of the mean.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, f64::INFINITY);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 2 {
        return f64::NAN;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
}

/// Jackknife standard error from the full-sample estimate's leave-one-out
/// replicas.
pub fn jackknife_error(replicas: &[f64]) -> f64 {
    let n = replicas.len();
    if n < 2 {
        return f64::INFINITY;
    }
    let mean = replicas.iter().sum::<f64>() / n as f64;
    let ss = replicas.iter().map(|r| (r - mean).powi(2)).sum::<f64>();
    ((n - 1) as f64 / n as f64 * ss).sqrt()
}

/// Integrated autocorrelation time with Sokal's automatic window (c = 6).
///
/// Returns `0.5` for an uncorrelated series under this convention, so the
/// variance of the mean is `2 tau var / n`.
pub fn integrated_autocorrelation_time(xs: &[f64]) -> f64 {
    let n = xs.len();
    if n < 4 {
        return 0.5;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let c0 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for lag in 1..n / 2 {
        let c = xs[..n - lag]
            .iter()
            .zip(&xs[lag..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / n as f64;
        tau += c / c0;
        if lag as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Lag-`k` autocorrelation coefficient.
pub fn autocorrelation(xs: &[f64], lag: usize) -> f64 {
    let n = xs.len();
    if lag >= n {
        return f64::NAN;
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    let c0 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>();
    let c = xs[..n - lag]
        .iter()
        .zip(&xs[lag..])
        .map(|(a, b)| (a - mean) * (b - mean))
        .sum::<f64>();
    c / c0
}

/// Ordinary least-squares line `y = intercept + slope x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Weighted least squares with weights `w_i = 1/sigma_i^2`. Passing unit
/// weights gives the ordinary fit; `slope_se` then assumes unit variance.
pub fn weighted_line_fit(xs: &[f64], ys: &[f64], ws: &[f64]) -> LineFit {
    let sw: f64 = ws.iter().sum();
    let sx: f64 = xs.iter().zip(ws).map(|(x, w)| w * x).sum();
    let sy: f64 = ys.iter().zip(ws).map(|(y, w)| w * y).sum();
    let sxx: f64 = xs.iter().zip(ws).map(|(x, w)| w * x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).zip(ws).map(|((x, y), w)| w * x * y).sum();
    let det = sw * sxx - sx * sx;
    let slope = (sw * sxy - sx * sy) / det;
    let intercept = (sxx * sy - sx * sxy) / det;
    LineFit {
        slope,
        intercept,
        slope_se: (sw / det).sqrt(),
    }
}

/// Ordinary least squares.
pub fn line_fit(xs: &[f64], ys: &[f64]) -> LineFit {
    let ws = vec![1.0; xs.len()];
    weighted_line_fit(xs, ys, &ws)
}

/// Linear-interpolated sample quantile, `p` in `[0, 1]`. Sorts a copy.
pub fn quantile(xs: &[f64], p: f64) -> f64 {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    v.sort_by(|a, b| a.total_cmp(b));
    let pos = p.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    v[lo] * (1.0 - frac) + v[hi] * frac
}
