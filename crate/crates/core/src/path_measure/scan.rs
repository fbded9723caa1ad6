use super::{metropolis_sample, DiscreteActionSpec, MetropolisConfig, PathError};

#[derive(Debug, Clone, PartialEq)]
pub struct ScanEntry {
    pub hbar: f64,
    /// `<q^2>` around the classical minimum `q = 0`.
    pub q2: f64,
    pub q2_error: f64,
    /// `q2 / q2` of the previous entry.
    pub ratio: Option<f64>,
    pub acceptance: f64,
    pub tau_int: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanReport {
    pub entries: Vec<ScanEntry>,
    /// Indices `k` where entry `k` exceeds entry `k - 1` by more than three
    /// combined standard errors.
    pub violations: Vec<usize>,
}

impl ScanReport {
    pub fn monotone(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn into_result(self) -> Result<Self, PathError> {
        if self.monotone() {
            return Ok(self);
        }
        let detail = self
            .violations
            .iter()
            .map(|&k| {
                let (a, b) = (&self.entries[k - 1], &self.entries[k]);
                format!(
                    "<q^2> rose from {:.5e} (hbar {}) to {:.5e} (hbar {})",
                    a.q2, a.hbar, b.q2, b.hbar
                )
            })
            .collect::<Vec<_>>()
            .join("; ");
        Err(PathError::PropertyViolation(detail))
    }
}

/// Runs the sampler at each `hbar` (non-increasing) with the same seed and
/// checks that the path spread shrinks. The initial proposal width is
/// scaled by `sqrt(hbar / spec.hbar)`.
pub fn classical_limit_scan(
    spec: &DiscreteActionSpec,
    config: &MetropolisConfig,
    hbars: &[f64],
) -> Result<ScanReport, PathError> {
    if hbars.is_empty() {
        return Err(PathError::InvalidArgument("hbar list is empty".into()));
    }
    if hbars.windows(2).any(|w| w[1] > w[0]) {
        return Err(PathError::InvalidArgument("hbar list must be non-increasing".into()));
    }
    let mut entries: Vec<ScanEntry> = Vec::with_capacity(hbars.len());
    for &hbar in hbars {
        let s = spec.with_hbar(hbar)?;
        let cfg = MetropolisConfig {
            proposal_width: config.proposal_width * (hbar / spec.hbar).sqrt(),
            ..*config
        };
        let ens = metropolis_sample(&s, &cfg)?;
        let (q2, q2_error) = ens.q2();
        entries.push(ScanEntry {
            hbar,
            q2,
            q2_error,
            ratio: entries.last().map(|p| q2 / p.q2),
            acceptance: ens.acceptance_rate(),
            tau_int: ens.autocorrelation_time(),
        });
    }
    let violations = (1..entries.len())
        .filter(|&k| {
            let (a, b) = (&entries[k - 1], &entries[k]);
            b.q2 - a.q2 > 3.0 * a.q2_error.hypot(b.q2_error)
        })
        .collect();
    Ok(ScanReport { entries, violations })
}
