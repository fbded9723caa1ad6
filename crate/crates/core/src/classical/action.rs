use super::{ClassicalError, SystemModel, Trajectory};

/// Trapezoidal quadrature of `L(q, qdot, t) dt` along a trajectory.
///
/// Velocities come from second-order central differences of `q`, with
/// second-order one-sided stencils at the two ends (plain differences when
/// only two states exist).
pub fn action_of(model: &SystemModel, traj: &Trajectory) -> Result<f64, ClassicalError> {
    let n = traj.len();
    if n < 2 {
        return Err(ClassicalError::DegenerateTrajectory(n));
    }
    let dim = model.dim();
    let h = traj.dt;
    let q = |k: usize, i: usize| traj.states[k].q[i];
    let mut qdot = vec![0.0; dim];
    let mut total = 0.0;
    for k in 0..n {
        for (i, v) in qdot.iter_mut().enumerate() {
            *v = if n == 2 {
                (q(1, i) - q(0, i)) / h
            } else if k == 0 {
                (-3.0 * q(0, i) + 4.0 * q(1, i) - q(2, i)) / (2.0 * h)
            } else if k == n - 1 {
                (3.0 * q(k, i) - 4.0 * q(k - 1, i) + q(k - 2, i)) / (2.0 * h)
            } else {
                (q(k + 1, i) - q(k - 1, i)) / (2.0 * h)
            };
        }
        let s = &traj.states[k];
        let weight = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
        total += weight * model.lagrangian(&s.q, &qdot, s.t);
    }
    Ok(total * h)
}

/// Hamiltonian along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// `max_t |H(t) - H(t0)|`
    pub max_drift: f64,
}

pub fn energy_series(model: &SystemModel, traj: &Trajectory) -> EnergySeries {
    let values: Vec<f64> = traj
        .states
        .iter()
        .map(|s| model.hamiltonian(&s.q, &s.p, s.t))
        .collect();
    let h0 = values.first().copied().unwrap_or(0.0);
    let max_drift = values.iter().map(|h| (h - h0).abs()).fold(0.0, f64::max);
    EnergySeries {
        times: traj.times(),
        values,
        max_drift,
    }
}
