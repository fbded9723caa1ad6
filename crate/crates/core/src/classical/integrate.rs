use super::{ClassicalError, PhaseState, SystemModel, Trajectory};

/// Number of uniform steps covering `span` with step at most `dt`.
pub(crate) fn step_count(span: f64, dt: f64) -> usize {
    ((span / dt) - 1e-9).ceil().max(1.0) as usize
}

/// Kick-drift-kick leapfrog (Stormer-Verlet) from `init.t` to `t_end`.
///
/// The step is shrunk to `(t_end - t0) / ceil((t_end - t0) / dt)` so the
/// final state lands exactly on `t_end`.
pub fn integrate_hamilton(
    model: &SystemModel,
    init: &PhaseState,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory, ClassicalError> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(ClassicalError::InvalidArgument(format!("dt must be positive, got {dt}")));
    }
    if !(t_end > init.t) {
        return Err(ClassicalError::InvalidArgument(format!(
            "t_end ({t_end}) must exceed the initial time ({})",
            init.t
        )));
    }
    let dim = model.dim();
    if init.q.len() != dim || init.p.len() != dim {
        return Err(ClassicalError::DimensionMismatch {
            expected: dim,
            got: init.q.len().max(init.p.len()),
        });
    }
    if !init.is_finite() {
        return Err(ClassicalError::InvalidArgument("initial state is not finite".into()));
    }

    let n = step_count(t_end - init.t, dt);
    let h = (t_end - init.t) / n as f64;
    let t0 = init.t;
    let mut states = Vec::with_capacity(n + 1);
    states.push(init.clone());

    let mut q = init.q.clone();
    let mut p = init.p.clone();
    let mut force = vec![0.0; dim];
    model.gradient_into(&q, t0, &mut force);
    for k in 0..n {
        let t = t0 + k as f64 * h;
        let t_next = if k + 1 == n { t_end } else { t0 + (k + 1) as f64 * h };
        for i in 0..dim {
            p[i] -= 0.5 * h * force[i];
            q[i] += h * p[i] / model.mass()[i];
        }
        model.gradient_into(&q, t_next, &mut force);
        for i in 0..dim {
            p[i] -= 0.5 * h * force[i];
        }
        let state = PhaseState::new(q.clone(), p.clone(), t_next);
        if !state.is_finite() {
            return Err(ClassicalError::Diverged {
                last: Box::new(states.last().cloned().unwrap_or_else(|| init.clone())),
                time: t,
            });
        }
        states.push(state);
    }
    Ok(Trajectory { states, dt: h })
}

/// Endpoint `(q, p)` of a single coordinate after `n` leapfrog steps of size
/// `h`. Used by the shooting solver; no trajectory is stored.
pub(crate) fn leapfrog_endpoint_1d(
    model: &SystemModel,
    coord: usize,
    q0: f64,
    p0: f64,
    t0: f64,
    h: f64,
    n: usize,
) -> (f64, f64) {
    let m = model.mass()[coord];
    let mut q = q0;
    let mut p = p0;
    let mut f = model.gradient_1d(coord, q, t0);
    for k in 0..n {
        p -= 0.5 * h * f;
        q += h * p / m;
        f = model.gradient_1d(coord, q, t0 + (k + 1) as f64 * h);
        p -= 0.5 * h * f;
    }
    (q, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_step() {
        let m = SystemModel::free(1.0);
        let s = PhaseState::scalar(0.0, 1.0, 0.0);
        assert!(integrate_hamilton(&m, &s, 1.0, 0.0).is_err());
        assert!(integrate_hamilton(&m, &s, 0.0, 0.1).is_err());
    }

    #[test]
    fn free_particle_is_exact() {
        let m = SystemModel::free(1.0);
        let traj = integrate_hamilton(&m, &PhaseState::scalar(0.0, 1.0, 0.0), 1.0, 0.01).unwrap();
        let last = traj.last().unwrap();
        assert!((last.q[0] - 1.0).abs() < 1e-13);
        assert_eq!(last.p[0], 1.0);
        assert_eq!(last.t, 1.0);
    }

    #[test]
    fn final_time_lands_on_t_end() {
        let m = SystemModel::harmonic(1.0, 1.0);
        let traj = integrate_hamilton(&m, &PhaseState::scalar(1.0, 0.0, 0.3), 2.0, 0.07).unwrap();
        assert_eq!(traj.last().unwrap().t, 2.0);
        assert!(traj.dt <= 0.07);
    }

    #[test]
    fn divergence_reports_last_valid_state() {
        // Unstable leapfrog: omega * dt > 2.
        let m = SystemModel::harmonic(1.0, 1e3);
        let err = integrate_hamilton(&m, &PhaseState::scalar(1.0, 0.0, 0.0), 100.0, 0.1).unwrap_err();
        match err {
            ClassicalError::Diverged { last, .. } => assert!(last.is_finite()),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn endpoint_helper_matches_full_integration() {
        let m = SystemModel::quartic(1.5, 0.3);
        let traj = integrate_hamilton(&m, &PhaseState::scalar(0.2, 0.7, 0.0), 1.0, 0.01).unwrap();
        let n = traj.len() - 1;
        let (q, p) = leapfrog_endpoint_1d(&m, 0, 0.2, 0.7, 0.0, traj.dt, n);
        let last = traj.last().unwrap();
        assert!((q - last.q[0]).abs() < 1e-14);
        assert!((p - last.p[0]).abs() < 1e-14);
    }
}
