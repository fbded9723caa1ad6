use super::integrate::{integrate_hamilton, leapfrog_endpoint_1d};
use super::{action_of, ClassicalError, PhaseState, SystemModel};

/// Knobs of the boundary-value solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShootingOptions {
    /// Leapfrog steps between the two endpoints.
    pub steps: usize,
    /// Accepted endpoint mismatch `|q(t1) - q1|`.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Geometric doublings allowed while bracketing the initial momentum.
    pub max_expansions: usize,
    /// Below this fraction of the free-particle sensitivity `T/m`, the
    /// endpoint no longer depends on the launch momentum (a conjugate point).
    pub min_sensitivity: f64,
}

impl Default for ShootingOptions {
    fn default() -> Self {
        Self {
            steps: 2000,
            tolerance: 1e-10,
            max_iterations: 200,
            max_expansions: 40,
            min_sensitivity: 1e-6,
        }
    }
}

/// The classical path through two endpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalPath {
    pub action: f64,
    pub initial_momentum: Vec<f64>,
    pub final_momentum: Vec<f64>,
    /// Hamiltonian at the final endpoint.
    pub final_energy: f64,
}

/// On-shell action `S(q0, t0; q1, t1)` with default shooting options.
pub fn onshell_action(
    model: &SystemModel,
    q0: &[f64],
    t0: f64,
    q1: &[f64],
    t1: f64,
) -> Result<f64, ClassicalError> {
    solve_classical_path(model, q0, t0, q1, t1, &ShootingOptions::default()).map(|p| p.action)
}

/// Shoots on the initial momentum of each (separable) coordinate until the
/// leapfrog endpoint hits `q1`, then evaluates the action on that path.
pub fn solve_classical_path(
    model: &SystemModel,
    q0: &[f64],
    t0: f64,
    q1: &[f64],
    t1: f64,
    opts: &ShootingOptions,
) -> Result<ClassicalPath, ClassicalError> {
    let dim = model.dim();
    if q0.len() != dim || q1.len() != dim {
        return Err(ClassicalError::DimensionMismatch {
            expected: dim,
            got: q0.len().max(q1.len()),
        });
    }
    if !(t1 > t0) {
        return Err(ClassicalError::InvalidArgument(format!("t1 ({t1}) must exceed t0 ({t0})")));
    }
    let span = t1 - t0;
    let h = span / opts.steps as f64;
    let mut p0 = Vec::with_capacity(dim);
    for i in 0..dim {
        p0.push(shoot_coordinate(model, i, q0[i], q1[i], t0, span, h, opts)?);
    }
    let init = PhaseState::new(q0.to_vec(), p0.clone(), t0);
    let traj = integrate_hamilton(model, &init, t1, h)?;
    let last = traj.last().expect("non-empty trajectory");
    Ok(ClassicalPath {
        action: action_of(model, &traj)?,
        initial_momentum: p0,
        final_momentum: last.p.clone(),
        final_energy: model.hamiltonian(&last.q, &last.p, last.t),
    })
}

#[allow(clippy::too_many_arguments)]
fn shoot_coordinate(
    model: &SystemModel,
    coord: usize,
    q0: f64,
    q1: f64,
    t0: f64,
    span: f64,
    h: f64,
    opts: &ShootingOptions,
) -> Result<f64, ClassicalError> {
    let m = model.mass()[coord];
    let mismatch = |p: f64| leapfrog_endpoint_1d(model, coord, q0, p, t0, h, opts.steps).0 - q1;
    let no_path = |reason: String| ClassicalError::NoClassicalPath { coord, reason };

    let guess = m * (q1 - q0) / span;
    let f_guess = mismatch(guess);
    if !f_guess.is_finite() {
        return Err(no_path("endpoint not finite at the straight-line guess".into()));
    }
    if f_guess.abs() <= opts.tolerance {
        return Ok(guess);
    }

    let mut width = guess.abs().max(m * q0.abs().max(q1.abs()).max(1.0) / span);
    let probe = mismatch(guess + width);
    let sensitivity = (probe - f_guess) / width;
    if !(sensitivity.abs() >= opts.min_sensitivity * span / m) {
        return Err(no_path(format!(
            "endpoint insensitive to launch momentum (dq1/dp0 = {sensitivity:.3e}); conjugate point"
        )));
    }

    // Geometric bracket expansion around the guess.
    let (mut a, mut fa, mut b, mut fb) = (guess, f_guess, guess + width, probe);
    let mut expansions = 0;
    while fa.signum() == fb.signum() {
        if expansions >= opts.max_expansions {
            return Err(no_path(format!(
                "no sign change within |p0 - guess| <= {width:.3e}"
            )));
        }
        width *= 2.0;
        let lo = guess - width;
        let hi = guess + width;
        let (flo, fhi) = (mismatch(lo), mismatch(hi));
        if !(flo.is_finite() && fhi.is_finite()) {
            return Err(no_path("endpoint diverged while bracketing".into()));
        }
        if flo.signum() != f_guess.signum() {
            (a, fa, b, fb) = (lo, flo, guess, f_guess);
        } else {
            (a, fa, b, fb) = (guess, f_guess, hi, fhi);
        }
        expansions += 1;
    }

    // Illinois-modified regula falsi: secant steps that keep the bracket.
    let mut side = 0i8;
    for _ in 0..opts.max_iterations {
        let c = (a * fb - b * fa) / (fb - fa);
        let fc = mismatch(c);
        if fc.abs() <= opts.tolerance {
            return Ok(c);
        }
        if fc.signum() == fb.signum() {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
        if (b - a).abs() <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
    }
    Err(no_path(format!(
        "secant refinement did not reach tolerance {:.1e}",
        opts.tolerance
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn stationary_free_particle_has_zero_action() {
        let m = SystemModel::free(1.0);
        let s = onshell_action(&m, &[0.4], 0.0, &[0.4], 2.0).unwrap();
        assert!(s.abs() < 1e-24);
    }

    #[test]
    fn conjugate_point_is_an_error() {
        let m = SystemModel::harmonic(1.0, 1.0);
        let err = onshell_action(&m, &[0.2], 0.0, &[0.5], PI).unwrap_err();
        assert!(matches!(err, ClassicalError::NoClassicalPath { .. }), "{err:?}");
    }

    #[test]
    fn time_order_is_enforced() {
        let m = SystemModel::free(1.0);
        assert!(onshell_action(&m, &[0.0], 1.0, &[1.0], 1.0).is_err());
    }

    #[test]
    fn nonlinear_shooting_converges() {
        let m = SystemModel::quartic(1.0, 0.5);
        let opts = ShootingOptions::default();
        let path = solve_classical_path(&m, &[0.1], 0.0, &[1.3], 0.8, &opts).unwrap();
        let traj = integrate_hamilton(
            &m,
            &PhaseState::new(vec![0.1], path.initial_momentum.clone(), 0.0),
            0.8,
            0.8 / opts.steps as f64,
        )
        .unwrap();
        assert!((traj.last().unwrap().q[0] - 1.3).abs() < 1e-9);
    }
}
