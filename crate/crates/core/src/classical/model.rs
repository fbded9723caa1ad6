use super::ClassicalError;

/// Single-coordinate potential shape. Every coordinate of a [`SystemModel`]
/// carries the same shape with its own mass, so systems are separable.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `V = 0`
    Free,
    /// `V = m omega^2 q^2 / 2`
    Harmonic { omega: f64 },
    /// `V = lambda q^4`
    Quartic { lambda: f64 },
    /// `V = q t`, an explicitly time-dependent ramp.
    LinearRamp,
}

impl Potential {
    fn value(&self, q: f64, t: f64, m: f64) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => 0.5 * m * omega * omega * q * q,
            Potential::Quartic { lambda } => lambda * q.powi(4),
            Potential::LinearRamp => q * t,
        }
    }

    pub(crate) fn gradient(&self, q: f64, t: f64, m: f64) -> f64 {
        match *self {
            Potential::Free => 0.0,
            Potential::Harmonic { omega } => m * omega * omega * q,
            Potential::Quartic { lambda } => 4.0 * lambda * q.powi(3),
            Potential::LinearRamp => t,
        }
    }

    fn time_derivative(&self, q: f64) -> f64 {
        match *self {
            Potential::LinearRamp => q,
            _ => 0.0,
        }
    }
}

/// Hamiltonian system `H = sum p_i^2 / (2 m_i) + V(q, t)` with its Lagrangian
/// `L = sum m_i qdot_i^2 / 2 - V(q, t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemModel {
    mass: Vec<f64>,
    potential: Potential,
    offset: f64,
}

impl SystemModel {
    pub fn new(mass: Vec<f64>, potential: Potential) -> Result<Self, ClassicalError> {
        if mass.is_empty() {
            return Err(ClassicalError::InvalidModel("dimension must be positive".into()));
        }
        if mass.iter().any(|m| !(m.is_finite() && *m > 0.0)) {
            return Err(ClassicalError::InvalidModel(
                "every mass must be positive and finite".into(),
            ));
        }
        let params_ok = match potential {
            Potential::Harmonic { omega } => omega.is_finite(),
            Potential::Quartic { lambda } => lambda.is_finite(),
            _ => true,
        };
        if !params_ok {
            return Err(ClassicalError::InvalidModel("non-finite potential parameter".into()));
        }
        Ok(Self {
            mass,
            potential,
            offset: 0.0,
        })
    }

    pub fn free(mass: f64) -> Self {
        Self::new(vec![mass], Potential::Free).expect("valid free particle")
    }

    pub fn harmonic(mass: f64, omega: f64) -> Self {
        Self::new(vec![mass], Potential::Harmonic { omega }).expect("valid oscillator")
    }

    pub fn quartic(mass: f64, lambda: f64) -> Self {
        Self::new(vec![mass], Potential::Quartic { lambda }).expect("valid quartic well")
    }

    /// Adds a constant `c` to the potential energy.
    pub fn with_offset(mut self, c: f64) -> Self {
        self.offset = c;
        self
    }

    pub fn dim(&self) -> usize {
        self.mass.len()
    }

    pub fn mass(&self) -> &[f64] {
        &self.mass
    }

    pub fn potential_kind(&self) -> Potential {
        self.potential
    }

    pub fn time_dependent(&self) -> bool {
        matches!(self.potential, Potential::LinearRamp)
    }

    pub fn potential(&self, q: &[f64], t: f64) -> f64 {
        q.iter()
            .zip(&self.mass)
            .map(|(&qi, &m)| self.potential.value(qi, t, m))
            .sum::<f64>()
            + self.offset
    }

    pub fn gradient_into(&self, q: &[f64], t: f64, out: &mut [f64]) {
        for ((o, &qi), &m) in out.iter_mut().zip(q).zip(&self.mass) {
            *o = self.potential.gradient(qi, t, m);
        }
    }

    pub(crate) fn gradient_1d(&self, coord: usize, q: f64, t: f64) -> f64 {
        self.potential.gradient(q, t, self.mass[coord])
    }

    pub fn hamiltonian(&self, q: &[f64], p: &[f64], t: f64) -> f64 {
        let kinetic: f64 = p.iter().zip(&self.mass).map(|(p, m)| p * p / (2.0 * m)).sum();
        kinetic + self.potential(q, t)
    }

    /// `dH/dt` at fixed phase-space point.
    pub fn hamiltonian_time_derivative(&self, q: &[f64]) -> f64 {
        q.iter().map(|&qi| self.potential.time_derivative(qi)).sum()
    }

    pub fn lagrangian(&self, q: &[f64], qdot: &[f64], t: f64) -> f64 {
        let kinetic: f64 = qdot.iter().zip(&self.mass).map(|(v, m)| 0.5 * m * v * v).sum();
        kinetic - self.potential(q, t)
    }
}

/// A point `(q, p, t)` in extended phase space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
    pub t: f64,
}

impl PhaseState {
    pub fn new(q: Vec<f64>, p: Vec<f64>, t: f64) -> Self {
        Self { q, p, t }
    }

    /// One-dimensional convenience constructor.
    pub fn scalar(q: f64, p: f64, t: f64) -> Self {
        Self {
            q: vec![q],
            p: vec![p],
            t,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.iter().chain(&self.p).all(|x| x.is_finite())
    }
}

/// Time-ordered states on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<PhaseState>,
    pub dt: f64,
}

impl Trajectory {
    /// Builds a trajectory from positions alone, `p` set from forward
    /// differences. Useful for evaluating the action of trial paths.
    pub fn from_positions(model: &SystemModel, t0: f64, dt: f64, qs: &[Vec<f64>]) -> Self {
        let n = qs.len();
        let states = qs
            .iter()
            .enumerate()
            .map(|(k, q)| {
                let next = if k + 1 < n { &qs[k + 1] } else { q };
                let prev = if k + 1 < n { q } else if k > 0 { &qs[k - 1] } else { q };
                let p = next
                    .iter()
                    .zip(prev)
                    .zip(model.mass())
                    .map(|((a, b), m)| m * (a - b) / dt)
                    .collect();
                PhaseState::new(q.clone(), p, t0 + k as f64 * dt)
            })
            .collect();
        Self { states, dt }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn last(&self) -> Option<&PhaseState> {
        self.states.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.states.iter().map(|s| s.t).collect()
    }
}
