use super::{DiscreteActionSpec, PathPotential};
use std::f64::consts::PI;

fn harmonic_omega(spec: &DiscreteActionSpec) -> Option<f64> {
    match spec.potential {
        PathPotential::Harmonic { omega } => Some(omega),
        PathPotential::Quartic { .. } => None,
    }
}

/// Eigenvalues of the quadratic form `S / hbar = q^T K q / 2` on `n` slices.
fn modes(spec: &DiscreteActionSpec, omega: f64, n: usize) -> impl Iterator<Item = f64> + '_ {
    let a = spec.spacing;
    (0..n).map(move |k| {
        let s = (PI * k as f64 / n as f64).sin();
        (spec.mass / a * 4.0 * s * s + a * spec.mass * omega * omega) / spec.hbar
    })
}

/// Exact `<q^2>` of the harmonic lattice; `None` for other potentials.
pub fn harmonic_lattice_q2(spec: &DiscreteActionSpec, n: usize) -> Option<f64> {
    harmonic_lattice_correlator(spec, n, 0)
}

/// Exact `<q_0 q_lag>` of the harmonic lattice.
pub fn harmonic_lattice_correlator(spec: &DiscreteActionSpec, n: usize, lag: usize) -> Option<f64> {
    let omega = harmonic_omega(spec)?;
    let sum: f64 = modes(spec, omega, n)
        .enumerate()
        .map(|(k, kk)| (2.0 * PI * (k * lag) as f64 / n as f64).cos() / kk)
        .sum();
    Some(sum / n as f64)
}

/// Lattice gap `acosh(1 + a^2 omega^2 / 2) / a`.
pub fn harmonic_lattice_gap(spec: &DiscreteActionSpec) -> Option<f64> {
    let omega = harmonic_omega(spec)?;
    let a = spec.spacing;
    Some((1.0 + 0.5 * a * a * omega * omega).acosh() / a)
}
