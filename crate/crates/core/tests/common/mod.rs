//! Reference values computed independently of the library.
#![allow(dead_code)]

use nalgebra::DMatrix;

/// Harmonic-oscillator action between `(q0, 0)` and `(q1, t)`.
pub fn ho_action(m: f64, w: f64, q0: f64, q1: f64, t: f64) -> f64 {
    m * w / (2.0 * (w * t).sin()) * ((q0 * q0 + q1 * q1) * (w * t).cos() - 2.0 * q0 * q1)
}

pub fn free_action(m: f64, dq: f64, t: f64) -> f64 {
    m * dq * dq / (2.0 * t)
}

/// `hbar K^-1` for the periodic harmonic lattice action
/// `sum m (q_{i+1} - q_i)^2 / (2a) + a m w^2 q_i^2 / 2`.
pub fn harmonic_lattice_covariance(m: f64, w: f64, hbar: f64, a: f64, n: usize) -> DMatrix<f64> {
    let mut k = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        let j = (i + 1) % n;
        k[(i, i)] += 2.0 * m / a + a * m * w * w;
        k[(i, j)] -= m / a;
        k[(j, i)] -= m / a;
    }
    k.try_inverse().expect("positive definite") * hbar
}

/// `<q_0^2>` under `exp(-S/hbar)` on a periodic `n`-site lattice with site
/// potential `v`, by trapezoid quadrature of the transfer kernel on
/// `points` nodes in `[-cut, cut]`.
pub fn transfer_matrix_q2(v: impl Fn(f64) -> f64, m: f64, hbar: f64, a: f64, n: usize, cut: f64, points: usize) -> f64 {
    let h = 2.0 * cut / (points - 1) as f64;
    let x: Vec<f64> = (0..points).map(|i| -cut + i as f64 * h).collect();
    let w: Vec<f64> = (0..points)
        .map(|i| if i == 0 || i == points - 1 { 0.5 * h } else { h })
        .collect();
    // Symmetric kernel: each site potential is split over its two links.
    let t = DMatrix::from_fn(points, points, |i, j| {
        let s = m * (x[i] - x[j]).powi(2) / (2.0 * a) + 0.5 * a * (v(x[i]) + v(x[j]));
        w[i].sqrt() * (-s / hbar).exp() * w[j].sqrt()
    });
    let mut p = DMatrix::<f64>::identity(points, points);
    for _ in 0..n {
        p = &p * &t;
    }
    let z = p.trace();
    let num: f64 = (0..points).map(|i| x[i] * x[i] * p[(i, i)]).sum();
    num / z
}

/// Probability mass of `N(mean, var)` in `[lo, hi]`.
pub fn gaussian_mass(mean: f64, var: f64, lo: f64, hi: f64) -> f64 {
    let z = |x: f64| (x - mean) / (2.0 * var).sqrt();
    0.5 * (libm::erf(z(hi)) - libm::erf(z(lo)))
}

/// Dense backward-Euler propagator `(I - dt A)^-1` of a tridiagonal
/// generator given as `(sub, diag, sup)`.
pub fn dense_step(sub: &[f64], diag: &[f64], sup: &[f64], dt: f64) -> DMatrix<f64> {
    let n = diag.len();
    let mut m = DMatrix::<f64>::identity(n, n);
    for i in 0..n {
        m[(i, i)] -= dt * diag[i];
        if i > 0 {
            m[(i, i - 1)] -= dt * sub[i];
        }
        if i + 1 < n {
            m[(i, i + 1)] -= dt * sup[i];
        }
    }
    m.try_inverse().expect("M-matrix is invertible")
}

/// Time-only Dirichlet lattice operator `-d^2/dt^2 + m^2` on `n` sites.
pub fn dirichlet_operator(n: usize, a: f64, mass: f64) -> DMatrix<f64> {
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            2.0 / (a * a) + mass * mass
        } else if i.abs_diff(j) == 1 {
            -1.0 / (a * a)
        } else {
            0.0
        }
    })
}

/// Mean and standard error.
pub fn mean_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
