use super::{time_reflect, CovarianceOp, OsError, TestFunction};
use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

/// Absolute tolerance on Gram eigenvalues.
pub const POSITIVITY_TOLERANCE: f64 = 1e-10;

/// `sum_i c_i exp(i phi(f_i))`
#[derive(Debug, Clone, PartialEq)]
pub struct FieldStateExpr {
    pub terms: Vec<(Complex64, TestFunction)>,
}

impl FieldStateExpr {
    pub fn new(terms: Vec<(Complex64, TestFunction)>) -> Result<Self, OsError> {
        let first = terms
            .first()
            .ok_or_else(|| OsError::InvalidArgument("state needs at least one term".into()))?;
        if terms.iter().any(|(_, f)| f.lattice != first.1.lattice) {
            return Err(OsError::LatticeMismatch);
        }
        Ok(Self { terms })
    }

    pub fn functions(&self) -> Vec<TestFunction> {
        self.terms.iter().map(|(_, f)| f.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    /// `M[(i, j)] = int exp(i phi(f_i)) exp(-i phi(Theta f'_j)) dmu`.
    pub entries: DMatrix<Complex64>,
    /// `max |M - M^dagger|`, when square.
    pub hermiticity_error: Option<f64>,
    /// Smallest eigenvalue of the Hermitian part, when square.
    pub min_eigenvalue: Option<f64>,
    /// `min_eigenvalue >= -tolerance`.
    pub certified: bool,
}

fn check_positive_support(fs: &[TestFunction], offset: usize) -> Result<(), OsError> {
    for (k, f) in fs.iter().enumerate() {
        if let Some(t) = f.min_time() {
            if t <= 0 {
                return Err(OsError::PositivityDomain {
                    index: offset + k,
                    time: t,
                });
            }
        }
    }
    Ok(())
}

/// Gram matrix `M_{ij} = exp(-<g, C g>/2)` with `g = f_i - Theta f'_j` for
/// kets `f` and bras `f'`, all supported at positive time.
pub fn gram_matrix(
    cov: &CovarianceOp,
    kets: &[TestFunction],
    bras: &[TestFunction],
    tolerance: f64,
) -> Result<GramMatrix, OsError> {
    if kets.is_empty() || bras.is_empty() {
        return Err(OsError::InvalidArgument("empty test-function set".into()));
    }
    check_positive_support(kets, 0)?;
    check_positive_support(bras, kets.len())?;
    let reflected: Vec<TestFunction> = bras.iter().map(time_reflect).collect();
    let (n, m) = (kets.len(), bras.len());
    let values: Vec<f64> = (0..n * m)
        .into_par_iter()
        .map(|k| {
            let (i, j) = (k / m, k % m);
            let g = reflected[j].axpy(-1.0, &kets[i])?;
            cov.characteristic(&g)
        })
        .collect::<Result<_, _>>()?;
    let entries = DMatrix::from_fn(n, m, |i, j| Complex64::new(values[i * m + j], 0.0));

    let (hermiticity_error, min_eigenvalue) = if n == m {
        let herm = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| (entries[(i, j)] - entries[(j, i)].conj()).norm())
            .fold(0.0, f64::max);
        let hpart = (&entries + entries.adjoint()).map(|z| z * 0.5);
        let eig = hpart.symmetric_eigenvalues();
        (Some(herm), Some(eig.iter().copied().fold(f64::INFINITY, f64::min)))
    } else {
        (None, None)
    };
    Ok(GramMatrix {
        entries,
        hermiticity_error,
        min_eigenvalue,
        certified: min_eigenvalue.is_some_and(|e| e >= -tolerance),
    })
}

/// `<b|a> = sum_{ij} conj(b_j) a_i M_{ij}`.
pub fn inner_product(cov: &CovarianceOp, a: &FieldStateExpr, b: &FieldStateExpr) -> Result<Complex64, OsError> {
    let m = gram_matrix(cov, &a.functions(), &b.functions(), POSITIVITY_TOLERANCE)?;
    let mut sum = Complex64::new(0.0, 0.0);
    for (i, (ci, _)) in a.terms.iter().enumerate() {
        for (j, (cj, _)) in b.terms.iter().enumerate() {
            sum += cj.conj() * ci * m.entries[(i, j)];
        }
    }
    Ok(sum)
}

/// Joint translation of every test function; the reflection plane stays put.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Shift {
    pub time: i64,
    pub space: i64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShiftResult {
    pub shift: Shift,
    /// `max |M_shifted - M|`; only meaningful for pure space shifts.
    pub max_deviation: f64,
    pub min_eigenvalue: f64,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TranslationReport {
    pub base: GramMatrix,
    pub results: Vec<ShiftResult>,
}

impl TranslationReport {
    /// Space-only shifts preserve `M` to `tolerance` and every shifted set
    /// stays certified.
    pub fn passed(&self, tolerance: f64) -> bool {
        self.base.certified
            && self
                .results
                .iter()
                .all(|r| r.certified && (r.shift.time != 0 || r.max_deviation <= tolerance))
    }
}

/// Re-evaluates the Gram matrix of `functions` under each shift. Time
/// shifts must be forward: the positive-time translations form a semigroup.
pub fn translation_covariance_check(
    cov: &CovarianceOp,
    functions: &[TestFunction],
    shifts: &[Shift],
    tolerance: f64,
) -> Result<TranslationReport, OsError> {
    if let Some(s) = shifts.iter().find(|s| s.time < 0) {
        return Err(OsError::SemigroupViolation { shift: s.time });
    }
    let base = gram_matrix(cov, functions, functions, tolerance)?;
    let mut results = Vec::with_capacity(shifts.len());
    for &shift in shifts {
        let moved: Vec<TestFunction> = functions
            .iter()
            .map(|f| f.shifted(shift.time, shift.space))
            .collect::<Result<_, _>>()?;
        let g = gram_matrix(cov, &moved, &moved, tolerance)?;
        let max_deviation = (&g.entries - &base.entries).iter().map(|z| z.norm()).fold(0.0, f64::max);
        results.push(ShiftResult {
            shift,
            max_deviation,
            min_eigenvalue: g.min_eigenvalue.unwrap_or(f64::NAN),
            certified: g.certified,
        });
    }
    Ok(TranslationReport { base, results })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::os_field::Lattice;

    fn cov() -> CovarianceOp {
        CovarianceOp::new(Lattice::time_only(16, 1.0).unwrap(), 1.0).unwrap()
    }

    #[test]
    fn zero_function_gives_unit_matrix() {
        let c = cov();
        let z = TestFunction::zeros(c.lattice);
        let g = gram_matrix(&c, std::slice::from_ref(&z), std::slice::from_ref(&z), POSITIVITY_TOLERANCE).unwrap();
        assert_eq!(g.entries[(0, 0)], Complex64::new(1.0, 0.0));
        assert!(g.certified);
    }

    #[test]
    fn negative_support_is_rejected() {
        let c = cov();
        let f = TestFunction::spike(c.lattice, 0, 0, 1.0).unwrap();
        assert!(matches!(
            gram_matrix(&c, std::slice::from_ref(&f), std::slice::from_ref(&f), POSITIVITY_TOLERANCE),
            Err(OsError::PositivityDomain { index: 0, time: 0 })
        ));
    }

    #[test]
    fn backward_time_shift_is_rejected() {
        let c = cov();
        let f = TestFunction::spike(c.lattice, 3, 0, 1.0).unwrap();
        let shifts = [Shift { time: -1, space: 0 }];
        assert!(matches!(
            translation_covariance_check(&c, &[f], &shifts, POSITIVITY_TOLERANCE),
            Err(OsError::SemigroupViolation { shift: -1 })
        ));
    }
}
