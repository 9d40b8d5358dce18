//! A two-qubit state whose entropy drops when a conjugate pair of
//! off-diagonal entries is set to zero.
//!
//! Zeroing entries inside the off-diagonal blocks leaves both marginals
//! unchanged, so this shows that removing coherences does not always raise
//! the entropy.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measures::von_neumann_entropy;
use crate::scalar::C;
use crate::states::validate_density;

pub const ENTRIES: [f64; 16] = [
    0.25, 0.14, -0.02, -0.01, //
    0.14, 0.25, -0.01, -0.02, //
    -0.02, -0.01, 0.25, 0.14, //
    -0.01, -0.02, 0.14, 0.25,
];

/// Conjugate pairs zeroed by [`run_counterexample`]: `(00,11)` and `(01,10)`.
pub const PAIRS: [(usize, usize); 2] = [(0, 3), (1, 2)];

pub fn counterexample_matrix() -> ComplexMatrix<f64> {
    ComplexMatrix::from_real(4, &ENTRIES).expect("4x4")
}

/// Sets entries `(i, j)` and `(j, i)` to zero.
pub fn zero_conjugate_pair(m: &ComplexMatrix<f64>, i: usize, j: usize) -> Result<ComplexMatrix<f64>> {
    let n = m.ensure_square()?;
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, bound: n });
        }
    }
    if i == j {
        return Err(Error::DiagonalForbidden(i));
    }
    m.ensure_hermitian(1e-12)?;
    let mut out = m.clone();
    out[(i, j)] = C::new(0.0, 0.0);
    out[(j, i)] = C::new(0.0, 0.0);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroingReport {
    pub original_spectrum: Vec<f64>,
    pub modified_spectrum: Vec<f64>,
    pub original_entropy: f64,
    pub modified_entropy: f64,
    pub zeroed_positions: Vec<(usize, usize)>,
    pub entropy_delta: f64,
}

pub fn zeroing_report(m: &ComplexMatrix<f64>, i: usize, j: usize) -> Result<ZeroingReport> {
    let before = validate_density(m, 1e-10)?;
    let after = validate_density(&zero_conjugate_pair(m, i, j)?, 1e-10)?;
    let original_entropy = von_neumann_entropy(&before);
    let modified_entropy = von_neumann_entropy(&after);
    Ok(ZeroingReport {
        original_spectrum: before.spectrum().to_vec(),
        modified_spectrum: after.spectrum().to_vec(),
        original_entropy,
        modified_entropy,
        zeroed_positions: vec![(i, j), (j, i)],
        entropy_delta: modified_entropy - original_entropy,
    })
}

/// Both zeroings, each applied to a fresh copy of the matrix.
pub fn run_counterexample() -> (ZeroingReport, ZeroingReport) {
    let m = counterexample_matrix();
    let [a, b] = PAIRS.map(|(i, j)| zeroing_report(&m, i, j).expect("the matrix is a valid state"));
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{distance, Norm};
    use crate::states::BipartiteState;

    #[test]
    fn published_entropies() {
        let (first, second) = run_counterexample();
        assert!((first.original_entropy - 1.7555).abs() < 5e-4);
        assert!((first.modified_entropy - 1.7546).abs() < 5e-4);
        assert!(first.entropy_delta < 0.0);
        assert!(second.modified_entropy < 1.7555);
        assert!(second.entropy_delta < 0.0);
        // frozen from an independent evaluation of the spectra
        assert!((first.original_entropy - 1.755521562113138).abs() < 1e-12);
        assert!((first.modified_entropy - 1.754566474729674).abs() < 1e-12);
        assert!((second.modified_entropy - 1.754566474729674).abs() < 1e-12);
        let expected = [0.09492189, 0.12489588, 0.36510412, 0.41507811];
        for (l, e) in first.modified_spectrum.iter().zip(expected) {
            assert!((l - e).abs() < 1e-8);
        }
        assert_eq!(first.zeroed_positions, vec![(0, 3), (3, 0)]);
    }

    #[test]
    fn zeroing_edits_only_the_pair() {
        let m = counterexample_matrix();
        let z = zero_conjugate_pair(&m, 0, 3).unwrap();
        assert_eq!(z[(0, 3)].re, 0.0);
        assert_eq!(z[(3, 0)].re, 0.0);
        for r in 0..4 {
            for c in 0..4 {
                if (r, c) != (0, 3) && (r, c) != (3, 0) {
                    assert_eq!(z[(r, c)], m[(r, c)]);
                }
            }
        }
        assert!(z.hermiticity_defect() == 0.0);
        assert!((z.trace().re - 1.0).abs() < 1e-15);
        let again = zero_conjugate_pair(&z, 0, 3).unwrap();
        assert_eq!(again.as_slice(), z.as_slice());
    }

    #[test]
    fn marginals_unchanged() {
        let m = counterexample_matrix();
        let before = BipartiteState::from_matrix(&m, 2, 2).unwrap();
        for (i, j) in PAIRS {
            let after = BipartiteState::from_matrix(&zero_conjugate_pair(&m, i, j).unwrap(), 2, 2).unwrap();
            assert!(distance(before.rho_a().matrix(), after.rho_a().matrix(), Norm::Frobenius).unwrap() < 1e-15);
            assert!(distance(before.rho_b().matrix(), after.rho_b().matrix(), Norm::Frobenius).unwrap() < 1e-15);
        }
    }

    #[test]
    fn rejects_bad_positions() {
        let m = counterexample_matrix();
        assert_eq!(zero_conjugate_pair(&m, 1, 1), Err(Error::DiagonalForbidden(1)));
        assert!(matches!(
            zero_conjugate_pair(&m, 0, 4),
            Err(Error::IndexOutOfRange { index: 4, bound: 4 })
        ));
        let mut skew = m.clone();
        skew[(0, 1)] = C::new(0.5, 0.0);
        assert!(matches!(
            zero_conjugate_pair(&skew, 0, 3),
            Err(Error::NotHermitian { .. })
        ));
    }
}
