//! Dense complex linear algebra: Hermitian eigendecomposition, functions of
//! PSD matrices on their support, tensor products and partial traces.
//!
//! Bipartite operators use the A-major composite index `i * d_b + k`.

mod eigen;
mod matrix;

pub use eigen::{
    expm_i_hermitian, fix_phase, hermitian_eig, hermitian_eig_tol, numerical_rank, singular_values, EigenDecomposition,
};
pub(crate) use eigen::{jacobi, unitary_from_eig};
pub use matrix::ComplexMatrix;

use num_traits::Zero;

use crate::error::{dim_mismatch, Error, Result};
use crate::scalar::{Real, C};

/// Which tensor factor survives a partial trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    A,
    B,
}

/// Matrix norm used by [`distance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Norm {
    Frobenius,
    /// Sum of singular values.
    Trace,
}

/// Applies `f` to the eigenvalues of a PSD matrix above `cutoff`, mapping
/// the rest to zero: `V diag(f(l) if l > cutoff else 0) V^H`.
///
/// A `cutoff` of `None` uses the default support cutoff of the scalar type.
pub fn matrix_function_on_support<T: Real>(
    m: &ComplexMatrix<T>,
    f: impl Fn(T) -> T,
    cutoff: Option<T>,
) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(m)?;
    function_of_eig(&eig, f, cutoff)
}

pub(crate) fn function_of_eig<T: Real>(
    eig: &EigenDecomposition<T>,
    f: impl Fn(T) -> T,
    cutoff: Option<T>,
) -> Result<ComplexMatrix<T>> {
    let cutoff = cutoff.unwrap_or_else(|| T::support_cutoff(eig.max_eigenvalue()));
    let lowest = eig.min_eigenvalue();
    if lowest < -cutoff {
        return Err(Error::NegativeEigenvalue {
            value: lowest.as_f64(),
            cutoff: cutoff.as_f64(),
        });
    }
    Ok(eig.reconstruct_with(|l| if l > cutoff { f(l) } else { T::zero() }))
}

/// Orthogonal projection onto the eigenvectors with eigenvalue above the
/// default support cutoff.
pub fn support_projection<T: Real>(m: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    matrix_function_on_support(m, |_| T::one(), None)
}

pub fn kron<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let (br, bc) = (b.rows(), b.cols());
    ComplexMatrix::from_fn(a.rows() * br, a.cols() * bc, |r, s| {
        a[(r / br, s / bc)] * b[(r % br, s % bc)]
    })
}

pub fn partial_trace<T: Real>(m: &ComplexMatrix<T>, d_a: usize, d_b: usize, keep: Keep) -> Result<ComplexMatrix<T>> {
    let dim = m.ensure_square()?;
    if dim != d_a * d_b {
        return Err(dim_mismatch(format!("{d_a}*{d_b}"), dim));
    }
    Ok(match keep {
        Keep::A => ComplexMatrix::from_fn(d_a, d_a, |i, j| {
            (0..d_b).fold(C::zero(), |acc, k| acc + m[(i * d_b + k, j * d_b + k)])
        }),
        Keep::B => ComplexMatrix::from_fn(d_b, d_b, |k, l| {
            (0..d_a).fold(C::zero(), |acc, i| acc + m[(i * d_b + k, i * d_b + l)])
        }),
    })
}

pub fn distance<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>, norm: Norm) -> Result<T> {
    if (a.rows(), a.cols()) != (b.rows(), b.cols()) {
        return Err(dim_mismatch(
            format!("{}x{}", a.rows(), a.cols()),
            format!("{}x{}", b.rows(), b.cols()),
        ));
    }
    let diff = a - b;
    Ok(match norm {
        Norm::Frobenius => diff.frobenius_norm(),
        Norm::Trace => singular_values(&diff).into_iter().sum(),
    })
}

/// Half the trace norm of `a - b`.
pub fn trace_distance<T: Real>(a: &ComplexMatrix<T>, b: &ComplexMatrix<T>) -> Result<T> {
    Ok(distance(a, b, Norm::Trace)? * T::lit(0.5))
}

/// Orthonormalises the columns of `m` by modified Gram-Schmidt.
///
/// For a Gaussian input this is the Q factor with a positive diagonal R,
/// i.e. a Haar-distributed isometry.
pub fn orthonormalize_columns<T: Real>(m: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let mut q = m.clone();
    for j in 0..q.cols() {
        let mut col = q.column(j);
        // two passes keep the result orthogonal to working precision
        for _ in 0..2 {
            for k in 0..j {
                let prev = q.column(k);
                let proj = prev
                    .iter()
                    .zip(&col)
                    .fold(C::zero(), |acc, (&p, &x)| acc + p.conj() * x);
                for (x, &p) in col.iter_mut().zip(&prev) {
                    *x = *x - p * proj;
                }
            }
        }
        let n = col.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if n > T::zero() {
            for x in col.iter_mut() {
                *x = *x / n;
            }
        }
        q.set_column(j, &col);
    }
    q
}

/// Extends `k` orthonormal columns to a full unitary by Gram-Schmidt
/// against the standard basis.
pub fn complete_basis<T: Real>(cols: &[Vec<C<T>>], dim: usize) -> ComplexMatrix<T> {
    let mut basis: Vec<Vec<C<T>>> = cols.to_vec();
    let mut e = 0;
    while basis.len() < dim && e < dim {
        let mut v = vec![C::zero(); dim];
        v[e] = C::new(T::one(), T::zero());
        e += 1;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.iter().zip(&v).fold(C::zero(), |acc, (&p, &x)| acc + p.conj() * x);
                for (x, &p) in v.iter_mut().zip(b) {
                    *x = *x - p * proj;
                }
            }
        }
        let n = v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt();
        if n > T::lit(1e-6) {
            for x in v.iter_mut() {
                *x = *x / n;
            }
            basis.push(v);
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (j, col) in basis.iter().enumerate() {
        u.set_column(j, col);
    }
    u
}
