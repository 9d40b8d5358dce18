//! Cyclic Jacobi eigensolver for Hermitian matrices and a one-sided Jacobi
//! SVD for singular values of arbitrary complex matrices.

use num_traits::Zero;

use super::ComplexMatrix;
use crate::error::Result;
use crate::scalar::{c, cr, Real, C};

const MAX_SWEEPS: usize = 100;

/// Spectral decomposition `M = V diag(eigenvalues) V^H`.
#[derive(Debug, Clone)]
pub struct EigenDecomposition<T: Real> {
    /// Ascending.
    pub eigenvalues: Vec<T>,
    /// Unitary; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix<T>,
}

impl<T: Real> EigenDecomposition<T> {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvector(&self, k: usize) -> Vec<C<T>> {
        self.eigenvectors.column(k)
    }

    /// `V diag(f(lambda)) V^H`.
    pub fn reconstruct_with(&self, f: impl Fn(T) -> T) -> ComplexMatrix<T> {
        let n = self.dim();
        let v = &self.eigenvectors;
        let weights: Vec<T> = self.eigenvalues.iter().map(|&l| f(l)).collect();
        ComplexMatrix::from_fn(n, n, |i, j| {
            let mut acc = C::zero();
            for (k, &w) in weights.iter().enumerate() {
                if w != T::zero() {
                    acc = acc + v[(i, k)] * v[(j, k)].conj() * w;
                }
            }
            acc
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix<T> {
        self.reconstruct_with(|l| l)
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues.last().copied().unwrap_or_else(T::zero)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues.first().copied().unwrap_or_else(T::zero)
    }
}

/// Eigendecomposition of a Hermitian matrix with the default Hermiticity
/// tolerance of the scalar type.
pub fn hermitian_eig<T: Real>(m: &ComplexMatrix<T>) -> Result<EigenDecomposition<T>> {
    m.ensure_hermitian(T::check_tol())?;
    Ok(jacobi(&m.hermitian_part()))
}

/// Same as [`hermitian_eig`] but with a caller supplied tolerance.
pub fn hermitian_eig_tol<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<EigenDecomposition<T>> {
    m.ensure_hermitian(tol)?;
    Ok(jacobi(&m.hermitian_part()))
}

/// Cyclic-by-row Jacobi on an exactly Hermitian input.
///
/// Each rotation is `J = [[c, s e^{i phi}], [-s e^{-i phi}, c]]` acting on
/// the `(p, q)` plane, chosen so that `(J^H A J)_{pq} = 0`.
pub(crate) fn jacobi<T: Real>(input: &ComplexMatrix<T>) -> EigenDecomposition<T> {
    let n = input.rows();
    let mut a = input.clone();
    let mut v = ComplexMatrix::identity(n);
    let eps = T::epsilon();
    let scale = a.frobenius_norm();

    if scale > T::zero() {
        for _ in 0..MAX_SWEEPS {
            let mut off = T::zero();
            for p in 0..n {
                for q in p + 1..n {
                    off = off + a[(p, q)].norm_sqr();
                }
            }
            if off.sqrt() <= eps * scale {
                break;
            }
            let negligible = eps * eps * scale;
            for p in 0..n {
                for q in p + 1..n {
                    let apq = a[(p, q)];
                    let r = apq.norm();
                    if r <= negligible {
                        continue;
                    }
                    let phase = apq / r;
                    let app = a[(p, p)].re;
                    let aqq = a[(q, q)].re;
                    let theta = (aqq - app) / (T::lit(2.0) * r);
                    let t = if theta.is_infinite() {
                        T::zero()
                    } else {
                        let sgn = if theta >= T::zero() { T::one() } else { -T::one() };
                        sgn / (theta.abs() + (theta * theta + T::one()).sqrt())
                    };
                    let cs = T::one() / (t * t + T::one()).sqrt();
                    let sn = t * cs;
                    let j_pp = cr(cs);
                    let j_pq = phase * sn;
                    let j_qp = -phase.conj() * sn;
                    let j_qq = cr(cs);
                    rotate(&mut a, &mut v, p, q, [j_pp, j_pq, j_qp, j_qq]);
                    a[(p, q)] = C::zero();
                    a[(q, p)] = C::zero();
                    a[(p, p)] = cr(app - t * r);
                    a[(q, q)] = cr(aqq + t * r);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        a[(i, i)]
            .re
            .partial_cmp(&a[(j, j)].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues = order.iter().map(|&i| a[(i, i)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// `A <- J^H A J`, `V <- V J` for the 2x2 rotation `j = [pp, pq, qp, qq]`.
fn rotate<T: Real>(a: &mut ComplexMatrix<T>, v: &mut ComplexMatrix<T>, p: usize, q: usize, j: [C<T>; 4]) {
    let n = a.rows();
    let [j_pp, j_pq, j_qp, j_qq] = j;
    for i in 0..n {
        let aip = a[(i, p)];
        let aiq = a[(i, q)];
        a[(i, p)] = aip * j_pp + aiq * j_qp;
        a[(i, q)] = aip * j_pq + aiq * j_qq;
    }
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    for i in 0..n {
        let vip = v[(i, p)];
        let viq = v[(i, q)];
        v[(i, p)] = vip * j_pp + viq * j_qp;
        v[(i, q)] = vip * j_pq + viq * j_qq;
    }
}

/// Singular values (descending) by one-sided Jacobi orthogonalisation of
/// the columns.
pub fn singular_values<T: Real>(m: &ComplexMatrix<T>) -> Vec<T> {
    let mut a = if m.cols() > m.rows() { m.adjoint() } else { m.clone() };
    let rows = a.rows();
    let cols = a.cols();
    let eps = T::epsilon();

    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..cols {
            for j in i + 1..cols {
                let mut alpha = T::zero();
                let mut beta = T::zero();
                let mut gamma = C::zero();
                for r in 0..rows {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    alpha = alpha + x.norm_sqr();
                    beta = beta + y.norm_sqr();
                    gamma = gamma + x.conj() * y;
                }
                let g = gamma.norm();
                if g <= eps * (alpha * beta).sqrt() || g <= T::min_positive_value() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (T::lit(2.0) * g);
                let sgn = if zeta >= T::zero() { T::one() } else { -T::one() };
                let t = sgn / (zeta.abs() + (zeta * zeta + T::one()).sqrt());
                let cs = T::one() / (t * t + T::one()).sqrt();
                let sn = t * cs;
                for r in 0..rows {
                    let x = a[(r, i)];
                    let y = a[(r, j)];
                    a[(r, i)] = x * cs - y * phase.conj() * sn;
                    a[(r, j)] = x * phase * sn + y * cs;
                }
            }
        }
        if !rotated {
            break;
        }
    }

    let mut sv: Vec<T> = (0..cols)
        .map(|j| (0..rows).map(|r| a[(r, j)].norm_sqr()).sum::<T>().sqrt())
        .collect();
    sv.sort_by(|x, y| y.partial_cmp(x).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Numerical rank with a cutoff relative to the largest singular value.
pub fn numerical_rank<T: Real>(m: &ComplexMatrix<T>, rel_cutoff: T) -> usize {
    let sv = singular_values(m);
    let top = sv.first().copied().unwrap_or_else(T::zero);
    if top <= T::zero() {
        return 0;
    }
    sv.iter().filter(|&&s| s > rel_cutoff * top).count()
}

/// `exp(i H)` for Hermitian `H`, via its spectral decomposition.
pub fn expm_i_hermitian<T: Real>(h: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let eig = hermitian_eig(h)?;
    Ok(unitary_from_eig(&eig, T::one()))
}

/// `V diag(e^{i tau lambda}) V^H`.
pub(crate) fn unitary_from_eig<T: Real>(eig: &EigenDecomposition<T>, tau: T) -> ComplexMatrix<T> {
    let n = eig.dim();
    let v = &eig.eigenvectors;
    let phases: Vec<C<T>> = eig
        .eigenvalues
        .iter()
        .map(|&l| {
            let x = tau * l;
            c(x.cos(), x.sin())
        })
        .collect();
    ComplexMatrix::from_fn(n, n, |i, j| {
        (0..n).fold(C::zero(), |acc, k| acc + v[(i, k)] * phases[k] * v[(j, k)].conj())
    })
}

/// Makes the largest-magnitude component of `v` real and positive.
pub fn fix_phase<T: Real>(v: &mut [C<T>]) {
    let Some(pivot) = v
        .iter()
        .enumerate()
        .max_by(|x, y| x.1.norm().partial_cmp(&y.1.norm()).unwrap_or(std::cmp::Ordering::Equal))
        .map(|(i, _)| i)
    else {
        return;
    };
    let r = v[pivot].norm();
    if r <= T::zero() {
        return;
    }
    let phase = v[pivot].conj() / r;
    for z in v.iter_mut() {
        *z = *z * phase;
    }
    v[pivot] = C::new(v[pivot].re, T::zero());
}
