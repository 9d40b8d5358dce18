//! Validated density matrices, bipartite block structure and random states.

use rand::Rng;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{hermitian_eig_tol, jacobi, kron, partial_trace, ComplexMatrix, Keep};
use crate::random::{dirichlet_uniform, gaussian_matrix, haar_unitary, rng_from_seed};
use crate::scalar::{cr, Real, C};

/// Probabilities at or below this are treated as absent outcomes.
pub const ZERO_PROBABILITY: f64 = 1e-12;

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone)]
pub struct DensityMatrix<T: Real> {
    mat: ComplexMatrix<T>,
    spectrum: Vec<T>,
    support_rank: usize,
}

impl<T: Real> DensityMatrix<T> {
    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.mat
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    /// Eigenvalues, ascending, nonnegative.
    pub fn spectrum(&self) -> &[T] {
        &self.spectrum
    }

    pub fn support_rank(&self) -> usize {
        self.support_rank
    }

    pub fn support_cutoff(&self) -> T {
        T::support_cutoff(self.spectrum.last().copied().unwrap_or_else(T::zero))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let inv = T::one() / T::lit(dim as f64);
        Self::from_spectrum(ComplexMatrix::identity(dim).scale(inv), vec![inv; dim])
    }

    /// `|psi><psi|` for a (not necessarily normalised) vector.
    pub fn pure(psi: &[C<T>]) -> Self {
        let norm = psi.iter().map(|z| z.norm_sqr()).sum::<T>();
        let m = ComplexMatrix::outer(psi, psi).scale(T::one() / norm);
        let mut spectrum = vec![T::zero(); psi.len()];
        if let Some(last) = spectrum.last_mut() {
            *last = T::one();
        }
        Self::from_spectrum(m, spectrum)
    }

    /// Projects an approximately valid operator onto the state space:
    /// Hermitian part, negative eigenvalues clipped to zero, trace
    /// renormalised. Panics only on a zero or non-finite operator.
    pub fn project(m: &ComplexMatrix<T>) -> Self {
        let h = m.hermitian_part();
        let eig = jacobi(&h);
        let clipped: Vec<T> = eig.eigenvalues.iter().map(|&l| l.max(T::zero())).collect();
        let total: T = clipped.iter().copied().sum();
        assert!(
            total > T::zero() && total.is_finite(),
            "cannot project a zero operator onto states"
        );
        let spectrum: Vec<T> = clipped.iter().map(|&l| l / total).collect();
        let mat = if eig.min_eigenvalue() < T::zero() {
            eig.reconstruct_with(|l| l.max(T::zero()) / total)
        } else {
            h.scale(T::one() / total)
        };
        Self::from_spectrum(mat, spectrum)
    }

    fn from_spectrum(mat: ComplexMatrix<T>, spectrum: Vec<T>) -> Self {
        let cutoff = T::support_cutoff(spectrum.last().copied().unwrap_or_else(T::zero));
        let support_rank = spectrum.iter().filter(|&&l| l > cutoff).count();
        Self {
            mat,
            spectrum,
            support_rank,
        }
    }
}

/// Checks that `m` is a density matrix within `tol`.
///
/// A slightly negative spectrum (down to `-tol`) is clipped to zero and the
/// trace renormalised; anything beyond `tol` is rejected.
pub fn validate_density<T: Real>(m: &ComplexMatrix<T>, tol: T) -> Result<DensityMatrix<T>> {
    m.ensure_square()?;
    if !m.is_finite() {
        return Err(Error::NotHermitian {
            deviation: f64::NAN,
            tol: tol.as_f64(),
        });
    }
    let eig = hermitian_eig_tol(m, tol)?;
    let lowest = eig.min_eigenvalue();
    if lowest < -tol {
        return Err(Error::NotPositive {
            min_eigenvalue: lowest.as_f64(),
            tol: tol.as_f64(),
        });
    }
    let trace: T = eig.eigenvalues.iter().copied().sum();
    if (trace - T::one()).abs() > tol {
        return Err(Error::TraceNotOne {
            trace: trace.as_f64(),
            tol: tol.as_f64(),
        });
    }
    if lowest < T::zero() {
        return Ok(DensityMatrix::project(m));
    }
    Ok(DensityMatrix::from_spectrum(m.hermitian_part(), eig.eigenvalues))
}

/// Density matrix on `H_A (x) H_B` with its factor dimensions.
#[derive(Debug, Clone)]
pub struct BipartiteState<T: Real> {
    state: DensityMatrix<T>,
    d_a: usize,
    d_b: usize,
}

impl<T: Real> BipartiteState<T> {
    pub fn new(state: DensityMatrix<T>, d_a: usize, d_b: usize) -> Result<Self> {
        if d_a == 0 || d_b == 0 || state.dim() != d_a * d_b {
            return Err(dim_mismatch(format!("{d_a}*{d_b}"), state.dim()));
        }
        Ok(Self { state, d_a, d_b })
    }

    /// Validates `m` with the default tolerance and tags its factors.
    pub fn from_matrix(m: &ComplexMatrix<T>, d_a: usize, d_b: usize) -> Result<Self> {
        Self::new(validate_density(m, T::check_tol())?, d_a, d_b)
    }

    pub fn product(rho_a: &DensityMatrix<T>, rho_b: &DensityMatrix<T>) -> Self {
        let m = kron(rho_a.matrix(), rho_b.matrix());
        Self {
            state: DensityMatrix::project(&m),
            d_a: rho_a.dim(),
            d_b: rho_b.dim(),
        }
    }

    pub fn state(&self) -> &DensityMatrix<T> {
        &self.state
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        self.state.matrix()
    }

    pub fn d_a(&self) -> usize {
        self.d_a
    }

    pub fn d_b(&self) -> usize {
        self.d_b
    }

    /// The `d_b x d_b` block at position `(a, a2)`.
    pub fn block(&self, a: usize, a2: usize) -> Result<ComplexMatrix<T>> {
        for idx in [a, a2] {
            if idx >= self.d_a {
                return Err(Error::IndexOutOfRange {
                    index: idx,
                    bound: self.d_a,
                });
            }
        }
        Ok(self.matrix().submatrix(a * self.d_b, a2 * self.d_b, self.d_b, self.d_b))
    }

    pub fn reduced(&self, keep: Keep) -> DensityMatrix<T> {
        let m = partial_trace(self.matrix(), self.d_a, self.d_b, keep).expect("dimensions checked at construction");
        DensityMatrix::project(&m)
    }

    pub fn rho_a(&self) -> DensityMatrix<T> {
        self.reduced(Keep::A)
    }

    pub fn rho_b(&self) -> DensityMatrix<T> {
        self.reduced(Keep::B)
    }

    /// `(U (x) I) rho (U (x) I)^H` for a unitary (or isometry) `U` on A.
    pub fn apply_local(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        if u.cols() != self.d_a {
            return Err(dim_mismatch(self.d_a, u.cols()));
        }
        let big = kron(u, &ComplexMatrix::identity(self.d_b));
        let m = big.conjugate(self.matrix());
        Ok(Self {
            state: DensityMatrix::project(&m),
            d_a: u.rows(),
            d_b: self.d_b,
        })
    }

    /// The same state expressed in the A basis given by the columns of `u`.
    pub fn in_basis(&self, u: &ComplexMatrix<T>) -> Result<Self> {
        u.ensure_unitary(T::check_tol())?;
        if u.rows() != self.d_a {
            return Err(dim_mismatch(self.d_a, u.rows()));
        }
        self.apply_local(&u.adjoint())
    }
}

/// Outcome probabilities `p_a = tr(rho_aa)` and conditional states
/// `rho_a = rho_aa / p_a` of a measurement of A in the standard basis.
#[derive(Debug, Clone)]
pub struct ConditionalEnsemble<T: Real> {
    pub probs: Vec<T>,
    /// `None` where `p_a <= ZERO_PROBABILITY`.
    pub states: Vec<Option<DensityMatrix<T>>>,
}

impl<T: Real> ConditionalEnsemble<T> {
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Indices with nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_some())
            .map(|(i, _)| i)
    }
}

pub fn conditional_ensemble<T: Real>(s: &BipartiteState<T>) -> ConditionalEnsemble<T> {
    let mut probs = Vec::with_capacity(s.d_a());
    let mut states = Vec::with_capacity(s.d_a());
    for a in 0..s.d_a() {
        let blk = s.block(a, a).expect("index in range");
        let p = blk.trace().re;
        probs.push(p);
        states.push(if p > T::lit(ZERO_PROBABILITY) {
            Some(DensityMatrix::project(&blk.scale(T::one() / p)))
        } else {
            None
        });
    }
    ConditionalEnsemble { probs, states }
}

/// `G G^H / tr(G G^H)` with `G` a `d x rank` complex Gaussian matrix.
pub fn random_state<T: Real>(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix<T>> {
    random_state_with(&mut rng_from_seed(seed), d, rank)
}

pub fn random_state_with<T: Real, R: Rng + ?Sized>(rng: &mut R, d: usize, rank: usize) -> Result<DensityMatrix<T>> {
    if rank == 0 || rank > d {
        return Err(Error::BadRank { rank, dim: d });
    }
    let g: ComplexMatrix<T> = gaussian_matrix(rng, d, rank);
    Ok(DensityMatrix::project(&g.matmul(&g.adjoint())))
}

/// A random cq state together with the data it was built from.
#[derive(Debug, Clone)]
pub struct CqSample<T: Real> {
    pub state: BipartiteState<T>,
    /// Columns are the A basis in which the state is block diagonal.
    pub basis: ComplexMatrix<T>,
    pub probs: Vec<T>,
    pub conditionals: Vec<DensityMatrix<T>>,
}

/// `sum_i p_i U|i><i|U^H (x) rho_i` with a Haar basis `U`, flat Dirichlet
/// `p` and full-rank random `rho_i`.
pub fn random_cq_state<T: Real>(d_a: usize, d_b: usize, seed: u64) -> Result<BipartiteState<T>> {
    Ok(random_cq_sample(d_a, d_b, seed)?.state)
}

pub fn random_cq_sample<T: Real>(d_a: usize, d_b: usize, seed: u64) -> Result<CqSample<T>> {
    if d_a == 0 || d_b == 0 {
        return Err(Error::BadRank {
            rank: 0,
            dim: d_a.max(d_b),
        });
    }
    let mut rng = rng_from_seed(seed);
    let basis: ComplexMatrix<T> = haar_unitary(&mut rng, d_a);
    let probs: Vec<T> = dirichlet_uniform(&mut rng, d_a);
    let conditionals = (0..d_a)
        .map(|_| random_state_with(&mut rng, d_b, d_b))
        .collect::<Result<Vec<_>>>()?;
    let state = assemble_cq(&basis, &probs, &conditionals)?;
    Ok(CqSample {
        state,
        basis,
        probs,
        conditionals,
    })
}

/// `sum_i p_i |u_i><u_i| (x) rho_i` where `u_i` are the columns of `basis`.
pub fn assemble_cq<T: Real>(
    basis: &ComplexMatrix<T>,
    probs: &[T],
    conditionals: &[DensityMatrix<T>],
) -> Result<BipartiteState<T>> {
    let d_a = basis.rows();
    if probs.len() != basis.cols() || conditionals.len() != probs.len() {
        return Err(dim_mismatch(basis.cols(), probs.len()));
    }
    let d_b = conditionals.first().map(|r| r.dim()).unwrap_or(1);
    let mut m = ComplexMatrix::zeros(d_a * d_b, d_a * d_b);
    for (i, (p, rho)) in probs.iter().zip(conditionals).enumerate() {
        if rho.dim() != d_b {
            return Err(dim_mismatch(d_b, rho.dim()));
        }
        let u = basis.column(i);
        let proj = ComplexMatrix::outer(&u, &u).scale(*p);
        m = &m + &kron(&proj, rho.matrix());
    }
    BipartiteState::new(DensityMatrix::project(&m), d_a, d_b)
}

/// The two-qubit Bell state `|Phi+> = (|00> + |11>)/sqrt(2)`.
pub fn bell_state<T: Real>() -> BipartiteState<T> {
    let z = cr(T::zero());
    let o = cr(T::one());
    let st = DensityMatrix::pure(&[o, z, z, o]);
    BipartiteState::new(st, 2, 2).expect("4 = 2*2")
}

/// `(1 - p) I/4 + p |Phi+><Phi+|`.
pub fn werner_state<T: Real>(p: T) -> BipartiteState<T> {
    let bell = bell_state::<T>();
    let mixed = ComplexMatrix::<T>::identity(4).scale((T::one() - p) / T::lit(4.0));
    let m = &mixed + &bell.matrix().scale(p);
    BipartiteState::from_matrix(&m, 2, 2).expect("Werner states are valid for p in [-1/3, 1]")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{distance, Norm};
    use crate::scalar::c;

    fn counterexample() -> ComplexMatrix<f64> {
        ComplexMatrix::from_real(
            4,
            &[
                0.25, 0.14, -0.02, -0.01, 0.14, 0.25, -0.01, -0.02, -0.02, -0.01, 0.25, 0.14, -0.01, -0.02, 0.14, 0.25,
            ],
        )
        .unwrap()
    }

    #[test]
    fn maximally_mixed_is_valid() {
        let m = ComplexMatrix::<f64>::identity(4).scale(0.25);
        let rho = validate_density(&m, 1e-10).unwrap();
        assert_eq!(rho.support_rank(), 4);
    }

    #[test]
    fn rejects_negative_and_bad_trace() {
        let m = ComplexMatrix::<f64>::diag_real(&[1.5, -0.5]);
        assert!(matches!(validate_density(&m, 1e-10), Err(Error::NotPositive { .. })));
        let m = ComplexMatrix::<f64>::diag_real(&[0.5, 0.4]);
        assert!(matches!(validate_density(&m, 1e-10), Err(Error::TraceNotOne { .. })));
        let mut m = ComplexMatrix::<f64>::diag_real(&[0.5, 0.5]);
        m[(0, 1)] = c(0.1, 0.0);
        assert!(matches!(validate_density(&m, 1e-10), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn tiny_negative_eigenvalue_is_clipped() {
        let m = ComplexMatrix::<f64>::diag_real(&[1.0 + 5e-11, -5e-11]);
        let rho = validate_density(&m, 1e-10).unwrap();
        assert!(rho.spectrum().iter().all(|&l| l >= 0.0));
        assert!((rho.matrix().trace().re - 1.0).abs() < 1e-15);
        assert_eq!(rho.support_rank(), 1);
    }

    #[test]
    fn counterexample_matrix_is_a_state() {
        let rho = validate_density(&counterexample(), 1e-10).unwrap();
        assert_eq!(rho.support_rank(), 4);
    }

    #[test]
    fn blocks() {
        let sigma = random_state::<f64>(2, 2, 3).unwrap();
        let p0 = DensityMatrix::pure(&[c(1.0, 0.0), c(0.0, 0.0)]);
        let s = BipartiteState::product(&p0, &sigma);
        assert!(distance(&s.block(0, 0).unwrap(), sigma.matrix(), Norm::Frobenius).unwrap() < 1e-15);
        assert_eq!(s.block(0, 1).unwrap(), ComplexMatrix::zeros(2, 2));
        assert!(matches!(s.block(2, 0), Err(Error::IndexOutOfRange { .. })));

        let b = BipartiteState::from_matrix(&counterexample(), 2, 2).unwrap();
        let want = ComplexMatrix::from_real(2, &[-0.02, -0.01, -0.01, -0.02]).unwrap();
        assert!(distance(&b.block(0, 1).unwrap(), &want, Norm::Frobenius).unwrap() < 1e-15);
    }

    #[test]
    fn blocks_reassemble() {
        let s = BipartiteState::new(random_state::<f64>(6, 6, 5).unwrap(), 2, 3).unwrap();
        let mut m = ComplexMatrix::zeros(6, 6);
        for a in 0..2 {
            for a2 in 0..2 {
                let mut unit = ComplexMatrix::zeros(2, 2);
                unit[(a, a2)] = c(1.0, 0.0);
                m = &m + &kron(&unit, &s.block(a, a2).unwrap());
            }
        }
        assert_eq!(&m, s.matrix());
    }

    #[test]
    fn conditional_ensemble_of_counterexample() {
        let s = BipartiteState::from_matrix(&counterexample(), 2, 2).unwrap();
        let ens = conditional_ensemble(&s);
        let want = ComplexMatrix::from_real(2, &[0.5, 0.28, 0.28, 0.5]).unwrap();
        for a in 0..2 {
            assert!((ens.probs[a] - 0.5).abs() < 1e-15);
            let st = ens.states[a].as_ref().unwrap();
            assert!(distance(st.matrix(), &want, Norm::Frobenius).unwrap() < 1e-14);
        }
    }

    #[test]
    fn conditional_ensemble_of_cq_and_product() {
        let p = [0.3, 0.7];
        let r0 = random_state::<f64>(2, 2, 10).unwrap();
        let r1 = random_state::<f64>(2, 1, 11).unwrap();
        let s = assemble_cq(&ComplexMatrix::identity(2), &p, &[r0.clone(), r1.clone()]).unwrap();
        let ens = conditional_ensemble(&s);
        assert!((ens.probs[0] - 0.3).abs() < 1e-14 && (ens.probs[1] - 0.7).abs() < 1e-14);
        assert!(distance(ens.states[0].as_ref().unwrap().matrix(), r0.matrix(), Norm::Frobenius).unwrap() < 1e-13);
        assert!(distance(ens.states[1].as_ref().unwrap().matrix(), r1.matrix(), Norm::Frobenius).unwrap() < 1e-13);

        let ra = random_state::<f64>(3, 3, 12).unwrap();
        let prod = BipartiteState::product(&ra, &r0);
        for st in conditional_ensemble(&prod).states {
            assert!(distance(st.unwrap().matrix(), r0.matrix(), Norm::Frobenius).unwrap() < 1e-13);
        }
    }

    #[test]
    fn zero_probability_outcome_is_absent() {
        let r = random_state::<f64>(2, 2, 1).unwrap();
        let s = assemble_cq(&ComplexMatrix::identity(2), &[1.0, 0.0], &[r.clone(), r]).unwrap();
        let ens = conditional_ensemble(&s);
        assert!(ens.states[1].is_none());
        assert_eq!(ens.support().collect::<Vec<_>>(), vec![0]);
    }

    #[test]
    fn random_state_properties() {
        let pure = random_state::<f64>(3, 1, 4).unwrap();
        assert_eq!(pure.support_rank(), 1);
        let a = random_state::<f64>(4, 4, 99).unwrap();
        let b = random_state::<f64>(4, 4, 99).unwrap();
        assert_eq!(a.matrix(), b.matrix());
        assert!(a.spectrum()[0] > 0.0);
        assert!(matches!(random_state::<f64>(2, 3, 0), Err(Error::BadRank { .. })));
        assert!(matches!(random_state::<f64>(2, 0, 0), Err(Error::BadRank { .. })));
    }

    #[test]
    fn random_cq_is_block_diagonal_in_generating_basis() {
        for seed in 0..10 {
            let sample = random_cq_sample::<f64>(3, 2, seed).unwrap();
            let rotated = sample.state.in_basis(&sample.basis).unwrap();
            for a in 0..3 {
                for a2 in 0..3 {
                    if a != a2 {
                        assert!(rotated.block(a, a2).unwrap().frobenius_norm() < 1e-12);
                    }
                }
            }
            let again = random_cq_state::<f64>(3, 2, seed).unwrap();
            assert_eq!(again.matrix(), sample.state.matrix());
        }
    }

    #[test]
    fn ensemble_probs_match_reduced_diagonal() {
        let s = BipartiteState::new(random_state::<f64>(6, 4, 21).unwrap(), 3, 2).unwrap();
        let ens = conditional_ensemble(&s);
        let ra = partial_trace(s.matrix(), 3, 2, Keep::A).unwrap();
        for a in 0..3 {
            assert!((ens.probs[a] - ra[(a, a)].re).abs() < 1e-12);
        }
    }
}
