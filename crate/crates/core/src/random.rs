//! Seeded random ensembles used to populate tests and the CLI.
//!
//! Every generator takes an explicit RNG or seed; there is no global PRNG.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::linalg::{orthonormalize_columns, ComplexMatrix};
use crate::scalar::{c, Real};

pub type StdRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> StdRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `rows x cols` matrix of independent standard complex Gaussians
/// (real and imaginary parts each of variance 1/2).
pub fn gaussian_matrix<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        c(T::lit(re * s), T::lit(im * s))
    })
}

/// Haar-random unitary from the QR decomposition of a Gaussian matrix.
pub fn haar_unitary<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    haar_isometry(rng, dim, dim)
}

/// Haar-random isometry `rows x cols` (`rows >= cols`), i.e. the first
/// `cols` columns of a Haar unitary.
pub fn haar_isometry<T: Real, R: Rng + ?Sized>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix<T> {
    assert!(rows >= cols, "isometry needs rows >= cols");
    orthonormalize_columns(&gaussian_matrix(rng, rows, cols))
}

/// Uniform draw from the probability simplex (flat Dirichlet).
pub fn dirichlet_uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<T> {
    let draws: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(Exp1)).collect();
    let total: f64 = draws.iter().sum();
    draws.into_iter().map(|x| T::lit(x / total)).collect()
}

/// Random Hermitian matrix with Gaussian entries.
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(rng: &mut R, dim: usize) -> ComplexMatrix<T> {
    let g: ComplexMatrix<T> = gaussian_matrix(rng, dim, dim);
    (&g + &g.adjoint()).scale(T::lit(0.5))
}
