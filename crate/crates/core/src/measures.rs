//! Von Neumann entropy, relative entropy and mutual information (bits).

use std::fmt;

use crate::error::{dim_mismatch, Result};
use crate::linalg::{function_of_eig, hermitian_eig};
use crate::scalar::Real;
use crate::states::{BipartiteState, DensityMatrix};

/// `-sum l lg l` over the eigenvalues above the support cutoff.
pub fn entropy_of_spectrum<T: Real>(spectrum: &[T]) -> T {
    let top = spectrum.iter().copied().fold(T::zero(), T::max);
    let cutoff = T::support_cutoff(top);
    spectrum.iter().filter(|&&l| l > cutoff).map(|&l| -l * l.log2()).sum()
}

pub fn von_neumann_entropy<T: Real>(rho: &DensityMatrix<T>) -> T {
    entropy_of_spectrum(rho.spectrum())
}

/// Quantum relative entropy, with divergence kept distinct from any float.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RelEntropy<T> {
    Finite(T),
    /// `supp(rho)` is not contained in `supp(sigma)`.
    Infinite,
}

impl<T: Real> RelEntropy<T> {
    pub fn finite(self) -> Option<T> {
        match self {
            Self::Finite(v) => Some(v),
            Self::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Self::Infinite)
    }
}

impl<T: Real> fmt::Display for RelEntropy<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Finite(v) => write!(f, "{v}"),
            Self::Infinite => write!(f, "+inf"),
        }
    }
}

/// `D(rho || sigma) = tr[rho (lg rho - lg sigma)]`.
pub fn relative_entropy<T: Real>(rho: &DensityMatrix<T>, sigma: &DensityMatrix<T>) -> Result<RelEntropy<T>> {
    if rho.dim() != sigma.dim() {
        return Err(dim_mismatch(rho.dim(), sigma.dim()));
    }
    let eig = hermitian_eig(sigma.matrix())?;
    let cutoff = T::support_cutoff(eig.max_eigenvalue());
    let support = function_of_eig(&eig, |_| T::one(), Some(cutoff))?;
    let leaked = rho.matrix().trace().re - support.inner(rho.matrix()).re;
    if leaked > cutoff {
        return Ok(RelEntropy::Infinite);
    }
    let log_sigma = function_of_eig(&eig, |l| l.log2(), Some(cutoff))?;
    let cross = log_sigma.inner(rho.matrix()).re;
    Ok(RelEntropy::Finite(-von_neumann_entropy(rho) - cross))
}

/// `S(rho_A) + S(rho_B) - S(rho_AB)`.
pub fn mutual_information<T: Real>(s: &BipartiteState<T>) -> T {
    von_neumann_entropy(&s.rho_a()) + von_neumann_entropy(&s.rho_b()) - von_neumann_entropy(s.state())
}
