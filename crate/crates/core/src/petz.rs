//! Petz recovery map of a channel with respect to a reference state, and the
//! closed form it takes for the block dephasing channel with the product of
//! marginals as reference.

use crate::channels::{AdjointMap, KrausChannel};
use crate::error::{dim_mismatch, Result};
use crate::linalg::{kron, matrix_function_on_support, trace_distance, ComplexMatrix};
use crate::scalar::Real;
use crate::states::{conditional_ensemble, BipartiteState, DensityMatrix};

/// `Y -> sigma^{1/2} E^*( E(sigma)^{-1/2} Y E(sigma)^{-1/2} ) sigma^{1/2}`,
/// with inverse square roots taken on the support of `E(sigma)`.
#[derive(Debug, Clone)]
pub struct PetzMap<T: Real> {
    forward: KrausChannel<T>,
    adjoint: AdjointMap<T>,
    reference: DensityMatrix<T>,
    sigma_sqrt: ComplexMatrix<T>,
    e_sigma_inv_sqrt: ComplexMatrix<T>,
}

impl<T: Real> PetzMap<T> {
    pub fn forward(&self) -> &KrausChannel<T> {
        &self.forward
    }

    pub fn reference(&self) -> &DensityMatrix<T> {
        &self.reference
    }

    pub fn sigma_sqrt(&self) -> &ComplexMatrix<T> {
        &self.sigma_sqrt
    }

    pub fn e_sigma_inv_sqrt(&self) -> &ComplexMatrix<T> {
        &self.e_sigma_inv_sqrt
    }

    pub fn apply(&self, y: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if y.rows() != self.forward.out_dim() || y.cols() != self.forward.out_dim() {
            return Err(dim_mismatch(
                self.forward.out_dim(),
                format!("{}x{}", y.rows(), y.cols()),
            ));
        }
        let inner = self.e_sigma_inv_sqrt.matmul(y).matmul(&self.e_sigma_inv_sqrt);
        let pulled = self.adjoint.apply(&inner)?;
        Ok(self.sigma_sqrt.matmul(&pulled).matmul(&self.sigma_sqrt))
    }

    /// Applies the map and projects the result onto the state space.
    pub fn recover(&self, y: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        Ok(DensityMatrix::project(&self.apply(y.matrix())?))
    }
}

pub fn build_petz<T: Real>(e: &KrausChannel<T>, sigma: &DensityMatrix<T>) -> Result<PetzMap<T>> {
    if sigma.dim() != e.in_dim() {
        return Err(dim_mismatch(e.in_dim(), sigma.dim()));
    }
    let sigma_sqrt = matrix_function_on_support(sigma.matrix(), |x| x.sqrt(), None)?;
    let e_sigma = e.apply_operator(sigma.matrix())?.hermitian_part();
    let e_sigma_inv_sqrt = matrix_function_on_support(&e_sigma, |x| T::one() / x.sqrt(), None)?;
    Ok(PetzMap {
        forward: e.clone(),
        adjoint: e.adjoint(),
        reference: sigma.clone(),
        sigma_sqrt,
        e_sigma_inv_sqrt,
    })
}

pub fn apply_petz<T: Real>(p: &PetzMap<T>, y: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    p.apply(y)
}

/// `sum_a rho_A^{1/2} |u_a><u_a| rho_A^{1/2} (x) rho^B_a`, with `u_a` the
/// columns of `basis` and `rho^B_a` the conditional states of a measurement
/// of A in that basis. Equals the Petz recovery of the dephased state when
/// the reference is `rho_A (x) rho_B`.
pub fn reconstruct_cq<T: Real>(s: &BipartiteState<T>, basis: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
    let rotated = s.in_basis(basis)?;
    let ensemble = conditional_ensemble(&rotated);
    let sqrt_a = matrix_function_on_support(s.rho_a().matrix(), |x| x.sqrt(), None)?;
    let dim = s.d_a() * s.d_b();
    let mut out = ComplexMatrix::zeros(dim, dim);
    for (a, cond) in ensemble.states.iter().enumerate() {
        let Some(cond) = cond else { continue };
        let v = sqrt_a.mul_vec(&basis.column(a));
        out = &out + &kron(&ComplexMatrix::outer(&v, &v), cond.matrix());
    }
    Ok(out)
}

/// Trace distance between the state and its reconstruction in `basis`.
pub fn recovery_residual<T: Real>(s: &BipartiteState<T>, basis: &ComplexMatrix<T>) -> Result<T> {
    trace_distance(s.matrix(), &reconstruct_cq(s, basis)?)
}
