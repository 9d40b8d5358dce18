//! Kraus channels, the block dephasing channel, POVMs and their measurement
//! maps, rank-one refinements, extremality, and the correspondence between
//! rank-one POVMs and isometries.

use num_traits::Zero;

use crate::error::{dim_mismatch, Error, Result};
use crate::linalg::{fix_phase, hermitian_eig, kron, matrix_function_on_support, numerical_rank, ComplexMatrix};
use crate::random::{haar_isometry, rng_from_seed};
use crate::scalar::{cr, Real, C};
use crate::states::DensityMatrix;

/// Relative singular-value cutoff for the extremality rank test.
pub const EXTREMALITY_REL_CUTOFF: f64 = 1e-8;

/// Completely positive trace-preserving map `X -> sum K X K^H`.
#[derive(Debug, Clone)]
pub struct KrausChannel<T: Real> {
    kraus: Vec<ComplexMatrix<T>>,
    in_dim: usize,
    out_dim: usize,
}

impl<T: Real> KrausChannel<T> {
    /// Checks shapes and `sum K^H K = I` within the default tolerance.
    pub fn new(kraus: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| Error::InvalidChannel("no Kraus operators".into()))?;
        let (out_dim, in_dim) = (first.rows(), first.cols());
        if let Some(k) = kraus.iter().find(|k| (k.rows(), k.cols()) != (out_dim, in_dim)) {
            return Err(dim_mismatch(
                format!("{out_dim}x{in_dim}"),
                format!("{}x{}", k.rows(), k.cols()),
            ));
        }
        let ch = Self { kraus, in_dim, out_dim };
        let defect = ch.completeness().max_abs();
        if defect > T::check_tol() {
            return Err(Error::InvalidChannel(format!(
                "sum K^H K deviates from identity by {:e}",
                defect.as_f64()
            )));
        }
        Ok(ch)
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            kraus: vec![ComplexMatrix::identity(dim)],
            in_dim: dim,
            out_dim: dim,
        }
    }

    pub fn kraus_ops(&self) -> &[ComplexMatrix<T>] {
        &self.kraus
    }

    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    /// `sum K^H K - I`.
    pub fn completeness(&self) -> ComplexMatrix<T> {
        let mut acc = ComplexMatrix::identity(self.in_dim).scale(-T::one());
        for k in &self.kraus {
            acc = &acc + &k.adjoint().matmul(k);
        }
        acc
    }

    /// Action on an arbitrary operator.
    pub fn apply_operator(&self, x: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if x.rows() != self.in_dim || x.cols() != self.in_dim {
            return Err(dim_mismatch(self.in_dim, format!("{}x{}", x.rows(), x.cols())));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = &out + &k.conjugate(x);
        }
        Ok(out)
    }

    pub fn apply(&self, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
        Ok(DensityMatrix::project(&self.apply_operator(rho.matrix())?))
    }

    /// `self` after `first`.
    pub fn compose(&self, first: &KrausChannel<T>) -> Result<Self> {
        if first.out_dim != self.in_dim {
            return Err(dim_mismatch(self.in_dim, first.out_dim));
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * first.kraus.len());
        for a in &self.kraus {
            for b in &first.kraus {
                kraus.push(a.matmul(b));
            }
        }
        Ok(Self {
            kraus,
            in_dim: first.in_dim,
            out_dim: self.out_dim,
        })
    }

    pub fn adjoint(&self) -> AdjointMap<T> {
        AdjointMap {
            kraus: self.kraus.clone(),
            in_dim: self.out_dim,
            out_dim: self.in_dim,
        }
    }
}

/// Apply `ch` to a state; the output is projected onto the state space.
pub fn apply<T: Real>(ch: &KrausChannel<T>, rho: &DensityMatrix<T>) -> Result<DensityMatrix<T>> {
    ch.apply(rho)
}

/// Heisenberg-picture dual `Y -> sum K^H Y K`. Unital when the underlying
/// channel is trace preserving.
#[derive(Debug, Clone)]
pub struct AdjointMap<T: Real> {
    kraus: Vec<ComplexMatrix<T>>,
    in_dim: usize,
    out_dim: usize,
}

impl<T: Real> AdjointMap<T> {
    pub fn in_dim(&self) -> usize {
        self.in_dim
    }

    pub fn out_dim(&self) -> usize {
        self.out_dim
    }

    pub fn apply(&self, y: &ComplexMatrix<T>) -> Result<ComplexMatrix<T>> {
        if y.rows() != self.in_dim || y.cols() != self.in_dim {
            return Err(dim_mismatch(self.in_dim, format!("{}x{}", y.rows(), y.cols())));
        }
        let mut out = ComplexMatrix::zeros(self.out_dim, self.out_dim);
        for k in &self.kraus {
            out = &out + &k.adjoint().conjugate(y);
        }
        Ok(out)
    }
}

/// Random channel from a Haar isometry `C^{d_in} -> C^{d_out} (x) C^{n}`
/// cut into `n` Kraus operators.
pub fn random_channel<T: Real>(in_dim: usize, out_dim: usize, n_kraus: usize, seed: u64) -> Result<KrausChannel<T>> {
    if out_dim * n_kraus < in_dim {
        return Err(Error::InvalidChannel(format!(
            "{n_kraus} Kraus operators of shape {out_dim}x{in_dim} cannot be trace preserving"
        )));
    }
    let v: ComplexMatrix<T> = haar_isometry(&mut rng_from_seed(seed), out_dim * n_kraus, in_dim);
    let kraus = (0..n_kraus)
        .map(|k| v.submatrix(k * out_dim, 0, out_dim, in_dim))
        .collect();
    KrausChannel::new(kraus)
}

/// `X -> sum_a (|u_a><u_a| (x) I_B) X (|u_a><u_a| (x) I_B)` for the basis
/// `u_a` given by the columns of `basis`.
pub fn dephasing_channel<T: Real>(basis: &ComplexMatrix<T>, d_a: usize, d_b: usize) -> Result<KrausChannel<T>> {
    if basis.rows() != d_a {
        return Err(dim_mismatch(d_a, basis.rows()));
    }
    basis.ensure_unitary(T::check_tol())?;
    let id_b = ComplexMatrix::identity(d_b);
    let kraus = (0..d_a)
        .map(|a| {
            let u = basis.column(a);
            kron(&ComplexMatrix::outer(&u, &u), &id_b)
        })
        .collect();
    Ok(KrausChannel {
        kraus,
        in_dim: d_a * d_b,
        out_dim: d_a * d_b,
    })
}

/// Finite family of effects `0 <= M_m <= I` summing to the identity.
#[derive(Debug, Clone)]
pub struct Povm<T: Real> {
    effects: Vec<ComplexMatrix<T>>,
    labels: Vec<String>,
}

impl<T: Real> Povm<T> {
    pub fn new(effects: Vec<ComplexMatrix<T>>, labels: Vec<String>) -> Result<Self> {
        if effects.is_empty() {
            return Err(Error::InvalidPovm("no effects".into()));
        }
        if labels.len() != effects.len() {
            return Err(Error::InvalidPovm(format!(
                "{} labels for {} effects",
                labels.len(),
                effects.len()
            )));
        }
        let tol = T::check_tol();
        let dim = effects[0].rows();
        let mut total = ComplexMatrix::zeros(dim, dim);
        for (m, e) in effects.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim {
                return Err(Error::InvalidPovm(format!("effect {m} is not {dim}x{dim}")));
            }
            let eig = hermitian_eig(e).map_err(|err| Error::InvalidPovm(format!("effect {m}: {err}")))?;
            if eig.min_eigenvalue() < -tol || eig.max_eigenvalue() > T::one() + tol {
                return Err(Error::InvalidPovm(format!(
                    "effect {m} has spectrum outside [0, 1]: [{:e}, {:e}]",
                    eig.min_eigenvalue().as_f64(),
                    eig.max_eigenvalue().as_f64()
                )));
            }
            total = &total + e;
        }
        let defect = (&total - &ComplexMatrix::identity(dim)).max_abs();
        if defect > tol {
            return Err(Error::InvalidPovm(format!(
                "effects sum to identity only within {:e}",
                defect.as_f64()
            )));
        }
        Ok(Self { effects, labels })
    }

    /// Effects labelled `"0"`, `"1"`, ...
    pub fn from_effects(effects: Vec<ComplexMatrix<T>>) -> Result<Self> {
        let labels = (0..effects.len()).map(|m| m.to_string()).collect();
        Self::new(effects, labels)
    }

    /// Projective measurement onto the columns of a unitary.
    pub fn projective(basis: &ComplexMatrix<T>) -> Result<Self> {
        basis.ensure_unitary(T::check_tol())?;
        let effects = (0..basis.cols())
            .map(|m| {
                let u = basis.column(m);
                ComplexMatrix::outer(&u, &u)
            })
            .collect();
        Self::from_effects(effects)
    }

    pub fn standard(dim: usize) -> Self {
        Self::projective(&ComplexMatrix::identity(dim)).expect("identity is unitary")
    }

    /// `w * self + (1 - w) * other`, effect by effect.
    pub fn mix(&self, other: &Povm<T>, w: T) -> Result<Self> {
        if self.len() != other.len() {
            return Err(dim_mismatch(self.len(), other.len()));
        }
        let effects = self
            .effects
            .iter()
            .zip(&other.effects)
            .map(|(a, b)| &a.scale(w) + &b.scale(T::one() - w))
            .collect();
        Self::new(effects, self.labels.clone())
    }

    pub fn effects(&self) -> &[ComplexMatrix<T>] {
        &self.effects
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects[0].rows()
    }

    /// `tr(M_m rho)` for every outcome.
    pub fn probabilities(&self, rho: &ComplexMatrix<T>) -> Vec<T> {
        self.effects.iter().map(|e| e.inner(rho).re).collect()
    }
}

/// `X -> sum_m tr(M_m X) |m><m|`, realised with Kraus operators
/// `|m><j| sqrt(M_m)`.
pub fn measurement_map<T: Real>(p: &Povm<T>) -> Result<KrausChannel<T>> {
    let d = p.dim();
    let n = p.len();
    let mut kraus = Vec::new();
    for (m, e) in p.effects().iter().enumerate() {
        let root = matrix_function_on_support(e, |x| x.sqrt(), None)
            .map_err(|err| Error::InvalidPovm(format!("effect {m}: {err}")))?;
        for j in 0..d {
            if root.row(j).iter().all(|z| z.is_zero()) {
                continue;
            }
            let mut k = ComplexMatrix::zeros(n, d);
            for (col, &z) in root.row(j).iter().enumerate() {
                k[(m, col)] = z;
            }
            kraus.push(k);
        }
    }
    KrausChannel::new(kraus)
}

/// A rank-one POVM together with the label map `fine index -> coarse index`
/// that sums it back to the original POVM.
#[derive(Debug, Clone)]
pub struct Refinement<T: Real> {
    pub fine: Povm<T>,
    pub coarse_map: Vec<usize>,
    pub coarse: Povm<T>,
}

impl<T: Real> Refinement<T> {
    /// Largest entrywise deviation of `sum_{p^-1(m)} M'_{m'}` from `M_m`.
    pub fn recomposition_defect(&self) -> T {
        let d = self.coarse.dim();
        let mut sums = vec![ComplexMatrix::zeros(d, d); self.coarse.len()];
        for (f, &m) in self.coarse_map.iter().enumerate() {
            sums[m] = &sums[m] + &self.fine.effects()[f];
        }
        sums.iter()
            .zip(self.coarse.effects())
            .map(|(s, e)| (s - e).max_abs())
            .fold(T::zero(), T::max)
    }
}

/// Splits every effect into the weighted projectors of its spectral
/// decomposition, `M_m = sum_n l_n |v_n><v_n|`, dropping eigenvalues below
/// the support cutoff.
pub fn refine_to_rank_one<T: Real>(p: &Povm<T>) -> Result<Refinement<T>> {
    let mut effects = Vec::new();
    let mut labels = Vec::new();
    let mut coarse_map = Vec::new();
    for (m, e) in p.effects().iter().enumerate() {
        for (n, vector) in rank_one_components(e)?.into_iter().enumerate() {
            effects.push(ComplexMatrix::outer(&vector, &vector));
            labels.push(format!("{}.{}", p.labels()[m], n));
            coarse_map.push(m);
        }
    }
    Ok(Refinement {
        fine: Povm::new(effects, labels)?,
        coarse_map,
        coarse: p.clone(),
    })
}

/// Vectors `sqrt(l_n) v_n` with `M = sum |.><.|`, phase fixed so the
/// largest component is real positive.
fn rank_one_components<T: Real>(effect: &ComplexMatrix<T>) -> Result<Vec<Vec<C<T>>>> {
    let eig = hermitian_eig(effect)?;
    let cutoff = T::support_cutoff(eig.max_eigenvalue());
    let mut out = Vec::new();
    for k in (0..eig.dim()).rev() {
        let l = eig.eigenvalues[k];
        if l <= cutoff {
            continue;
        }
        let mut v = eig.eigenvector(k);
        fix_phase(&mut v);
        let s = l.sqrt();
        out.push(v.into_iter().map(|z| z * s).collect());
    }
    Ok(out)
}

/// Channel taking the fine outcome register to the coarse one by relabelling
/// `m' -> p(m')`.
///
/// Kraus operators are `|p(m')><m'|`, one per fine outcome. On diagonal
/// inputs this acts exactly like the grouped operators
/// `A_m = sum_{m' in p^-1(m)} |m><m'|` (see [`grouped_coarse_operators`]),
/// but unlike those it satisfies `sum K^H K = I` on the whole fine register.
pub fn coarse_grain_channel<T: Real>(r: &Refinement<T>) -> KrausChannel<T> {
    let fine = r.fine.len();
    let coarse = r.coarse.len();
    let kraus = r
        .coarse_map
        .iter()
        .enumerate()
        .map(|(f, &m)| {
            let mut k = ComplexMatrix::zeros(coarse, fine);
            k[(m, f)] = cr(T::one());
            k
        })
        .collect();
    KrausChannel {
        kraus,
        in_dim: fine,
        out_dim: coarse,
    }
}

/// The grouped operators `A_m = sum_{m' in p^-1(m)} |m><m'|`.
///
/// `sum_m A_m^H A_m` is block-of-ones rather than the identity whenever a
/// fibre has more than one element, so these only define a channel on the
/// diagonal (classical) inputs produced by a measurement map.
pub fn grouped_coarse_operators<T: Real>(r: &Refinement<T>) -> Vec<ComplexMatrix<T>> {
    let fine = r.fine.len();
    let coarse = r.coarse.len();
    (0..coarse)
        .map(|m| {
            let mut a = ComplexMatrix::zeros(coarse, fine);
            for (f, _) in r.coarse_map.iter().enumerate().filter(|(_, &c)| c == m) {
                a[(m, f)] = cr(T::one());
            }
            a
        })
        .collect()
}

/// Outcome of the extremality test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Extremality {
    pub extremal: bool,
    /// Numerical rank of the stacked operators.
    pub rank: usize,
    /// Number of operators `|e^m_n><e^m_n'|` tested, `sum_m d_m^2`.
    pub operator_count: usize,
}

/// A POVM is extremal iff the operators `|e^m_n><e^m_n'|`, built from the
/// spectral decomposition of each effect, are linearly independent.
pub fn is_extremal<T: Real>(p: &Povm<T>) -> Result<Extremality> {
    let d = p.dim();
    let mut columns: Vec<Vec<C<T>>> = Vec::new();
    for e in p.effects() {
        let vectors = rank_one_components(e)?;
        for u in &vectors {
            for v in &vectors {
                columns.push(ComplexMatrix::outer(u, v).as_slice().to_vec());
            }
        }
    }
    let operator_count = columns.len();
    if operator_count == 0 {
        return Err(Error::InvalidPovm("all effects vanish".into()));
    }
    let stacked = ComplexMatrix::from_fn(d * d, operator_count, |i, j| columns[j][i]);
    let rank = numerical_rank(&stacked, T::lit(EXTREMALITY_REL_CUTOFF));
    Ok(Extremality {
        extremal: rank == operator_count,
        rank,
        operator_count,
    })
}

/// `iota = sum_m |m><e_m|` for a POVM with effects `|e_m><e_m|`.
///
/// Zero effects are allowed and give zero rows.
pub fn povm_to_isometry<T: Real>(p: &Povm<T>) -> Result<ComplexMatrix<T>> {
    let d = p.dim();
    let mut iota = ComplexMatrix::zeros(p.len(), d);
    for (m, e) in p.effects().iter().enumerate() {
        let comps = rank_one_components(e)?;
        if comps.len() > 1 {
            return Err(Error::NotRankOne {
                index: m,
                rank: comps.len(),
            });
        }
        if let Some(v) = comps.first() {
            for (j, z) in v.iter().enumerate() {
                iota[(m, j)] = z.conj();
            }
        }
    }
    let defect = iota.isometry_defect();
    if defect > T::check_tol() {
        return Err(Error::InvalidPovm(format!(
            "iota^H iota deviates from identity by {:e}",
            defect.as_f64()
        )));
    }
    Ok(iota)
}

/// Effects `|e_m><e_m|` with `<e_m| = <m| iota`.
pub fn isometry_to_povm<T: Real>(iota: &ComplexMatrix<T>) -> Result<Povm<T>> {
    let defect = iota.isometry_defect();
    if defect > T::check_tol() || iota.rows() < iota.cols() {
        return Err(Error::NotIsometry {
            deviation: defect.as_f64(),
        });
    }
    let effects = (0..iota.rows())
        .map(|m| {
            let e: Vec<C<T>> = iota.row(m).iter().map(|z| z.conj()).collect();
            ComplexMatrix::outer(&e, &e)
        })
        .collect();
    Povm::from_effects(effects)
}

/// Zero-padding embedding `C^d -> C^n` onto the first `d` coordinates.
pub fn padding_isometry<T: Real>(d: usize, n: usize) -> ComplexMatrix<T> {
    assert!(n >= d);
    ComplexMatrix::from_fn(n, d, |i, j| if i == j { cr(T::one()) } else { C::zero() })
}
