//! Certification of zero-discord states as classical-quantum.

use crate::error::{Error, Result};
use crate::linalg::{complete_basis, hermitian_eig, jacobi, matrix_function_on_support, trace_distance, ComplexMatrix};
use crate::petz::recovery_residual;
use crate::scalar::C;
use crate::states::{conditional_ensemble, BipartiteState, DensityMatrix};

use super::peel::{peel_extremal, PeelConfig, PeelTrace};
use super::{discord, DiscordConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CertifyConfig {
    /// Projective search; certification never enlarges A.
    pub discord: DiscordConfig,
    pub peel: PeelConfig,
    /// Largest accepted `|<a|rho_A^{1/2}|a'>|` between different groups, and
    /// largest accepted `|P_i P_j|_F`.
    pub cross_tol: f64,
    /// Off-diagonal blocks in the certified basis must have Frobenius norm at
    /// most this times `|rho|_F`.
    pub offdiag_rel_tol: f64,
    /// Eigenvalues of `rho_A` closer than this are treated as degenerate.
    pub degeneracy_tol: f64,
}

impl Default for CertifyConfig {
    fn default() -> Self {
        Self {
            discord: DiscordConfig {
                enlarge: false,
                ..DiscordConfig::default()
            },
            peel: PeelConfig::default(),
            cross_tol: 1e-3,
            offdiag_rel_tol: 1e-7,
            degeneracy_tol: 1e-8,
        }
    }
}

/// A basis of A in which the state is block diagonal, and the grouping of
/// its vectors by conditional state.
#[derive(Debug, Clone)]
pub struct ClassicalityCertificate {
    pub basis: ComplexMatrix<f64>,
    /// Disjoint sets of basis indices covering every index of nonzero
    /// probability.
    pub partition: Vec<Vec<usize>>,
    /// One conditional state of B per part.
    pub conditional_states: Vec<DensityMatrix<f64>>,
    /// Trace distance between the state and its reconstruction in `basis`.
    pub residual: f64,
    pub discord_value: f64,
    /// Largest off-diagonal block norm in `basis`, relative to `|rho|_F`.
    pub max_offdiag: f64,
    pub peel: PeelTrace,
}

#[derive(Debug, Clone)]
pub struct Witness {
    pub value: f64,
    pub basis: ComplexMatrix<f64>,
    pub residual: f64,
}

#[derive(Debug, Clone)]
pub enum Certification {
    Classical(ClassicalityCertificate),
    NotClassical(Witness),
}

impl Certification {
    pub fn is_classical(&self) -> bool {
        matches!(self, Self::Classical(_))
    }

    pub fn certificate(&self) -> Option<&ClassicalityCertificate> {
        match self {
            Self::Classical(c) => Some(c),
            Self::NotClassical(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Self::Classical(_) => None,
            Self::NotClassical(w) => Some(w),
        }
    }
}

/// Decides whether the discord is below `tol` and, if so, builds a
/// block-diagonalising basis from the minimiser.
pub fn certify_classical(s: &BipartiteState<f64>, tol: f64, cfg: &CertifyConfig) -> Result<Certification> {
    let dcfg = DiscordConfig {
        enlarge: false,
        ..cfg.discord.clone()
    };
    let found = discord(s, &dcfg)?;
    let u = found.best_basis;
    if found.value > tol {
        let residual = recovery_residual(s, &u)?;
        return Ok(Certification::NotClassical(Witness {
            value: found.value,
            basis: u,
            residual,
        }));
    }

    let d_a = s.d_a();
    let rotated = s.in_basis(&u)?;
    let ens = conditional_ensemble(&rotated);
    let rho_a = rotated.rho_a();
    let sqrt_a = matrix_function_on_support(rho_a.matrix(), |x| x.sqrt(), None)?;
    let peel = peel_extremal(&ens, &sqrt_a, &cfg.peel).map_err(|e| match e {
        Error::NotAtEquality { index, residual, tol } => Error::CertificateInconsistent {
            a: index,
            b: index,
            reason: format!("convex-combination residual {residual:e} exceeds {tol:e}"),
        },
        other => other,
    })?;
    for round in &peel.rounds {
        for &(a, b, v) in &round.cross_terms {
            if v > cfg.cross_tol {
                return Err(Error::CertificateInconsistent {
                    a,
                    b,
                    reason: format!("cross term {v:e} between different conditional states"),
                });
            }
        }
    }

    // P_i = rho_A^{1/2} Pi_i rho_A^{1/2}
    let projections: Vec<ComplexMatrix<f64>> = peel
        .groups
        .iter()
        .map(|g| {
            let mut pi = ComplexMatrix::zeros(d_a, d_a);
            for &a in g {
                pi[(a, a)] = C::new(1.0, 0.0);
            }
            sqrt_a.matmul(&pi).matmul(&sqrt_a)
        })
        .collect();
    for i in 0..projections.len() {
        for j in i + 1..projections.len() {
            let overlap = projections[i].matmul(&projections[j]).frobenius_norm();
            if overlap > cfg.cross_tol {
                return Err(Error::CertificateInconsistent {
                    a: peel.groups[i][0],
                    b: peel.groups[j][0],
                    reason: format!("supports overlap, |P_i P_j| = {overlap:e}"),
                });
            }
        }
    }

    let (local, labels) = diagonalize_jointly(&rho_a, &projections, cfg.degeneracy_tol)?;
    let basis = u.matmul(&local);

    let mut partition = vec![Vec::new(); projections.len()];
    for (k, label) in labels.iter().enumerate() {
        if let Some(i) = label {
            partition[*i].push(k);
        }
    }

    let certified = s.in_basis(&basis)?;
    let scale = s.matrix().frobenius_norm();
    let mut max_offdiag: f64 = 0.0;
    for k in 0..d_a {
        for l in 0..d_a {
            if k == l {
                continue;
            }
            let norm = certified.block(k, l)?.frobenius_norm() / scale;
            if norm > cfg.offdiag_rel_tol {
                return Err(Error::CertificateInconsistent {
                    a: k,
                    b: l,
                    reason: format!("off-diagonal block {norm:e} (relative) in the certified basis"),
                });
            }
            max_offdiag = max_offdiag.max(norm);
        }
    }

    let final_ens = conditional_ensemble(&certified);
    let mut conditional_states = Vec::with_capacity(partition.len());
    for part in &partition {
        let Some(first) = part.iter().find_map(|&k| final_ens.states[k].clone()) else {
            continue;
        };
        for &k in part {
            if let Some(other) = &final_ens.states[k] {
                let d = trace_distance(first.matrix(), other.matrix())?;
                if d > cfg.peel.group_tol {
                    return Err(Error::CertificateInconsistent {
                        a: part[0],
                        b: k,
                        reason: format!("conditional states in one part differ by {d:e}"),
                    });
                }
            }
        }
        conditional_states.push(first);
    }
    partition.retain(|p| p.iter().any(|&k| final_ens.states[k].is_some()));
    for part in &mut partition {
        part.retain(|&k| final_ens.states[k].is_some());
    }
    let mut paired: Vec<_> = partition.into_iter().zip(conditional_states).collect();
    paired.sort_by_key(|(p, _)| p[0]);
    let (partition, conditional_states): (Vec<_>, Vec<_>) = paired.into_iter().unzip();

    let residual = recovery_residual(s, &basis)?;
    Ok(Certification::Classical(ClassicalityCertificate {
        basis,
        partition,
        conditional_states,
        residual,
        discord_value: found.value,
        max_offdiag,
        peel,
    }))
}

/// Eigenbasis of `rho_A = sum_i P_i` in which each `P_i` is diagonal, with
/// the index `i` owning each vector (`None` for the kernel).
fn diagonalize_jointly(
    rho_a: &DensityMatrix<f64>,
    projections: &[ComplexMatrix<f64>],
    degeneracy_tol: f64,
) -> Result<(ComplexMatrix<f64>, Vec<Option<usize>>)> {
    let d = rho_a.dim();
    let eig = hermitian_eig(rho_a.matrix())?;
    let cutoff = rho_a.support_cutoff();
    let mut weighted = ComplexMatrix::zeros(d, d);
    for (i, p) in projections.iter().enumerate() {
        weighted = &weighted + &p.scale((i + 1) as f64);
    }

    let mut vectors: Vec<Vec<C<f64>>> = Vec::with_capacity(d);
    let vals = &eig.eigenvalues;
    let mut k = 0;
    while k < d {
        let mut end = k + 1;
        while end < d && vals[end] - vals[end - 1] <= degeneracy_tol {
            end += 1;
        }
        if vals[end - 1] > cutoff {
            let cluster: Vec<Vec<C<f64>>> = (k..end).map(|j| eig.eigenvector(j)).collect();
            if cluster.len() == 1 {
                vectors.extend(cluster);
            } else {
                let v = ComplexMatrix::from_fn(d, cluster.len(), |r, c| cluster[c][r]);
                let inner = jacobi(&v.adjoint().matmul(&weighted).matmul(&v).hermitian_part());
                let rotated = v.matmul(&inner.eigenvectors);
                vectors.extend((0..cluster.len()).map(|c| rotated.column(c)));
            }
        }
        k = end;
    }

    let labels: Vec<Option<usize>> = vectors
        .iter()
        .map(|v| {
            projections
                .iter()
                .enumerate()
                .map(|(i, p)| (i, quad(p, v)))
                .max_by(|a, b| a.1.total_cmp(&b.1).then(b.0.cmp(&a.0)))
                .map(|(i, _)| i)
        })
        .collect();
    let full = complete_basis(&vectors, d);
    let mut all = labels;
    all.resize(d, None);
    Ok((full, all))
}

fn quad(p: &ComplexMatrix<f64>, v: &[C<f64>]) -> f64 {
    let pv = p.mul_vec(v);
    v.iter().zip(&pv).map(|(a, b)| (a.conj() * b).re).sum()
}
