//! Convex structure of the conditional states at a zero-loss basis.
//!
//! When measuring A in the standard basis loses no mutual information, each
//! conditional state is a convex combination of the others,
//!
//! ```text
//! rho_a = sum_{a' != a} w_{a a'} rho_{a'},
//! w_{a a'} = |<a|rho_A^{1/2}|a'>|^2 / (p_a - |<a|rho_A^{1/2}|a>|^2).
//! ```
//!
//! An extreme point of the hull can only be such a combination of copies of
//! itself, so the cross terms linking it to different states vanish. Peeling
//! the extreme points layer by layer shows all cross terms between distinct
//! conditional states vanish.

use crate::error::{Error, Result};
use crate::linalg::{distance, trace_distance, ComplexMatrix, Norm};
use crate::states::ConditionalEnsemble;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeelConfig {
    /// Conditional states closer than this in trace distance are equal.
    pub group_tol: f64,
    /// Largest accepted Frobenius residual of a convex-combination row.
    pub convex_tol: f64,
    /// Rows whose denominator is at most this impose no constraint.
    pub denominator_floor: f64,
    /// A state farther than this from the hull of the others is extremal.
    pub hull_tol: f64,
}

impl Default for PeelConfig {
    fn default() -> Self {
        Self {
            group_tol: 1e-6,
            convex_tol: 1e-6,
            denominator_floor: 1e-8,
            hull_tol: 1e-6,
        }
    }
}

/// One convex-combination identity.
#[derive(Debug, Clone)]
pub struct ConvexRow {
    pub index: usize,
    pub denominator: f64,
    /// `(a', w_{a a'})` over the other supported indices.
    pub weights: Vec<(usize, f64)>,
    /// `None` when the denominator is below the floor.
    pub residual: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct PeelRound {
    /// Group representatives found extremal in this round.
    pub extremal: Vec<usize>,
    /// `(a, a', |<a|rho_A^{1/2}|a'>|)` for `a` in an extremal group and `a'`
    /// in a different group still present.
    pub cross_terms: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone)]
pub struct PeelTrace {
    /// Supported indices grouped by equal conditional state, each group
    /// sorted and the groups ordered by their lowest index.
    pub groups: Vec<Vec<usize>>,
    pub rounds: Vec<PeelRound>,
    pub convex_rows: Vec<ConvexRow>,
    pub max_cross_term: f64,
}

impl PeelTrace {
    pub fn max_convex_residual(&self) -> f64 {
        self.convex_rows.iter().filter_map(|r| r.residual).fold(0.0, f64::max)
    }
}

/// Weights and residuals of every convex-combination row. `sqrt_rho_a` is
/// `rho_A^{1/2}` in the basis that produced the ensemble.
pub fn convex_rows(ens: &ConditionalEnsemble<f64>, sqrt_rho_a: &ComplexMatrix<f64>, floor: f64) -> Vec<ConvexRow> {
    let support: Vec<usize> = ens.support().collect();
    support
        .iter()
        .map(|&a| {
            let denominator = ens.probs[a] - sqrt_rho_a[(a, a)].norm_sqr();
            let weights: Vec<(usize, f64)> = support
                .iter()
                .filter(|&&b| b != a)
                .map(|&b| (b, sqrt_rho_a[(a, b)].norm_sqr() / denominator))
                .collect();
            let residual = (denominator > floor).then(|| {
                let target = ens.states[a].as_ref().expect("supported").matrix();
                let mut mix = ComplexMatrix::zeros(target.rows(), target.cols());
                for &(b, w) in &weights {
                    mix = &mix + &ens.states[b].as_ref().expect("supported").matrix().scale(w);
                }
                distance(target, &mix, Norm::Frobenius).expect("same shape")
            });
            ConvexRow {
                index: a,
                denominator,
                weights,
                residual,
            }
        })
        .collect()
}

pub fn peel_extremal(
    ens: &ConditionalEnsemble<f64>,
    sqrt_rho_a: &ComplexMatrix<f64>,
    cfg: &PeelConfig,
) -> Result<PeelTrace> {
    let rows = convex_rows(ens, sqrt_rho_a, cfg.denominator_floor);
    for row in &rows {
        if let Some(r) = row.residual {
            if r > cfg.convex_tol {
                return Err(Error::NotAtEquality {
                    index: row.index,
                    residual: r,
                    tol: cfg.convex_tol,
                });
            }
        }
    }

    let groups = group_equal(ens, cfg.group_tol);
    let reps: Vec<usize> = groups.iter().map(|g| g[0]).collect();
    let vecs: Vec<Vec<f64>> = reps
        .iter()
        .map(|&a| realify(ens.states[a].as_ref().expect("supported").matrix()))
        .collect();

    let mut alive: Vec<usize> = (0..groups.len()).collect();
    let mut rounds = Vec::new();
    let mut max_cross_term: f64 = 0.0;
    while !alive.is_empty() {
        let mut layer: Vec<usize> = alive
            .iter()
            .copied()
            .filter(|&g| {
                let others: Vec<&[f64]> = alive.iter().filter(|&&h| h != g).map(|&h| vecs[h].as_slice()).collect();
                hull_distance(&vecs[g], &others) > cfg.hull_tol
            })
            .collect();
        if layer.is_empty() {
            // numerically coplanar leftovers: nothing separates them further
            layer = alive.clone();
        }
        let mut cross_terms = Vec::new();
        for &g in &layer {
            for &h in alive.iter().filter(|&&h| h != g) {
                for &a in &groups[g] {
                    for &b in &groups[h] {
                        let v = sqrt_rho_a[(a, b)].norm();
                        max_cross_term = max_cross_term.max(v);
                        cross_terms.push((a, b, v));
                    }
                }
            }
        }
        rounds.push(PeelRound {
            extremal: layer.iter().map(|&g| reps[g]).collect(),
            cross_terms,
        });
        alive.retain(|g| !layer.contains(g));
    }

    Ok(PeelTrace {
        groups,
        rounds,
        convex_rows: rows,
        max_cross_term,
    })
}

/// Transitive closure of "trace distance at most `tol`" on the supported
/// indices.
fn group_equal(ens: &ConditionalEnsemble<f64>, tol: f64) -> Vec<Vec<usize>> {
    let support: Vec<usize> = ens.support().collect();
    let mut parent: Vec<usize> = (0..support.len()).collect();
    fn find(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..support.len() {
        for j in i + 1..support.len() {
            let a = ens.states[support[i]].as_ref().expect("supported").matrix();
            let b = ens.states[support[j]].as_ref().expect("supported").matrix();
            if trace_distance(a, b).expect("same shape") <= tol {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                parent[ri.max(rj)] = ri.min(rj);
            }
        }
    }
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut slot = vec![usize::MAX; support.len()];
    for (i, &a) in support.iter().enumerate() {
        let r = find(&mut parent, i);
        if slot[r] == usize::MAX {
            slot[r] = groups.len();
            groups.push(Vec::new());
        }
        groups[slot[r]].push(a);
    }
    groups
}

fn realify(m: &ComplexMatrix<f64>) -> Vec<f64> {
    m.as_slice().iter().flat_map(|z| [z.re, z.im]).collect()
}

/// Frobenius distance from `target` to the convex hull of `points`.
fn hull_distance(target: &[f64], points: &[&[f64]]) -> f64 {
    if points.is_empty() {
        return f64::INFINITY;
    }
    // sum-to-one enters as a heavily weighted extra row
    let penalty = 1e4;
    let m = target.len() + 1;
    let a: Vec<Vec<f64>> = points
        .iter()
        .map(|p| p.iter().copied().chain(std::iter::once(penalty)).collect())
        .collect();
    let b: Vec<f64> = target.iter().copied().chain(std::iter::once(penalty)).collect();
    let mut w = nnls(&a, &b, m);
    let total: f64 = w.iter().sum();
    if total <= 0.0 {
        return f64::INFINITY;
    }
    w.iter_mut().for_each(|x| *x /= total);
    target
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let mix: f64 = points.iter().zip(&w).map(|(p, wi)| wi * p[k]).sum();
            (t - mix).powi(2)
        })
        .sum::<f64>()
        .sqrt()
}

/// Lawson-Hanson non-negative least squares `min |A x - b|, x >= 0` with
/// `A` given by its columns.
fn nnls(cols: &[Vec<f64>], b: &[f64], m: usize) -> Vec<f64> {
    let n = cols.len();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let mut x = vec![0.0; n];
    let mut passive = vec![false; n];
    let tol = 1e-12 * b.iter().map(|v| v.abs()).fold(1.0, f64::max);

    for _ in 0..3 * n + 10 {
        let r: Vec<f64> = (0..m)
            .map(|i| b[i] - (0..n).map(|j| cols[j][i] * x[j]).sum::<f64>())
            .collect();
        let grad: Vec<f64> = cols.iter().map(|c| dot(c, &r)).collect();
        let Some(t) = (0..n)
            .filter(|&j| !passive[j] && grad[j] > tol)
            .max_by(|&i, &j| grad[i].total_cmp(&grad[j]))
        else {
            break;
        };
        passive[t] = true;
        loop {
            let z = solve_passive(cols, b, &passive);
            if (0..n).filter(|&j| passive[j]).all(|j| z[j] > 0.0) {
                x = z;
                break;
            }
            let alpha = (0..n)
                .filter(|&j| passive[j] && z[j] <= 0.0)
                .map(|j| x[j] / (x[j] - z[j]))
                .fold(f64::INFINITY, f64::min);
            for j in 0..n {
                x[j] += alpha * (z[j] - x[j]);
                if passive[j] && x[j] <= 1e-15 {
                    passive[j] = false;
                    x[j] = 0.0;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
    }
    x
}

/// Unconstrained least squares on the passive columns via normal equations.
fn solve_passive(cols: &[Vec<f64>], b: &[f64], passive: &[bool]) -> Vec<f64> {
    let idx: Vec<usize> = (0..cols.len()).filter(|&j| passive[j]).collect();
    let k = idx.len();
    let dot = |u: &[f64], v: &[f64]| u.iter().zip(v).map(|(x, y)| x * y).sum::<f64>();
    let mut g = vec![vec![0.0; k + 1]; k];
    for (r, &i) in idx.iter().enumerate() {
        for (s, &j) in idx.iter().enumerate() {
            g[r][s] = dot(&cols[i], &cols[j]);
        }
        g[r][k] = dot(&cols[i], b);
    }
    // Gaussian elimination with partial pivoting
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&i, &j| g[i][col].abs().total_cmp(&g[j][col].abs()))
            .expect("nonempty");
        g.swap(col, piv);
        let d = g[col][col];
        if d.abs() < 1e-300 {
            continue;
        }
        let pivot = g[col].clone();
        for row in g.iter_mut().take(k).skip(col + 1) {
            let f = row[col] / d;
            for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                *x -= f * p;
            }
        }
    }
    let mut sol = vec![0.0; k];
    for r in (0..k).rev() {
        let s: f64 = (r + 1..k).map(|c| g[r][c] * sol[c]).sum();
        sol[r] = if g[r][r].abs() < 1e-300 {
            0.0
        } else {
            (g[r][k] - s) / g[r][r]
        };
    }
    let mut z = vec![0.0; cols.len()];
    for (r, &i) in idx.iter().enumerate() {
        z[i] = sol[r];
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix_function_on_support;
    use crate::states::{assemble_cq, conditional_ensemble, random_state, BipartiteState, DensityMatrix};

    fn sqrt_a(s: &BipartiteState<f64>) -> ComplexMatrix<f64> {
        matrix_function_on_support(s.rho_a().matrix(), |x| x.sqrt(), None).unwrap()
    }

    #[test]
    fn nnls_recovers_nonnegative_combination() {
        let cols = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![1.0, 1.0, 0.0]];
        let x = nnls(&cols, &[2.0, -1.0, 0.0], 3);
        assert!((x[0] - 2.0).abs() < 1e-12 && x[1].abs() < 1e-12 && x[2].abs() < 1e-12);
        let p0 = [1.0, 0.0];
        let p1 = [0.0, 1.0];
        assert!(hull_distance(&[0.5, 0.5], &[&p0, &p1]) < 1e-7);
        assert!((hull_distance(&[1.0, 1.0], &[&p0, &p1]) - 0.5f64.sqrt()).abs() < 1e-6);
    }

    #[test]
    fn distinct_block_diagonal_states_are_all_extremal() {
        let conds: Vec<DensityMatrix<f64>> = (0..3).map(|s| random_state(2, 2, s).unwrap()).collect();
        let s = assemble_cq(&ComplexMatrix::identity(3), &[0.2, 0.3, 0.5], &conds).unwrap();
        let ens = conditional_ensemble(&s);
        let t = peel_extremal(&ens, &sqrt_a(&s), &PeelConfig::default()).unwrap();
        assert_eq!(t.groups, vec![vec![0], vec![1], vec![2]]);
        assert_eq!(t.rounds.len(), 1);
        assert_eq!(t.rounds[0].extremal, vec![0, 1, 2]);
        assert!(t.max_cross_term < 1e-12);
        assert!(t.convex_rows.iter().all(|r| r.residual.is_none()));
    }

    #[test]
    fn equal_conditionals_form_one_group() {
        let r = random_state::<f64>(2, 2, 5).unwrap();
        let s = BipartiteState::product(&random_state(3, 3, 6).unwrap(), &r);
        let t = peel_extremal(&conditional_ensemble(&s), &sqrt_a(&s), &PeelConfig::default()).unwrap();
        assert_eq!(t.groups, vec![vec![0, 1, 2]]);
        assert_eq!(t.rounds.len(), 1);
        assert!(t.rounds[0].cross_terms.is_empty());
        assert!(t.max_convex_residual() < 1e-10);
        assert!(t.convex_rows.iter().any(|r| r.residual.is_some()));
    }

    #[test]
    fn midpoint_is_peeled_second() {
        let r0 = random_state::<f64>(2, 2, 1).unwrap();
        let r1 = random_state::<f64>(2, 2, 2).unwrap();
        let mid = DensityMatrix::project(&(r0.matrix() + r1.matrix()).scale(0.5));
        let s = assemble_cq(&ComplexMatrix::identity(3), &[0.3, 0.3, 0.4], &[r0, r1, mid]).unwrap();
        let t = peel_extremal(&conditional_ensemble(&s), &sqrt_a(&s), &PeelConfig::default()).unwrap();
        assert_eq!(t.groups, vec![vec![0], vec![1], vec![2]]);
        let layers: Vec<Vec<usize>> = t.rounds.iter().map(|r| r.extremal.clone()).collect();
        assert_eq!(layers, vec![vec![0, 1], vec![2]]);
    }

    #[test]
    fn off_equality_is_rejected() {
        let s = crate::states::bell_state::<f64>();
        let u = ComplexMatrix::from_real(2, &[0.6, -0.8, 0.8, 0.6]).unwrap();
        let rotated = s.in_basis(&u).unwrap();
        let r = peel_extremal(
            &conditional_ensemble(&rotated),
            &sqrt_a(&rotated),
            &PeelConfig::default(),
        );
        // the Bell marginal is maximally mixed, so every denominator vanishes
        assert!(r.is_ok());
        let w = crate::states::werner_state::<f64>(0.5);
        let skew = BipartiteState::from_matrix(
            &(&w.matrix().scale(0.5)
                + &BipartiteState::product(&random_state(2, 2, 3).unwrap(), &random_state(2, 2, 4).unwrap())
                    .matrix()
                    .scale(0.5)),
            2,
            2,
        )
        .unwrap();
        let rot = skew.in_basis(&u).unwrap();
        assert!(matches!(
            peel_extremal(&conditional_ensemble(&rot), &sqrt_a(&rot), &PeelConfig::default()),
            Err(Error::NotAtEquality { .. })
        ));
    }
}
