//! Local minimisation of the mutual-information loss over the unitary group.
//!
//! The loss only depends on the columns `u_a` of the measurement basis:
//!
//! ```text
//! f(U) = S(rho_A) - S(rho_AB) + sum_a phi(B_a),   B_a = (<u_a| (x) I) rho (|u_a> (x) I)
//! phi(B) = tr(B) S(B / tr B)
//! ```
//!
//! Steps are taken as `U <- U exp(i X)` with `X` Hermitian and zero on the
//! diagonal (column phases do not change `f`). Gradients are central
//! differences along the elementary generators; each one touches only two
//! columns, so it costs four `d_b x d_b` eigenproblems.

use num_traits::Zero;

use crate::linalg::{jacobi, unitary_from_eig, ComplexMatrix};
use crate::measures::von_neumann_entropy;
use crate::scalar::{c, C};
use crate::states::BipartiteState;

const FD_STEP: f64 = 1e-5;
const ARMIJO: f64 = 1e-4;
const MAX_BACKTRACK: usize = 40;
const GRAD_TOL: f64 = 1e-11;

/// Mutual-information loss as a function of a measurement basis.
pub(crate) struct Objective {
    d_a: usize,
    d_b: usize,
    /// `blocks[i * d_a + j]` is the `(i, j)` block of the state.
    blocks: Vec<ComplexMatrix<f64>>,
    offset: f64,
}

impl Objective {
    pub fn new(s: &BipartiteState<f64>) -> Self {
        let (d_a, d_b) = (s.d_a(), s.d_b());
        let mut blocks = Vec::with_capacity(d_a * d_a);
        for i in 0..d_a {
            for j in 0..d_a {
                blocks.push(s.block(i, j).expect("in range"));
            }
        }
        let offset = von_neumann_entropy(&s.rho_a()) - von_neumann_entropy(s.state());
        Self {
            d_a,
            d_b,
            blocks,
            offset,
        }
    }

    pub fn dim(&self) -> usize {
        self.d_a
    }

    /// `phi(B_u)` for one basis vector.
    fn column_term(&self, u: &[C<f64>]) -> f64 {
        let d_b = self.d_b;
        let mut b = ComplexMatrix::zeros(d_b, d_b);
        for i in 0..self.d_a {
            let ui = u[i].conj();
            if ui.is_zero() {
                continue;
            }
            for (j, &uj) in u.iter().enumerate().take(self.d_a) {
                let w = ui * uj;
                if w.is_zero() {
                    continue;
                }
                let blk = &self.blocks[i * self.d_a + j];
                for k in 0..d_b {
                    for l in 0..d_b {
                        b[(k, l)] += w * blk[(k, l)];
                    }
                }
            }
        }
        let eig = jacobi(&b.hermitian_part());
        let total: f64 = eig.eigenvalues.iter().sum();
        if total <= 0.0 {
            return 0.0;
        }
        let mut phi = total * total.log2();
        for &l in &eig.eigenvalues {
            if l > 0.0 {
                phi -= l * l.log2();
            }
        }
        phi
    }

    fn column_terms(&self, u: &ComplexMatrix<f64>) -> Vec<f64> {
        (0..self.d_a).map(|a| self.column_term(&u.column(a))).collect()
    }

    pub fn value(&self, u: &ComplexMatrix<f64>) -> f64 {
        self.offset + self.column_terms(u).iter().sum::<f64>()
    }

    /// Number of real parameters: two generators per unordered column pair.
    fn n_params(&self) -> usize {
        self.d_a * (self.d_a - 1)
    }

    /// Central-difference gradient at `U` along the generators
    /// `E_jk + E_kj` and `i(E_jk - E_kj)`, `j < k`.
    fn gradient(&self, u: &ComplexMatrix<f64>, terms: &[f64]) -> Vec<f64> {
        let mut g = Vec::with_capacity(self.n_params());
        let cols: Vec<Vec<C<f64>>> = (0..self.d_a).map(|a| u.column(a)).collect();
        for (j, k) in pairs(self.d_a) {
            for kind in [Generator::Symmetric, Generator::Antisymmetric] {
                let mut diff = 0.0;
                for sign in [1.0, -1.0] {
                    let (cj, ck) = rotate_pair(&cols[j], &cols[k], kind, sign * FD_STEP);
                    let delta = self.column_term(&cj) + self.column_term(&ck) - terms[j] - terms[k];
                    diff += sign * delta;
                }
                g.push(diff / (2.0 * FD_STEP));
            }
        }
        g
    }

    /// Hermitian step generator `X = sum_p x_p G_p`.
    fn generator(&self, x: &[f64]) -> ComplexMatrix<f64> {
        let mut h = ComplexMatrix::zeros(self.d_a, self.d_a);
        for (p, (j, k)) in pairs(self.d_a).enumerate() {
            let s = x[2 * p];
            let a = x[2 * p + 1];
            h[(j, k)] += c(s, a);
            h[(k, j)] += c(s, -a);
        }
        h
    }
}

#[derive(Clone, Copy)]
enum Generator {
    Symmetric,
    Antisymmetric,
}

fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..n).flat_map(move |j| (j + 1..n).map(move |k| (j, k)))
}

/// Columns `(u_j, u_k)` of `U exp(i eps G)` for a single generator.
fn rotate_pair(uj: &[C<f64>], uk: &[C<f64>], kind: Generator, eps: f64) -> (Vec<C<f64>>, Vec<C<f64>>) {
    let (cs, sn) = (eps.cos(), eps.sin());
    // entries of exp(i eps G) restricted to the (j, k) plane
    let (e_jj, e_jk, e_kj, e_kk) = match kind {
        Generator::Symmetric => (c(cs, 0.0), c(0.0, sn), c(0.0, sn), c(cs, 0.0)),
        Generator::Antisymmetric => (c(cs, 0.0), c(-sn, 0.0), c(sn, 0.0), c(cs, 0.0)),
    };
    let nj = uj.iter().zip(uk).map(|(&a, &b)| a * e_jj + b * e_kj).collect();
    let nk = uj.iter().zip(uk).map(|(&a, &b)| a * e_jk + b * e_kk).collect();
    (nj, nk)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Result of one local descent.
#[derive(Debug, Clone)]
pub(crate) struct LocalMin {
    pub value: f64,
    pub basis: ComplexMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
}

/// BFGS in the right-trivialised chart `U exp(i X)`, recentred after every
/// step. The inverse-Hessian estimate is carried across charts unchanged.
pub(crate) fn descend(obj: &Objective, start: ComplexMatrix<f64>, max_iters: usize, step_tol: f64) -> LocalMin {
    let n = obj.n_params();
    let mut u = start;
    let mut terms = obj.column_terms(&u);
    let mut f = obj.offset + terms.iter().sum::<f64>();
    if n == 0 {
        return LocalMin {
            value: f,
            basis: u,
            iterations: 0,
            converged: true,
        };
    }
    let mut g = obj.gradient(&u, &terms);
    let mut hinv = identity(n);
    let mut fresh = true;
    let mut converged = false;
    let mut iterations = 0;

    while iterations < max_iters {
        iterations += 1;
        if dot(&g, &g).sqrt() < GRAD_TOL {
            converged = true;
            break;
        }
        let mut dir = descent_direction(&hinv, &g);
        if dot(&dir, &g) >= 0.0 {
            hinv = identity(n);
            fresh = true;
            dir = g.iter().map(|x| -x).collect();
        }
        let step = match line_search(obj, &u, f, &g, &dir, fresh) {
            Some(step) => step,
            None if !fresh => {
                hinv = identity(n);
                fresh = true;
                continue;
            }
            None => {
                converged = true;
                break;
            }
        };
        let improvement = f - step.value;
        u = step.basis;
        terms = obj.column_terms(&u);
        f = obj.offset + terms.iter().sum::<f64>();
        let g_new = obj.gradient(&u, &terms);

        let s: Vec<f64> = dir.iter().map(|d| d * step.tau).collect();
        let y: Vec<f64> = g_new.iter().zip(&g).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-18 {
            if fresh {
                let scale = sy / dot(&y, &y);
                hinv.iter_mut().for_each(|h| *h *= scale);
                fresh = false;
            }
            bfgs_update(&mut hinv, &s, &y, sy);
        }
        g = g_new;
        if improvement < step_tol {
            converged = true;
            break;
        }
    }
    LocalMin {
        value: f,
        basis: u,
        iterations,
        converged,
    }
}

struct Step {
    tau: f64,
    value: f64,
    basis: ComplexMatrix<f64>,
}

/// Backtracking Armijo search along `U exp(i tau X(dir))`.
fn line_search(obj: &Objective, u: &ComplexMatrix<f64>, f: f64, g: &[f64], dir: &[f64], fresh: bool) -> Option<Step> {
    let slope = dot(g, dir);
    let eig = jacobi(&obj.generator(dir));
    // steepest-descent steps start at a rotation angle of at most ~0.5 rad
    let norm = dot(dir, dir).sqrt();
    let mut tau = if fresh { (0.5 / norm).min(1.0) } else { 1.0 };
    for _ in 0..MAX_BACKTRACK {
        let candidate = u.matmul(&unitary_from_eig(&eig, tau));
        let value = obj.value(&candidate);
        if value <= f + ARMIJO * tau * slope {
            return Some(Step {
                tau,
                value,
                basis: candidate,
            });
        }
        tau *= 0.5;
    }
    None
}

fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

fn descent_direction(hinv: &[f64], g: &[f64]) -> Vec<f64> {
    let n = g.len();
    (0..n).map(|i| -dot(&hinv[i * n..(i + 1) * n], g)).collect()
}

/// `H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T`.
fn bfgs_update(h: &mut [f64], s: &[f64], y: &[f64], sy: f64) {
    let n = s.len();
    let rho = 1.0 / sy;
    let hy: Vec<f64> = (0..n).map(|i| dot(&h[i * n..(i + 1) * n], y)).collect();
    let yhy = dot(y, &hy);
    for i in 0..n {
        for j in 0..n {
            h[i * n + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
        }
    }
}
