//! Brute-force discord for a qubit A factor.
//!
//! Every orthonormal basis of `C^2` is, up to column phases, `u0 = (cos t/2,
//! e^{i f} sin t/2)`, `u1 = (-e^{-i f} sin t/2, cos t/2)`, so the loss is a
//! function of two angles. This module scans them on a grid and polishes the
//! best cells by golden-section search. It shares no code with the optimiser.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measures::von_neumann_entropy;
use crate::scalar::{c, C};
use crate::states::{BipartiteState, DensityMatrix};

const POLISHED_CELLS: usize = 3;
const POLISH_PASSES: usize = 6;
const GOLDEN_STEPS: usize = 60;

struct Loss {
    offset: f64,
    blocks: [ComplexMatrix<f64>; 4],
}

impl Loss {
    fn new(s: &BipartiteState<f64>) -> Result<Self> {
        let blocks = [s.block(0, 0)?, s.block(0, 1)?, s.block(1, 0)?, s.block(1, 1)?];
        let offset = von_neumann_entropy(&s.rho_a()) - von_neumann_entropy(s.state());
        Ok(Self { offset, blocks })
    }

    /// `S(A) - S(AB) + sum_a p_a S(rho_a)`.
    fn at(&self, theta: f64, phi: f64) -> f64 {
        let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = C::from_polar(1.0, phi);
        let u0 = [c(ct, 0.0), e * st];
        let u1 = [-e.conj() * st, c(ct, 0.0)];
        let mut total = self.offset;
        for u in [u0, u1] {
            let mut m = ComplexMatrix::zeros(self.blocks[0].rows(), self.blocks[0].cols());
            for i in 0..2 {
                for j in 0..2 {
                    m = &m + &self.blocks[2 * i + j].scale_c(u[i].conj() * u[j]);
                }
            }
            let p = m.trace().re;
            if p > 1e-15 {
                total += p * von_neumann_entropy(&DensityMatrix::project(&m.scale(1.0 / p)));
            }
        }
        total
    }
}

/// Minimum of the loss over an `n x n` grid in `(theta, phi)` followed by
/// alternating golden-section refinement around the best cells.
pub fn qubit_discord_oracle(s: &BipartiteState<f64>, grid: usize) -> Result<f64> {
    if s.d_a() != 2 {
        return Err(Error::WrongDimension {
            expected: 2,
            found: s.d_a(),
        });
    }
    let n = grid.max(2);
    let loss = Loss::new(s)?;
    let dt = PI / (n - 1) as f64;
    let dp = TAU / n as f64;

    let mut cells: Vec<(f64, usize, usize)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            let loss = &loss;
            (0..n).map(move |j| (loss.at(i as f64 * dt, j as f64 * dp), i, j))
        })
        .collect();
    cells.sort_by(|a, b| a.0.total_cmp(&b.0).then((a.1, a.2).cmp(&(b.1, b.2))));

    let mut best = cells[0].0;
    for &(v, i, j) in cells.iter().take(POLISHED_CELLS) {
        let (mut t, mut p, mut f) = (i as f64 * dt, j as f64 * dp, v);
        for _ in 0..POLISH_PASSES {
            let (nt, _) = golden(|x| loss.at(x, p), (t - dt).max(0.0), (t + dt).min(PI));
            let (np, nf) = golden(|y| loss.at(nt, y), p - dp, p + dp);
            t = nt;
            p = np;
            f = f.min(nf);
        }
        best = best.min(f);
    }
    Ok(best)
}

fn golden(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..GOLDEN_STEPS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{bell_state, random_cq_state, werner_state};

    #[test]
    fn known_values() {
        assert!((qubit_discord_oracle(&bell_state(), 60).unwrap() - 1.0).abs() < 2e-3);
        let w = qubit_discord_oracle(&werner_state(0.5), 60).unwrap();
        assert!((w - 0.26248318376373436).abs() < 1e-6, "{w}");
        let cq = random_cq_state::<f64>(2, 3, 4).unwrap();
        assert!(qubit_discord_oracle(&cq, 60).unwrap() <= 1e-6);
    }

    #[test]
    fn rejects_other_dimensions() {
        let s = random_cq_state::<f64>(3, 2, 1).unwrap();
        assert!(matches!(
            qubit_discord_oracle(&s, 10),
            Err(Error::WrongDimension { expected: 2, found: 3 })
        ));
    }
}
