//! Classical-quantum discord: the smallest loss of mutual information caused
//! by measuring the A factor, and certification of zero-discord states.
//!
//! The minimisation is local and multi-start. It is not guaranteed to find
//! the global minimum.

mod certify;
mod optimize;
mod oracle;
mod peel;

pub use certify::{certify_classical, Certification, CertifyConfig, ClassicalityCertificate, Witness};
pub use oracle::qubit_discord_oracle;
pub use peel::{convex_rows, peel_extremal, ConvexRow, PeelConfig, PeelRound, PeelTrace};

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::channels::{dephasing_channel, padding_isometry};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::measures::mutual_information;
use crate::random::{haar_unitary, rng_from_seed};
use crate::scalar::Real;
use crate::states::BipartiteState;

use optimize::{descend, LocalMin, Objective};

/// Options for [`discord`].
#[derive(Debug, Clone, PartialEq)]
pub struct DiscordConfig {
    /// Number of Haar-random starting bases.
    pub restarts: usize,
    /// Iteration cap for each local descent.
    pub max_iters: usize,
    /// A descent stops once one step improves the loss by less than this.
    pub step_tol: f64,
    /// Embed A into dimension `d_A^2` first, so that the bases range over
    /// all rank-one measurements of A.
    pub enlarge: bool,
    pub seed: u64,
}

impl Default for DiscordConfig {
    fn default() -> Self {
        Self {
            restarts: 16,
            max_iters: 500,
            step_tol: 1e-13,
            enlarge: true,
            seed: 0,
        }
    }
}

impl DiscordConfig {
    fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::BadConfig("restarts must be at least 1".into()));
        }
        if self.max_iters == 0 {
            return Err(Error::BadConfig("max_iters must be at least 1".into()));
        }
        if !(self.step_tol.is_finite() && self.step_tol >= 0.0) {
            return Err(Error::BadConfig(format!(
                "step_tol must be finite and >= 0, got {}",
                self.step_tol
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct DiscordResult {
    /// Mutual-information loss in bits at `best_basis`.
    pub value: f64,
    /// Columns are the measurement basis. When `enlarged`, this acts on the
    /// padded space of dimension `d_A^2`.
    pub best_basis: ComplexMatrix<f64>,
    pub enlarged: bool,
    pub restarts_used: usize,
    /// Whether the winning descent met `step_tol` before `max_iters`.
    pub converged: bool,
    pub iterations: usize,
}

impl DiscordResult {
    /// Recomputes the loss at `best_basis` through the dephasing channel.
    pub fn recompute(&self, s: &BipartiteState<f64>) -> Result<f64> {
        if self.enlarged {
            let embedded = s.apply_local(&padding_isometry(s.d_a(), self.best_basis.rows()))?;
            mutual_information_loss(&embedded, &self.best_basis)
        } else {
            mutual_information_loss(s, &self.best_basis)
        }
    }
}

/// `I(rho) - I(D_U(rho))` for the basis given by the columns of `basis`.
pub fn mutual_information_loss<T: Real>(s: &BipartiteState<T>, basis: &ComplexMatrix<T>) -> Result<T> {
    if basis.rows() != s.d_a() {
        return Err(crate::error::dim_mismatch(s.d_a(), basis.rows()));
    }
    let d = dephasing_channel(basis, s.d_a(), s.d_b())?;
    let dephased = BipartiteState::new(d.apply(s.state())?, s.d_a(), s.d_b())?;
    Ok(mutual_information(s) - mutual_information(&dephased))
}

/// Multi-start minimisation of the mutual-information loss over bases of A
/// (or of the padded space when `cfg.enlarge`).
pub fn discord(s: &BipartiteState<f64>, cfg: &DiscordConfig) -> Result<DiscordResult> {
    cfg.validate()?;
    let d_a = s.d_a();
    let enlarged = cfg.enlarge && d_a > 1;
    let work = if enlarged {
        s.apply_local(&padding_isometry(d_a, d_a * d_a))?
    } else {
        s.clone()
    };
    let obj = Objective::new(&work);
    let best = (0..cfg.restarts)
        .into_par_iter()
        .map(|r| {
            let start = haar_unitary(&mut restart_rng(cfg.seed, r), obj.dim());
            (r, descend(&obj, start, cfg.max_iters, cfg.step_tol))
        })
        .reduce_with(pick_better)
        .expect("at least one restart");
    let (
        _,
        LocalMin {
            value,
            basis,
            iterations,
            converged,
        },
    ) = best;
    Ok(DiscordResult {
        value,
        best_basis: basis,
        enlarged,
        restarts_used: cfg.restarts,
        converged,
        iterations,
    })
}

fn restart_rng(seed: u64, r: usize) -> ChaCha8Rng {
    let mut rng = rng_from_seed(seed);
    rng.set_stream(r as u64);
    rng
}

/// Lower value wins; equal values go to the lower restart index.
fn pick_better(a: (usize, LocalMin), b: (usize, LocalMin)) -> (usize, LocalMin) {
    match a.1.value.total_cmp(&b.1.value).then(a.0.cmp(&b.0)) {
        std::cmp::Ordering::Greater => b,
        _ => a,
    }
}
