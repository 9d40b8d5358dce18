//! Classical-quantum discord of bipartite density matrices.
//!
//! The crate computes the mutual-information loss caused by measuring the
//! A factor of a state, minimises it over measurement bases, and certifies
//! zero-discord states as classical-quantum by reconstructing them with the
//! Petz recovery map of the dephasing channel and extracting a basis in
//! which they are block diagonal.
//!
//! Linear algebra, states, entropies, channels and the Petz map are generic
//! over the real scalar ([`Real`], implemented for `f32` and `f64`); the
//! optimisation layer works in `f64`. Aliases for the common `f64` types
//! live at the crate root.

pub mod channels;
pub mod discord;
pub mod error;
pub mod linalg;
pub mod measures;
pub mod petz;
pub mod random;
pub mod scalar;
pub mod states;
pub mod zeroing;

pub use error::{Error, Result};
pub use scalar::Real;

/// Double-precision complex matrix.
pub type CMatrix = linalg::ComplexMatrix<f64>;
/// Single-precision complex matrix.
pub type CMatrix32 = linalg::ComplexMatrix<f32>;
pub type Density = states::DensityMatrix<f64>;
pub type Density32 = states::DensityMatrix<f32>;
pub type Bipartite = states::BipartiteState<f64>;
pub type Ensemble = states::ConditionalEnsemble<f64>;
pub type Channel = channels::KrausChannel<f64>;
pub type Povm = channels::Povm<f64>;
pub type Petz = petz::PetzMap<f64>;
pub type Complex64 = num_complex::Complex<f64>;
