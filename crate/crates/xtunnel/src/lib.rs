//! Double-well simulator for exchange-assisted tunneling in one dimension.
//!
//! Units are natural (ħ = m = 1). Wavefunctions live on a uniform [`Grid`] and
//! are normalized with the weight `h`, so `⟨f|g⟩ = h Σ f g`.
//!
//! The crate is layered bottom-up:
//! [`model`] (grid, potentials, kernel) → [`eigen`] (eigensolvers, shifted
//! solves) → [`single_particle`] (doublets, tunneling, WKB) → [`exchange`]
//! (Coulomb elements) → [`hartree_fock`] (exchange-induced mixing) →
//! [`two_particle`] (exact two-body diagonalization) → [`analysis`] (fits,
//! crossover, scans).

pub mod analysis;
pub mod eigen;
pub mod error;
pub mod exchange;
pub mod hartree_fock;
pub mod model;
pub mod single_particle;
pub mod two_particle;

pub use error::{Error, Result};
pub use model::{DoubleWellSpec, Grid, InteractionKernel, WellShape};
