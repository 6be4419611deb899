//! Fermionic Fock spaces, Bogoliubov re-partitions, exact diagonalization of
//! small lattice models, and single-site (local) entanglement.
//!
//! The crate is organised bottom-up:
//!
//! - [`fock`]: occupation-number bases, ladder operators and their dense
//!   matrix realization.
//! - [`transform`]: single-particle mode maps and the Fock-space unitaries
//!   they induce.
//! - [`models`]: free chain, Hubbard model and the supersymmetric EKS dimer.
//! - [`spectral`]: sector-resolved diagonalization and thermal sums.
//! - [`entanglement`]: reduced density matrices of single sites and entropies.

pub mod entanglement;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod models;
pub mod spectral;
pub mod transform;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
