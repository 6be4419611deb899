use thiserror::Error;

use crate::fock::SectorLabel;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A size cap (mode count, Fock dimension) would be exceeded.
    #[error("resource cap exceeded: {0}")]
    Resource(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A contributing eigenspace is degenerate inside its sector, so per-state
    /// entanglement would depend on an arbitrary choice of basis.
    #[error(
        "degenerate eigenspace in sector {sector} at energy {energy} (multiplicity {multiplicity})"
    )]
    Degenerate {
        sector: SectorLabel,
        energy: f64,
        multiplicity: usize,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
