use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use super::{build_basis, Basis, FockState, Lattice, OperatorExpr, SectorFamily, SectorLabel};
use crate::error::{domain, Error, Result};

/// Dense amplitudes over a (possibly sector-restricted) Fock basis.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    basis: Arc<Basis>,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(basis: Arc<Basis>, amplitudes: DVector<C64>) -> Result<Self> {
        if amplitudes.len() != basis.len() {
            return Err(Error::DimensionMismatch {
                expected: basis.len(),
                found: amplitudes.len(),
            });
        }
        Ok(StateVector { basis, amplitudes })
    }

    pub fn basis_state(basis: Arc<Basis>, state: FockState) -> Result<Self> {
        let Some(i) = basis.index_of(state) else {
            return domain(format!("{state} is not in the basis"));
        };
        let mut amplitudes = DVector::zeros(basis.len());
        amplitudes[i] = C64::new(1.0, 0.0);
        Ok(StateVector { basis, amplitudes })
    }

    /// The vacuum on the unrestricted basis of `lattice`.
    pub fn vacuum(lattice: Lattice) -> Result<Self> {
        Self::basis_state(Arc::new(build_basis(lattice, None)?), FockState::VACUUM)
    }

    pub fn basis(&self) -> &Arc<Basis> {
        &self.basis
    }

    pub fn lattice(&self) -> &Lattice {
        self.basis.lattice()
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (FockState, C64)> + '_ {
        self.basis
            .states()
            .iter()
            .copied()
            .zip(self.amplitudes.iter().copied())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return domain("cannot normalize a zero vector");
        }
        Ok(StateVector {
            basis: self.basis.clone(),
            amplitudes: self.amplitudes.unscale(n),
        })
    }

    pub fn amplitude(&self, state: FockState) -> C64 {
        self.basis
            .index_of(state)
            .map_or(C64::new(0.0, 0.0), |i| self.amplitudes[i])
    }

    /// Embed into the unrestricted basis of the same lattice.
    pub fn to_full(&self) -> Result<Self> {
        if self.basis.is_full() {
            return Ok(self.clone());
        }
        let full = Arc::new(build_basis(*self.lattice(), None)?);
        let mut amplitudes = DVector::zeros(full.len());
        for (s, a) in self.iter() {
            amplitudes[s.0 as usize] = a;
        }
        Ok(StateVector {
            basis: full,
            amplitudes,
        })
    }

    /// Project onto `basis` (same lattice), dropping components outside it.
    pub fn restrict(&self, basis: Arc<Basis>) -> Result<Self> {
        if basis.lattice() != self.lattice() {
            return domain("cannot restrict onto a basis of a different lattice");
        }
        let amplitudes = DVector::from_iterator(
            basis.len(),
            basis.states().iter().map(|&s| self.amplitude(s)),
        );
        Ok(StateVector { basis, amplitudes })
    }

    /// `⟨self|other⟩`, matching amplitudes by basis state.
    pub fn inner(&self, other: &StateVector) -> C64 {
        if Arc::ptr_eq(&self.basis, &other.basis) || self.basis == other.basis {
            return self.amplitudes.dotc(&other.amplitudes);
        }
        self.iter()
            .map(|(s, a)| a.conj() * other.amplitude(s))
            .sum()
    }

    /// `|⟨a|b⟩|² / (⟨a|a⟩⟨b|b⟩)`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr() / (self.norm() * self.norm() * other.norm() * other.norm())
    }

    /// `expr |self⟩`, kept on the same basis (components leaving it are dropped).
    pub fn apply(&self, expr: &OperatorExpr) -> Result<Self> {
        let m = expr.realize(&self.basis)?;
        Ok(StateVector {
            basis: self.basis.clone(),
            amplitudes: m * &self.amplitudes,
        })
    }

    /// Mean and variance of the occupation count restricted to `mask`.
    pub fn count_moments(&self, mask: u32) -> (f64, f64) {
        let norm2 = self.amplitudes.norm_squared();
        let (mut m1, mut m2) = (0.0, 0.0);
        for (s, a) in self.iter() {
            let n = (s.0 & mask).count_ones() as f64;
            let p = a.norm_sqr();
            m1 += p * n;
            m2 += p * n * n;
        }
        let mean = m1 / norm2;
        (mean, (m2 / norm2 - mean * mean).max(0.0))
    }
}

/// Split a vector into its components in each sector of `family`.
///
/// Components are returned in ascending label order, unnormalized, so their
/// squared norms add up to the squared norm of `vector`. Sectors with an
/// identically zero component are omitted.
pub fn sector_split(
    vector: &StateVector,
    family: SectorFamily,
) -> Result<Vec<(SectorLabel, StateVector)>> {
    let lattice = *vector.lattice();
    if family != SectorFamily::TotalN && !lattice.is_spinful() {
        return domain(format!("{family:?} sectors require a spin-1/2 lattice"));
    }
    let mut groups: BTreeMap<SectorLabel, Vec<(FockState, C64)>> = BTreeMap::new();
    for (s, a) in vector.iter() {
        if a.norm_sqr() > 0.0 {
            groups
                .entry(s.sector(&lattice, family))
                .or_default()
                .push((s, a));
        }
    }
    groups
        .into_iter()
        .map(|(label, entries)| {
            let basis = Arc::new(build_basis(lattice, Some(label))?);
            let mut amplitudes = DVector::zeros(basis.len());
            for (s, a) in entries {
                let i = basis.index_of(s).expect("state belongs to its own sector");
                amplitudes[i] = a;
            }
            Ok((label, StateVector { basis, amplitudes }))
        })
        .collect()
}
