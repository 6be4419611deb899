//! Lattice Hamiltonians: free spinless chain, Hubbard model, EKS dimer.

use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{domain, Error, Result};
use crate::fock::{
    build_basis, Basis, FockState, Lattice, ModeIndex, OperatorExpr, SectorFamily, SectorLabel,
    Spin, StateVector,
};
use crate::transform::{fourier_map, permute_state, slater_state, wave_vector};

/// Largest spinless chain handled by the dense solvers.
pub const MAX_SPINLESS_SITES: usize = 16;
/// Largest spin-1/2 lattice handled by the dense solvers.
pub const MAX_SPINFUL_SITES: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModelKind {
    FreeChain,
    Hubbard,
    EksDimer,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Boundary {
    Open,
    /// Adds the bond `(L-1, 0)`. At `L = 2` this doubles the single bond.
    Periodic,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub sites: usize,
    /// Hopping energy.
    pub t: f64,
    /// On-site repulsion (Hubbard only).
    pub u: f64,
    /// Chemical potential built into the Hamiltonian as `-mu N`.
    pub mu: f64,
    pub boundary: Boundary,
}

impl ModelSpec {
    pub fn free_chain(sites: usize, t: f64, mu: f64, boundary: Boundary) -> Self {
        ModelSpec {
            kind: ModelKind::FreeChain,
            sites,
            t,
            u: 0.0,
            mu,
            boundary,
        }
    }

    pub fn hubbard(sites: usize, t: f64, u: f64, mu: f64, boundary: Boundary) -> Self {
        ModelSpec {
            kind: ModelKind::Hubbard,
            sites,
            t,
            u,
            mu,
            boundary,
        }
    }

    /// Two-site Hubbard model with a single bond and no chemical potential.
    pub fn hubbard_dimer(t: f64, u: f64) -> Self {
        Self::hubbard(2, t, u, 0.0, Boundary::Open)
    }

    /// The EKS dimer at half filling; hopping, repulsion and chemical potential
    /// do not enter.
    pub fn eks_dimer() -> Self {
        ModelSpec {
            kind: ModelKind::EksDimer,
            sites: 2,
            t: 0.0,
            u: 0.0,
            mu: 0.0,
            boundary: Boundary::Open,
        }
    }

    pub fn lattice(&self) -> Lattice {
        match self.kind {
            ModelKind::FreeChain => Lattice::spinless(self.sites),
            ModelKind::Hubbard | ModelKind::EksDimer => Lattice::spinful(self.sites),
        }
    }

    /// Conserved quantities used to block-diagonalize the model.
    pub fn sector_family(&self) -> SectorFamily {
        match self.kind {
            ModelKind::FreeChain => SectorFamily::TotalN,
            ModelKind::Hubbard => SectorFamily::SpinResolved,
            ModelKind::EksDimer => SectorFamily::EksTriple,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t.is_finite() && self.u.is_finite() && self.mu.is_finite()) {
            return domain("model parameters must be finite");
        }
        match self.kind {
            ModelKind::EksDimer if self.sites != 2 => domain(format!(
                "the EKS model is only supported as a dimer, got L = {}",
                self.sites
            )),
            _ if self.sites == 0 => domain("a lattice needs at least one site"),
            ModelKind::FreeChain if self.sites > MAX_SPINLESS_SITES => {
                Err(Error::Resource(format!(
                    "spinless chain of {} sites exceeds the cap of {MAX_SPINLESS_SITES}",
                    self.sites
                )))
            }
            ModelKind::Hubbard if self.sites > MAX_SPINFUL_SITES => Err(Error::Resource(format!(
                "spin-1/2 lattice of {} sites exceeds the cap of {MAX_SPINFUL_SITES}",
                self.sites
            ))),
            _ => Ok(()),
        }
    }

    fn bonds(&self) -> Vec<(usize, usize)> {
        let l = self.sites;
        let mut bonds: Vec<(usize, usize)> = (0..l.saturating_sub(1)).map(|j| (j, j + 1)).collect();
        if self.boundary == Boundary::Periodic && l >= 2 {
            bonds.push((l - 1, 0));
        }
        bonds
    }
}

/// A Hamiltonian, either as a second-quantized expression or as the EKS graded
/// swap defined by its action on product states.
#[derive(Debug, Clone)]
pub enum Hamiltonian {
    Expr {
        lattice: Lattice,
        expr: OperatorExpr,
    },
    GradedSwap {
        lattice: Lattice,
    },
}

impl Hamiltonian {
    pub fn lattice(&self) -> &Lattice {
        match self {
            Hamiltonian::Expr { lattice, .. } | Hamiltonian::GradedSwap { lattice } => lattice,
        }
    }

    pub fn expr(&self) -> Option<&OperatorExpr> {
        match self {
            Hamiltonian::Expr { expr, .. } => Some(expr),
            Hamiltonian::GradedSwap { .. } => None,
        }
    }

    /// Dense matrix on `basis`.
    pub fn realize(&self, basis: &Basis) -> Result<DMatrix<C64>> {
        if basis.lattice() != self.lattice() {
            return domain("basis lattice does not match the Hamiltonian");
        }
        match self {
            Hamiltonian::Expr { expr, .. } => expr.realize(basis),
            Hamiltonian::GradedSwap { lattice } => {
                let n = basis.len();
                let mut m = DMatrix::zeros(n, n);
                for (col, &s) in basis.states().iter().enumerate() {
                    let (amp, t) = graded_swap_state(lattice, s);
                    let row = basis.index_of(t).ok_or_else(|| {
                        Error::Domain("graded swap leaves the basis sector".into())
                    })?;
                    m[(row, col)] += C64::new(amp, 0.0);
                }
                Ok(m)
            }
        }
    }
}

pub fn build_hamiltonian(spec: &ModelSpec) -> Result<Hamiltonian> {
    spec.validate()?;
    let lattice = spec.lattice();
    let expr = match spec.kind {
        ModelKind::EksDimer => return Ok(Hamiltonian::GradedSwap { lattice }),
        ModelKind::FreeChain => hopping(spec, &[Spin::None]),
        ModelKind::Hubbard => {
            let mut h = hopping(spec, &[Spin::Up, Spin::Down]);
            if spec.u != 0.0 {
                for j in 0..spec.sites {
                    h += spec.u
                        * (OperatorExpr::number(ModeIndex::up(j))
                            * OperatorExpr::number(ModeIndex::down(j)));
                }
            }
            h
        }
    };
    Ok(Hamiltonian::Expr { lattice, expr })
}

/// `-t Σ_bonds Σ_σ (c†_{j+1 σ} c_{j σ} + h.c.) - mu N`.
fn hopping(spec: &ModelSpec, spins: &[Spin]) -> OperatorExpr {
    let mut h = OperatorExpr::zero();
    for &(a, b) in &spec.bonds() {
        for &spin in spins {
            let (ma, mb) = (ModeIndex { site: a, spin }, ModeIndex { site: b, spin });
            h += (-spec.t) * (OperatorExpr::hop(mb, ma) + OperatorExpr::hop(ma, mb));
        }
    }
    if spec.mu != 0.0 {
        for j in 0..spec.sites {
            for &spin in spins {
                h += (-spec.mu) * OperatorExpr::number(ModeIndex { site: j, spin });
            }
        }
    }
    h
}

/// Local states of a spin-1/2 site, in local-index order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LocalState {
    Empty,
    Up,
    Down,
    Double,
}

impl LocalState {
    pub const ALL: [LocalState; 4] = [
        LocalState::Empty,
        LocalState::Up,
        LocalState::Down,
        LocalState::Double,
    ];

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i]
    }

    pub fn index(self) -> usize {
        self as usize
    }

    /// Fermion-number parity: odd for singly occupied sites.
    pub fn is_odd(self) -> bool {
        matches!(self, LocalState::Up | LocalState::Down)
    }

    /// `|σ⟩ ↔ |-σ⟩`, `|0⟩ ↔ |↑↓⟩`.
    pub fn particle_hole(self) -> Self {
        match self {
            LocalState::Empty => LocalState::Double,
            LocalState::Up => LocalState::Down,
            LocalState::Down => LocalState::Up,
            LocalState::Double => LocalState::Empty,
        }
    }
}

/// EKS action `H |a⟩⊗|b⟩ = (-1)^{|a||b|} |b⟩⊗|a⟩`.
pub fn eks_apply(a: LocalState, b: LocalState) -> (f64, (LocalState, LocalState)) {
    let phase = if a.is_odd() && b.is_odd() { -1.0 } else { 1.0 };
    (phase, (b, a))
}

/// Graded swap on a canonical Fock basis state of a spin-1/2 dimer.
fn graded_swap_state(lattice: &Lattice, s: FockState) -> (f64, FockState) {
    let (a, b) = (lattice.local_index(s, 0), lattice.local_index(s, 1));
    // canonical state -> product state phase, then back
    let to_product = lattice.local_phase(a) * lattice.local_phase(b);
    let (phase, (na, nb)) = eks_apply(LocalState::from_index(a), LocalState::from_index(b));
    let from_product = lattice.local_phase(na.index()) * lattice.local_phase(nb.index());
    let t = FockState(lattice.local_bits(0, na.index()) | lattice.local_bits(1, nb.index()));
    (to_product * phase * from_product, t)
}

/// Set of occupied momenta `k_l = 2πl/L`, stored by their indices `l`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MomentumTuple {
    sites: usize,
    indices: Vec<usize>,
}

impl MomentumTuple {
    /// Indices are sorted; repeated momenta are rejected (Pauli exclusion).
    pub fn new(sites: usize, indices: &[usize]) -> Result<Self> {
        let mut sorted = indices.to_vec();
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return domain(format!("momentum index {} occupied twice", w[0]));
        }
        if let Some(&l) = sorted.iter().find(|&&l| l >= sites) {
            return domain(format!("momentum index {l} out of range for {sites} sites"));
        }
        Ok(MomentumTuple {
            sites,
            indices: sorted,
        })
    }

    /// Every tuple on `sites` sites, grouped by particle number.
    pub fn all(sites: usize) -> Vec<MomentumTuple> {
        let mut out: Vec<MomentumTuple> = (0u32..1 << sites)
            .map(|mask| MomentumTuple {
                sites,
                indices: (0..sites).filter(|&l| mask >> l & 1 == 1).collect(),
            })
            .collect();
        out.sort_by(|a, b| (a.len(), &a.indices).cmp(&(b.len(), &b.indices)));
        out
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn wave_vectors(&self) -> Vec<f64> {
        self.indices
            .iter()
            .map(|&l| wave_vector(l, self.sites))
            .collect()
    }

    /// `-2t Σ cos k_m - mu N`.
    pub fn energy(&self, t: f64, mu: f64) -> f64 {
        -2.0 * t * self.wave_vectors().iter().map(|k| k.cos()).sum::<f64>() - mu * self.len() as f64
    }

    /// Total crystal momentum `Σ k_m`.
    pub fn total_momentum(&self) -> f64 {
        self.wave_vectors().iter().sum()
    }
}

/// `|k⟩ = ∏_m c†_{k_m} |0⟩` with `c_k = L^{-1/2} Σ_j e^{ikj} c_j`.
pub fn momentum_eigenstate(sites: usize, tuple: &MomentumTuple) -> Result<StateVector> {
    if tuple.sites != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            found: tuple.sites,
        });
    }
    // creators carry the conjugate Fourier kernel
    let orbitals = fourier_map(sites)?.matrix().map(|z| z.conj());
    slater_state(&orbitals, tuple.indices(), Lattice::spinless(sites))
}

/// Mode image of the cyclic translation `j -> j + 1 mod L`.
pub fn translation_image(lattice: &Lattice) -> Vec<usize> {
    let l = lattice.sites;
    match lattice.layout {
        crate::fock::Layout::Spinless => (0..l).map(|j| (j + 1) % l).collect(),
        crate::fock::Layout::Spinful => (0..2 * l).map(|b| 2 * ((b / 2 + 1) % l) + b % 2).collect(),
    }
}

/// `T v` with `T c†_j T† = c†_{j+1}`.
pub fn translate(v: &StateVector) -> Result<StateVector> {
    permute_state(v, &translation_image(v.lattice()))
}

/// `x + √(1 + x²)`.
pub fn alpha_plus(x: f64) -> f64 {
    x + x.hypot(1.0)
}

/// `x - √(1 + x²)`, evaluated without cancellation for large `x`.
pub fn alpha_minus(x: f64) -> f64 {
    -1.0 / alpha_plus(x)
}

/// Closed-form ground state of the open Hubbard dimer in the half-filled,
/// `S^z = 0` sector: `-G₀|0⟩` normalized, with
/// `G₀ = c†_{0↑}c†_{0↓} + c†_{1↑}c†_{1↓} + α₊ (c†_{0↑}c†_{1↓} - c†_{0↓}c†_{1↑})`
/// and `α₊ = α₊(U/4t)`.
///
/// The returned energy is the Rayleigh quotient of the realized Hamiltonian.
pub fn hubbard_dimer_ground_state(t: f64, u: f64) -> Result<(f64, StateVector)> {
    if !t.is_finite() || t <= 0.0 || !u.is_finite() || u < 0.0 {
        return domain(format!(
            "Hubbard dimer needs t > 0 and U >= 0, got t = {t}, U = {u}"
        ));
    }
    let alpha = alpha_plus(u / (4.0 * t));
    let pair = |a: ModeIndex, b: ModeIndex| OperatorExpr::create(a) * OperatorExpr::create(b);
    let (u0, d0, u1, d1) = (
        ModeIndex::up(0),
        ModeIndex::down(0),
        ModeIndex::up(1),
        ModeIndex::down(1),
    );
    let g0 = pair(u0, d0) + pair(u1, d1) + alpha * (pair(u0, d1) - pair(d0, u1));

    let lattice = Lattice::spinful(2);
    let sector = Arc::new(build_basis(
        lattice,
        Some(SectorLabel::SpinResolved { up: 1, down: 1 }),
    )?);
    let state = StateVector::vacuum(lattice)?
        .apply(&(-1.0 * g0))?
        .restrict(sector.clone())?
        .normalized()?;

    let h = build_hamiltonian(&ModelSpec::hubbard_dimer(t, u))?.realize(&sector)?;
    let energy = state.amplitudes().dotc(&(h * state.amplitudes())).re;
    Ok((energy, state))
}

/// Particle-hole conjugation of a spin-1/2 product-basis index vector.
pub fn particle_hole_image(lattice: &Lattice, s: FockState) -> FockState {
    let bits = (0..lattice.sites)
        .map(|j| {
            let local = LocalState::from_index(lattice.local_index(s, j)).particle_hole();
            lattice.local_bits(j, local.index())
        })
        .fold(0, |acc, b| acc | b);
    FockState(bits)
}
