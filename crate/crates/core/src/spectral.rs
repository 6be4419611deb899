//! Sector-resolved exact diagonalization and thermal ensemble sums.
//!
//! The thermal local entanglement is
//!
//! ```text
//! S_{1/β} = 1/(Z L) Σ_m exp(-β(ε_m - μ N_m)) Σ_j S(ρ_j^m),   Z = Σ_m exp(-β(ε_m - μ N_m))
//! ```
//!
//! where `μ` here is a grand-canonical weight applied to a Hamiltonian built
//! without a chemical potential. A Hamiltonian that already contains `-μN`
//! must be paired with `ThermalParams::mu == 0`.

use std::collections::BTreeMap;
use std::sync::Arc;

use rayon::prelude::*;

use crate::entanglement::{lattice_average_entropy, DecompositionTag, EntropyKind};
use crate::error::{domain, Error, Result};
use crate::fock::{build_basis, Lattice, SectorLabel, StateVector};
use crate::linalg::hermitian_eigh;
use crate::models::{
    build_hamiltonian, momentum_eigenstate, Boundary, ModelKind, ModelSpec, MomentumTuple,
};
use crate::transform::{transform_state, FockUnitary};

/// Eigenvalues closer than this inside one sector count as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SpectralEntry {
    pub sector: SectorLabel,
    pub energy: f64,
    pub particle_number: usize,
    pub vector: StateVector,
    /// Set when the entry is an analytic plane-wave state; the occupied
    /// momenta then label it uniquely.
    pub momenta: Option<MomentumTuple>,
}

/// A numerically degenerate eigenspace inside one sector.
#[derive(Debug, Clone, PartialEq)]
pub struct DegenerateCluster {
    pub sector: SectorLabel,
    pub energy: f64,
    /// Indices into [`SpectralDecomposition::entries`].
    pub entries: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    lattice: Lattice,
    entries: Vec<SpectralEntry>,
    degeneracies: Vec<DegenerateCluster>,
    hamiltonian_mu: f64,
}

impl SpectralDecomposition {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn entries(&self) -> &[SpectralEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Unresolved in-sector degeneracies.
    pub fn degeneracies(&self) -> &[DegenerateCluster] {
        &self.degeneracies
    }

    /// Chemical potential already contained in the Hamiltonian.
    pub fn hamiltonian_mu(&self) -> f64 {
        self.hamiltonian_mu
    }

    pub fn ground_energy(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.energy)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn sector(&self, label: SectorLabel) -> impl Iterator<Item = &SpectralEntry> {
        self.entries.iter().filter(move |e| e.sector == label)
    }
}

/// Diagonalize every sector of the model's conserved-quantity family.
///
/// Periodic free chains use the analytic momentum eigenbasis; everything else
/// goes through a dense Hermitian solver per sector.
pub fn diagonalize(spec: &ModelSpec) -> Result<SpectralDecomposition> {
    spec.validate()?;
    let lattice = spec.lattice();
    let labels = spec.sector_family().labels(&lattice);
    let per_sector: Vec<SectorSpectrum> = labels
        .par_iter()
        .map(|&label| diagonalize_sector(spec, label))
        .collect::<Result<_>>()?;

    let mut entries = Vec::new();
    let mut degeneracies = Vec::new();
    for (sector_entries, clusters) in per_sector {
        let offset = entries.len();
        for (energy, local) in clusters {
            degeneracies.push(DegenerateCluster {
                sector: sector_entries[local[0]].sector,
                energy,
                entries: local.iter().map(|i| i + offset).collect(),
            });
        }
        entries.extend(sector_entries);
    }
    Ok(SpectralDecomposition {
        lattice,
        entries,
        degeneracies,
        hamiltonian_mu: spec.mu,
    })
}

/// Eigen-entries of one sector, ascending in energy, with the degenerate
/// clusters found among them as (energy, indices into the entries).
pub type SectorSpectrum = (Vec<SpectralEntry>, Vec<(f64, Vec<usize>)>);

/// Spectrum of the block of `spec` with quantum numbers `label`.
pub fn diagonalize_sector(spec: &ModelSpec, label: SectorLabel) -> Result<SectorSpectrum> {
    spec.validate()?;
    let lattice = spec.lattice();
    let basis = Arc::new(build_basis(lattice, Some(label))?);
    if basis.is_empty() {
        return Ok((Vec::new(), Vec::new()));
    }

    if spec.kind == ModelKind::FreeChain && spec.boundary == Boundary::Periodic {
        let n = label.particle_number();
        let mut entries = MomentumTuple::all(spec.sites)
            .into_iter()
            .filter(|t| t.len() == n)
            .map(|tuple| {
                let vector = momentum_eigenstate(spec.sites, &tuple)?.restrict(basis.clone())?;
                Ok(SpectralEntry {
                    sector: label,
                    energy: tuple.energy(spec.t, spec.mu),
                    particle_number: n,
                    vector,
                    momenta: Some(tuple),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        entries.sort_by(|a, b| a.energy.total_cmp(&b.energy));
        return Ok((entries, Vec::new()));
    }

    let h = build_hamiltonian(spec)?.realize(&basis)?;
    let (values, vectors) = hermitian_eigh(&h);
    let entries = values
        .iter()
        .enumerate()
        .map(|(i, &energy)| {
            Ok(SpectralEntry {
                sector: label,
                energy,
                particle_number: label.particle_number(),
                vector: StateVector::new(basis.clone(), vectors.column(i).into_owned())?,
                momenta: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > DEGENERACY_TOL {
            if i - start > 1 {
                clusters.push((values[start], (start..i).collect()));
            }
            start = i;
        }
    }
    Ok((entries, clusters))
}

/// Inverse temperature and grand-canonical chemical potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermalParams {
    /// `f64::INFINITY` selects the ground-state limit.
    pub beta: f64,
    pub mu: f64,
}

impl ThermalParams {
    pub fn new(beta: f64, mu: f64) -> Result<Self> {
        if beta.is_nan() || beta < 0.0 {
            return domain(format!("inverse temperature must be >= 0, got {beta}"));
        }
        if !mu.is_finite() {
            return domain(format!("chemical potential must be finite, got {mu}"));
        }
        Ok(ThermalParams { beta, mu })
    }

    pub fn ground_state(mu: f64) -> Self {
        ThermalParams {
            beta: f64::INFINITY,
            mu,
        }
    }

    pub fn is_ground_state(&self) -> bool {
        self.beta == f64::INFINITY
    }
}

fn check_mu(decomp: &SpectralDecomposition, params: &ThermalParams) -> Result<()> {
    if params.mu != 0.0 && decomp.hamiltonian_mu != 0.0 {
        return domain("chemical potential given twice: the Hamiltonian already contains -mu N");
    }
    Ok(())
}

fn exponents(decomp: &SpectralDecomposition, params: &ThermalParams) -> Vec<f64> {
    decomp
        .entries
        .iter()
        .map(|e| -params.beta * (e.energy - params.mu * e.particle_number as f64))
        .collect()
}

/// `ln Z`, computed with a max shift so large `β` cannot overflow.
pub fn ln_partition_function(
    decomp: &SpectralDecomposition,
    params: &ThermalParams,
) -> Result<f64> {
    check_mu(decomp, params)?;
    if params.is_ground_state() {
        return domain("the partition function diverges or vanishes at infinite beta");
    }
    let x = exponents(decomp, params);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln())
}

/// `Z = Σ_m exp(-β(ε_m - μ N_m))`.
pub fn partition_function(decomp: &SpectralDecomposition, params: &ThermalParams) -> Result<f64> {
    ln_partition_function(decomp, params).map(f64::exp)
}

/// Normalized Boltzmann weights of all entries, in entry order.
///
/// At infinite `β` every entry whose effective energy `ε - μN` is minimal
/// (within [`DEGENERACY_TOL`]) gets equal weight.
pub fn boltzmann_weights(
    decomp: &SpectralDecomposition,
    params: &ThermalParams,
) -> Result<Vec<f64>> {
    check_mu(decomp, params)?;
    if decomp.entries.is_empty() {
        return domain("empty spectrum");
    }
    if params.is_ground_state() {
        let eff: Vec<f64> = decomp
            .entries
            .iter()
            .map(|e| e.energy - params.mu * e.particle_number as f64)
            .collect();
        let min = eff.iter().copied().fold(f64::INFINITY, f64::min);
        let ground: Vec<bool> = eff.iter().map(|&e| e - min <= DEGENERACY_TOL).collect();
        let count = ground.iter().filter(|&&g| g).count() as f64;
        return Ok(ground
            .into_iter()
            .map(|g| if g { 1.0 / count } else { 0.0 })
            .collect());
    }
    let x = exponents(decomp, params);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = x.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / total).collect())
}

/// Thermal average of a per-entry observable.
pub fn thermal_average(
    decomp: &SpectralDecomposition,
    params: &ThermalParams,
    observable: impl Fn(&SpectralEntry) -> f64 + Sync,
) -> Result<f64> {
    let weights = boltzmann_weights(decomp, params)?;
    let values: Vec<f64> = decomp
        .entries
        .par_iter()
        .zip(weights.par_iter())
        .map(|(e, &w)| if w > 0.0 { w * observable(e) } else { 0.0 })
        .collect();
    Ok(values.iter().sum())
}

/// Boltzmann-weighted, lattice-averaged single-site entropy over eigenstates.
///
/// With `decomposition`, every eigenvector is first re-expressed in the
/// occupation representation of the transformed modes. Refuses with
/// [`Error::Degenerate`] if a contributing eigenspace is degenerate inside
/// its sector.
pub fn thermal_local_entanglement(
    decomp: &SpectralDecomposition,
    params: &ThermalParams,
    kind: EntropyKind,
    decomposition: Option<&FockUnitary>,
) -> Result<f64> {
    let weights = boltzmann_weights(decomp, params)?;
    for cluster in &decomp.degeneracies {
        if cluster.entries.iter().any(|&i| weights[i] > 0.0) {
            return Err(Error::Degenerate {
                sector: cluster.sector,
                energy: cluster.energy,
                multiplicity: cluster.entries.len(),
            });
        }
    }
    if let Some(w) = decomposition {
        if w.lattice() != decomp.lattice() {
            return domain("decomposition unitary acts on a different lattice");
        }
    }
    let tag = match decomposition {
        Some(_) => DecompositionTag::Custom("transformed".into()),
        None => DecompositionTag::Real,
    };
    let terms: Vec<f64> = decomp
        .entries
        .par_iter()
        .zip(weights.par_iter())
        .map(|(entry, &w)| {
            if w == 0.0 {
                return Ok(0.0);
            }
            let s = match decomposition {
                Some(u) => {
                    lattice_average_entropy(&transform_state(u, &entry.vector)?, kind, &tag)?
                }
                None => lattice_average_entropy(&entry.vector, kind, &tag)?,
            };
            Ok(w * s)
        })
        .collect::<Result<_>>()?;
    Ok(terms.iter().sum())
}

/// `ln Z_N(β) = ln Σ_{m: N_m = N} exp(-β ε_m)` for every particle number present.
pub fn ln_canonical_partition_functions(
    decomp: &SpectralDecomposition,
    beta: f64,
) -> BTreeMap<usize, f64> {
    let mut by_n: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for e in &decomp.entries {
        by_n.entry(e.particle_number)
            .or_default()
            .push(-beta * e.energy);
    }
    by_n.into_iter()
        .map(|(n, x)| {
            let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            (n, max + x.iter().map(|v| (v - max).exp()).sum::<f64>().ln())
        })
        .collect()
}
