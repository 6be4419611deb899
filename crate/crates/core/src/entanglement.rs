//! Single-site reduced density matrices and entanglement entropies.
//!
//! Reductions are taken in the occupation-number tensor structure: the
//! amplitude of a basis state is grouped by the local index of the traced-out
//! site and the bit pattern of the remaining modes. Spinful sites use the local
//! basis `{|0⟩, |↑⟩, |↓⟩, |↑↓⟩}` with `|↑↓⟩ := c†_↓ c†_↑ |0⟩`.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fock::{build_basis, Lattice, SectorLabel, StateVector};
use crate::linalg::{hermitian_eigh, hermiticity_defect};
use crate::models::{alpha_plus, build_hamiltonian, translate, ModelSpec};
use crate::transform::{fourier_map, transform_state, FockUnitary, ModeMap};

const RHO_TOL: f64 = 1e-10;
const NORM_TOL: f64 = 1e-8;
const EIGENSTATE_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EntropyKind {
    /// `-Tr ρ ln ρ`, natural log.
    VonNeumann,
    /// `1 - Tr ρ²`, unnormalized.
    Linear,
}

/// Which mode decomposition a reduced density matrix refers to.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum DecompositionTag {
    /// The real-space lattice.
    Real,
    /// Fourier (momentum) modes.
    Reciprocal,
    /// Any other mode map, by name.
    Custom(String),
}

impl fmt::Display for DecompositionTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DecompositionTag::Real => f.write_str("real"),
            DecompositionTag::Reciprocal => f.write_str("reciprocal"),
            DecompositionTag::Custom(name) => write!(f, "custom:{name}"),
        }
    }
}

/// A validated single-site density matrix (2×2 spinless, 4×4 spinful).
#[derive(Debug, Clone, PartialEq)]
pub struct LocalDensityMatrix {
    rho: DMatrix<C64>,
    site: usize,
    decomposition: DecompositionTag,
}

impl LocalDensityMatrix {
    /// Checks Hermiticity, unit trace and positivity to 1e-10.
    pub fn new(rho: DMatrix<C64>, site: usize, decomposition: DecompositionTag) -> Result<Self> {
        let d = rho.nrows();
        if !rho.is_square() || !(d == 2 || d == 4) {
            return domain(format!(
                "local density matrix must be 2x2 or 4x4, got {d}x{}",
                rho.ncols()
            ));
        }
        let herm = hermiticity_defect(&rho);
        if herm.is_nan() || herm >= RHO_TOL {
            return domain(format!("density matrix not Hermitian (defect {herm:e})"));
        }
        let trace = rho.trace();
        let trace_error = (trace - C64::new(1.0, 0.0)).norm();
        if trace_error.is_nan() || trace_error >= RHO_TOL {
            return domain(format!("density matrix trace {trace} differs from 1"));
        }
        let min = hermitian_eigh(&rho).0[0];
        if min < -RHO_TOL {
            return domain(format!("density matrix has negative eigenvalue {min:e}"));
        }
        Ok(LocalDensityMatrix {
            rho,
            site,
            decomposition,
        })
    }

    pub fn rho(&self) -> &DMatrix<C64> {
        &self.rho
    }

    pub fn site(&self) -> usize {
        self.site
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    pub fn decomposition(&self) -> &DecompositionTag {
        &self.decomposition
    }

    pub fn with_decomposition(mut self, tag: DecompositionTag) -> Self {
        self.decomposition = tag;
        self
    }

    /// Eigenvalues, ascending, clamped at zero.
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigh(&self.rho)
            .0
            .into_iter()
            .map(|l| l.max(0.0))
            .collect()
    }

    pub fn diagonal(&self) -> Vec<f64> {
        self.rho.diagonal().iter().map(|z| z.re).collect()
    }
}

fn check_normalized(v: &StateVector) -> Result<()> {
    let n = v.norm();
    if !n.is_finite() || (n - 1.0).abs() > NORM_TOL {
        return domain(format!("state is not normalized (norm {n})"));
    }
    Ok(())
}

/// Reduced density matrix of one site by explicit partial trace.
pub fn partial_trace_site(v: &StateVector, site: usize) -> Result<LocalDensityMatrix> {
    check_normalized(v)?;
    let lattice = *v.lattice();
    if site >= lattice.sites {
        return domain(format!(
            "site {site} out of range for {} sites",
            lattice.sites
        ));
    }
    let d = lattice.local_dim();
    let mask = lattice.site_mask(site);
    // ordered so the accumulation order, and hence rounding, is reproducible
    let mut groups: BTreeMap<u32, [C64; 4]> = BTreeMap::new();
    for (s, a) in v.iter() {
        if a.norm_sqr() == 0.0 {
            continue;
        }
        let local = lattice.local_index(s, site);
        let env = s.0 & !mask;
        groups.entry(env).or_insert([C64::new(0.0, 0.0); 4])[local] +=
            a * lattice.local_phase(local);
    }
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for psi in groups.values() {
        for a in 0..d {
            for b in 0..d {
                rho[(a, b)] += psi[a] * psi[b].conj();
            }
        }
    }
    LocalDensityMatrix::new(rho, site, DecompositionTag::Real)
}

/// Diagonal reduction `diag(1 - ⟨n_i⟩, ⟨n_i⟩)` for particle-number eigenstates
/// of a spinless lattice.
pub fn local_rho_number_eigenstate(v: &StateVector, site: usize) -> Result<LocalDensityMatrix> {
    check_normalized(v)?;
    let lattice = *v.lattice();
    if lattice.is_spinful() {
        return domain("the two-level occupation formula applies to spinless lattices");
    }
    if site >= lattice.sites {
        return domain(format!(
            "site {site} out of range for {} sites",
            lattice.sites
        ));
    }
    let (_, var) = v.count_moments(u32::MAX);
    if var > EIGENSTATE_TOL {
        return domain(format!(
            "state is not a particle-number eigenstate (variance {var:e})"
        ));
    }
    let (n, _) = v.count_moments(1 << site);
    let rho = DMatrix::from_diagonal(&nalgebra::dvector![
        C64::new(1.0 - n, 0.0),
        C64::new(n, 0.0)
    ]);
    LocalDensityMatrix::new(rho, site, DecompositionTag::Real)
}

/// Site-independent diagonal reduction of a translation-invariant,
/// `S^z`- and `N`-eigenstate on a spin-1/2 lattice:
/// `diag(L - N↑ - N↓ - N_d, N↑, N↓, N_d) / L`, where `N_σ` counts singly
/// occupied sites with spin `σ` and `N_d` doubly occupied ones.
pub fn local_rho_spinful_symmetric(v: &StateVector) -> Result<LocalDensityMatrix> {
    check_normalized(v)?;
    let lattice = *v.lattice();
    if !lattice.is_spinful() {
        return domain("the four-level formula applies to spin-1/2 lattices");
    }
    let (_, var_n) = v.count_moments(u32::MAX);
    if var_n > EIGENSTATE_TOL {
        return domain(format!(
            "state is not a particle-number eigenstate (variance {var_n:e})"
        ));
    }
    let up_mask = (0..lattice.sites).fold(0u32, |m, j| m | 1 << (2 * j));
    let (mut m1, mut m2) = (0.0, 0.0);
    for (s, a) in v.iter() {
        let sz = (s.0 & up_mask).count_ones() as f64 - (s.0 & !up_mask).count_ones() as f64;
        m1 += a.norm_sqr() * sz;
        m2 += a.norm_sqr() * sz * sz;
    }
    if m2 - m1 * m1 > EIGENSTATE_TOL {
        return domain(format!(
            "state is not an S^z eigenstate (variance {:e})",
            m2 - m1 * m1
        ));
    }
    let tv = translate(v)?;
    let phase = v.inner(&tv);
    let defect = (tv.amplitudes() - v.amplitudes() * phase).norm();
    if defect > NORM_TOL {
        return domain(format!(
            "state is not translation invariant (defect {defect:e})"
        ));
    }

    let mut counts = [0.0f64; 4];
    for (s, a) in v.iter() {
        let p = a.norm_sqr();
        for j in 0..lattice.sites {
            counts[lattice.local_index(s, j)] += p;
        }
    }
    // counts[0] equals L - N↑ - N↓ - N_d for a normalized state
    let l = lattice.sites as f64;
    let rho = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        4,
        counts.iter().map(|&x| C64::new(x / l, 0.0)),
    ));
    LocalDensityMatrix::new(rho, 0, DecompositionTag::Real)
}

pub fn entropy(rho: &LocalDensityMatrix, kind: EntropyKind) -> f64 {
    match kind {
        EntropyKind::VonNeumann => rho
            .eigenvalues()
            .into_iter()
            .filter(|&l| l > 0.0)
            .map(|l| -l * l.ln())
            .sum::<f64>()
            .max(0.0),
        EntropyKind::Linear => {
            let purity: f64 = rho.rho().iter().map(|z| z.norm_sqr()).sum();
            (1.0 - purity).max(0.0)
        }
    }
}

/// `S(n) = -n ln n - (1-n) ln(1-n)` with `0 ln 0 = 0`.
pub fn shannon_filling(n: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&n) {
        return domain(format!("filling fraction must lie in [0, 1], got {n}"));
    }
    let h = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    Ok(h(n) + h(1.0 - n))
}

/// `(1/L) Σ_j S(ρ_j)`.
pub fn lattice_average_entropy(
    v: &StateVector,
    kind: EntropyKind,
    tag: &DecompositionTag,
) -> Result<f64> {
    let sites = v.lattice().sites;
    let mut total = 0.0;
    for j in 0..sites {
        let rho = partial_trace_site(v, j)?.with_decomposition(tag.clone());
        total += entropy(&rho, kind);
    }
    Ok(total / sites as f64)
}

/// Mode decomposition used for the Hubbard-dimer curves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DimerDecomposition {
    Real,
    Reciprocal,
}

/// Fourier re-partition of a spin-1/2 lattice (same map for both spins).
pub fn reciprocal_decomposition(lattice: Lattice) -> Result<FockUnitary> {
    let map = fourier_map(lattice.sites)?;
    let map = if lattice.is_spinful() {
        ModeMap::spinful(&map)
    } else {
        map
    };
    FockUnitary::decomposition(&map, lattice)
}

/// Default `U/4t` grid: 201 points on `[0, 10]`.
pub fn default_dimer_grid() -> Vec<f64> {
    linear_grid(0.0, 10.0, 201)
}

pub fn linear_grid(min: f64, max: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![min],
        _ => (0..points)
            .map(|i| min + (max - min) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}

/// Ground state of the open Hubbard dimer in the half-filled `S^z = 0` sector,
/// from dense diagonalization.
pub fn dimer_ground_vector(t: f64, u: f64) -> Result<(f64, StateVector)> {
    let spec = ModelSpec::hubbard_dimer(t, u);
    let label = SectorLabel::SpinResolved { up: 1, down: 1 };
    let basis = std::sync::Arc::new(build_basis(spec.lattice(), Some(label))?);
    let h = build_hamiltonian(&spec)?.realize(&basis)?;
    let (values, vectors) = hermitian_eigh(&h);
    if values[1] - values[0] <= crate::spectral::DEGENERACY_TOL {
        return Err(Error::Degenerate {
            sector: label,
            energy: values[0],
            multiplicity: 2,
        });
    }
    Ok((
        values[0],
        StateVector::new(basis, vectors.column(0).into_owned())?,
    ))
}

/// Ground-state local entanglement of the Hubbard dimer along a `U/4t` grid,
/// computed from dense eigenvectors.
pub fn dimer_curve(
    t: f64,
    grid: &[f64],
    decomposition: DimerDecomposition,
    kind: EntropyKind,
) -> Result<Vec<(f64, f64)>> {
    if !t.is_finite() || t <= 0.0 {
        return domain(format!("hopping must be positive, got {t}"));
    }
    if let Some(&x) = grid.iter().find(|x| !x.is_finite() || **x < 0.0) {
        return domain(format!("U/4t grid values must be finite and >= 0, got {x}"));
    }
    let lattice = Lattice::spinful(2);
    let (w, tag) = match decomposition {
        DimerDecomposition::Real => (None, DecompositionTag::Real),
        DimerDecomposition::Reciprocal => (
            Some(reciprocal_decomposition(lattice)?),
            DecompositionTag::Reciprocal,
        ),
    };
    grid.par_iter()
        .map(|&x| {
            let (_, v) = dimer_ground_vector(t, 4.0 * t * x)?;
            let v = match &w {
                Some(w) => transform_state(w, &v)?,
                None => v,
            };
            Ok((x, lattice_average_entropy(&v, kind, &tag)?))
        })
        .collect()
}

/// Closed-form real-lattice linear entropy `1 - (α⁴+1) / (2(α²+1)²)`.
pub fn dimer_linear_entropy_real(x: f64) -> f64 {
    let a2 = alpha_plus(x).powi(2);
    1.0 - (a2 * a2 + 1.0) / (2.0 * (a2 + 1.0).powi(2))
}

/// Closed-form reciprocal-lattice linear entropy `1 - (a⁴+b⁴)/(a²+b²)²`,
/// `a = 1 + α`, `b = 1 - α`.
pub fn dimer_linear_entropy_reciprocal(x: f64) -> f64 {
    let alpha = alpha_plus(x);
    let (a2, b2) = ((1.0 + alpha).powi(2), (1.0 - alpha).powi(2));
    1.0 - (a2 * a2 + b2 * b2) / (a2 + b2).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{FockState, SectorFamily};
    use crate::models::{hubbard_dimer_ground_state, momentum_eigenstate, MomentumTuple};
    use crate::transform::permute_state;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::LN_2;
    use std::sync::Arc;

    fn diag(values: &[f64]) -> DMatrix<C64> {
        DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            values.len(),
            values.iter().map(|&x| C64::new(x, 0.0)),
        ))
    }

    /// Independent reduction: build |ψ⟩⟨ψ| over the full space and sum out
    /// every mode outside `site` index by index.
    fn oracle_rho(v: &StateVector, site: usize) -> DMatrix<C64> {
        let lattice = *v.lattice();
        let full = v.to_full().unwrap();
        let psi = full.amplitudes();
        let dim = psi.len();
        let d = lattice.local_dim();
        let width = lattice.modes_per_site();
        let local = |i: usize| (i >> (width * site)) & (d - 1);
        let env = |i: usize| i & !((d - 1) << (width * site));
        let phase = |l: usize| lattice.local_phase(l);
        let mut rho = DMatrix::<C64>::zeros(d, d);
        for i in 0..dim {
            for k in 0..dim {
                if env(i) == env(k) {
                    rho[(local(i), local(k))] +=
                        psi[i] * psi[k].conj() * phase(local(i)) * phase(local(k));
                }
            }
        }
        rho
    }

    fn random_sector_state(
        rng: &mut ChaCha8Rng,
        lattice: Lattice,
        label: SectorLabel,
    ) -> StateVector {
        let basis = Arc::new(build_basis(lattice, Some(label)).unwrap());
        let amps = nalgebra::DVector::from_fn(basis.len(), |_, _| {
            C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
        });
        StateVector::new(basis, amps).unwrap().normalized().unwrap()
    }

    #[test]
    fn product_state_is_pure() {
        let basis = Arc::new(build_basis(Lattice::spinless(3), None).unwrap());
        let v = StateVector::basis_state(basis, FockState(0b001)).unwrap();
        let rho = partial_trace_site(&v, 0).unwrap();
        assert_eq!(rho.rho(), &diag(&[0.0, 1.0]));
        assert!(entropy(&rho, EntropyKind::VonNeumann).abs() < 1e-15);
    }

    #[test]
    fn one_particle_entangled_state() {
        let basis = Arc::new(build_basis(Lattice::spinless(2), None).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = nalgebra::DVector::zeros(4);
        amps[0b01] = C64::new(h, 0.0);
        amps[0b10] = C64::new(h, 0.0);
        let v = StateVector::new(basis, amps).unwrap();
        let rho = partial_trace_site(&v, 0).unwrap();
        assert!((rho.rho() - diag(&[0.5, 0.5])).norm() < 1e-15);
        assert!((entropy(&rho, EntropyKind::VonNeumann) - LN_2).abs() < 1e-15);
    }

    #[test]
    fn unnormalized_input_rejected() {
        let basis = Arc::new(build_basis(Lattice::spinless(2), None).unwrap());
        let v = StateVector::new(
            basis,
            nalgebra::DVector::from_element(4, C64::new(1.0, 0.0)),
        )
        .unwrap();
        assert!(partial_trace_site(&v, 0).is_err());
        let v = v.normalized().unwrap();
        assert!(partial_trace_site(&v, 2).is_err());
    }

    #[test]
    fn dimer_ground_state_site_reduction() {
        for x in [0.0, 0.75, 3.0] {
            let (_, v) = hubbard_dimer_ground_state(1.0, 4.0 * x).unwrap();
            let a2 = alpha_plus(x).powi(2);
            let expected = diag(&[1.0, a2, a2, 1.0]).unscale(2.0 + 2.0 * a2);
            for site in 0..2 {
                let rho = partial_trace_site(&v, site).unwrap();
                assert!((rho.rho() - &expected).norm() < 1e-12);
                assert!(
                    (entropy(&rho, EntropyKind::Linear) - dimer_linear_entropy_real(x)).abs()
                        < 1e-12
                );
            }
            let fast = local_rho_spinful_symmetric(&v).unwrap();
            assert!((fast.rho() - &expected).norm() < 1e-12);
        }
    }

    #[test]
    fn momentum_states_have_uniform_filling() {
        let l = 5;
        for tuple in MomentumTuple::all(l) {
            let v = momentum_eigenstate(l, &tuple).unwrap();
            let n = tuple.len() as f64 / l as f64;
            for j in 0..l {
                let rho = local_rho_number_eigenstate(&v, j).unwrap();
                assert!((rho.diagonal()[1] - n).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn vacuum_reduction() {
        let v = StateVector::vacuum(Lattice::spinless(3)).unwrap();
        let rho = local_rho_number_eigenstate(&v, 1).unwrap();
        assert_eq!(rho.diagonal(), vec![1.0, 0.0]);
    }

    #[test]
    fn fast_path_needs_number_eigenstate() {
        let basis = Arc::new(build_basis(Lattice::spinless(2), None).unwrap());
        let mut amps = nalgebra::DVector::zeros(4);
        amps[0b00] = C64::new(0.6, 0.0);
        amps[0b01] = C64::new(0.8, 0.0);
        let v = StateVector::new(basis, amps).unwrap();
        assert!(local_rho_number_eigenstate(&v, 0).is_err());
        // the brute-force reduction keeps the coherence
        let rho = partial_trace_site(&v, 0).unwrap();
        assert!((rho.rho()[(0, 1)].re - 0.48).abs() < 1e-15);
    }

    #[test]
    fn random_number_eigenstates_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let l = rng.gen_range(1..=6);
            let n = rng.gen_range(0..=l);
            let v = random_sector_state(&mut rng, Lattice::spinless(l), SectorLabel::TotalN(n));
            for j in 0..l {
                let brute = partial_trace_site(&v, j).unwrap();
                let fast = local_rho_number_eigenstate(&v, j).unwrap();
                let oracle = oracle_rho(&v, j);
                assert!((brute.rho() - &oracle).norm() < 1e-12);
                assert!((fast.rho() - &oracle).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn random_spinful_states_match_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let lattice = Lattice::spinful(3);
        for label in SectorFamily::SpinResolved.labels(&lattice) {
            let v = random_sector_state(&mut rng, lattice, label);
            for j in 0..3 {
                let brute = partial_trace_site(&v, j).unwrap();
                assert!((brute.rho() - oracle_rho(&v, j)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn site_reduction_insensitive_to_mode_reordering() {
        // moving site j to position 0 by a signed mode permutation leaves
        // ρ_j unchanged for number eigenstates
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let l = 5;
        for j in 0..l {
            let v = random_sector_state(&mut rng, Lattice::spinless(l), SectorLabel::TotalN(2));
            let image: Vec<usize> = (0..l).map(|b| (b + l - j) % l).collect();
            let moved = permute_state(&v, &image).unwrap();
            let a = partial_trace_site(&v, j).unwrap();
            let b = partial_trace_site(&moved, 0).unwrap();
            assert!((a.rho() - b.rho()).norm() < 1e-12);
        }
    }

    #[test]
    fn spinful_fast_path_preconditions() {
        let lattice = Lattice::spinful(2);
        let basis = Arc::new(build_basis(lattice, None).unwrap());
        // |↑, 0⟩ breaks translation invariance
        let v = StateVector::basis_state(basis.clone(), FockState(0b0001)).unwrap();
        assert!(local_rho_spinful_symmetric(&v).is_err());
        // fully filled dimer
        let v = StateVector::basis_state(basis, FockState(0b1111)).unwrap();
        let rho = local_rho_spinful_symmetric(&v).unwrap();
        assert_eq!(rho.diagonal(), vec![0.0, 0.0, 0.0, 1.0]);
        assert_eq!(entropy(&rho, EntropyKind::VonNeumann), 0.0);
    }

    #[test]
    fn eks_singlet_pair() {
        // (|↑,↓⟩ - |↓,↑⟩)/√2 in the product basis
        let lattice = Lattice::spinful(2);
        let basis = Arc::new(build_basis(lattice, None).unwrap());
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = nalgebra::DVector::zeros(16);
        amps[0b1001] = C64::new(h, 0.0);
        amps[0b0110] = C64::new(-h, 0.0);
        let v = StateVector::new(basis, amps).unwrap();
        let rho = local_rho_spinful_symmetric(&v).unwrap();
        assert!(rho
            .diagonal()
            .iter()
            .zip([0.0, 0.5, 0.5, 0.0])
            .all(|(a, b)| (a - b).abs() < 1e-15));
        assert!((entropy(&rho, EntropyKind::VonNeumann) - LN_2).abs() < 1e-15);
        assert!((partial_trace_site(&v, 1).unwrap().rho() - rho.rho()).norm() < 1e-15);
    }

    #[test]
    fn entropy_values() {
        let half = LocalDensityMatrix::new(diag(&[0.5, 0.5]), 0, DecompositionTag::Real).unwrap();
        assert!((entropy(&half, EntropyKind::VonNeumann) - LN_2).abs() < 1e-15);
        assert!((entropy(&half, EntropyKind::Linear) - 0.5).abs() < 1e-15);

        let dimer = |alpha: f64| {
            let a2 = alpha * alpha;
            let m = diag(&[1.0, a2, a2, 1.0]).unscale(2.0 + 2.0 * a2);
            LocalDensityMatrix::new(m, 0, DecompositionTag::Real).unwrap()
        };
        assert!((entropy(&dimer(1.0), EntropyKind::Linear) - 0.75).abs() < 1e-15);
        assert!((entropy(&dimer(1e6), EntropyKind::Linear) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn invalid_density_matrices_rejected() {
        assert!(LocalDensityMatrix::new(diag(&[0.5, 0.6]), 0, DecompositionTag::Real).is_err());
        assert!(LocalDensityMatrix::new(diag(&[1.5, -0.5]), 0, DecompositionTag::Real).is_err());
        assert!(
            LocalDensityMatrix::new(diag(&[0.5, 0.25, 0.25]), 0, DecompositionTag::Real).is_err()
        );
        let mut m = diag(&[0.5, 0.5]);
        m[(0, 1)] = C64::new(0.1, 0.0);
        assert!(LocalDensityMatrix::new(m, 0, DecompositionTag::Real).is_err());
    }

    #[test]
    fn shannon_values() {
        assert_eq!(shannon_filling(0.0).unwrap(), 0.0);
        assert_eq!(shannon_filling(1.0).unwrap(), 0.0);
        assert!((shannon_filling(0.5).unwrap() - LN_2).abs() < 1e-15);
        assert!((shannon_filling(0.25).unwrap() - shannon_filling(0.75).unwrap()).abs() < 1e-15);
        assert!(shannon_filling(1.1).is_err());
        assert!(shannon_filling(-0.1).is_err());
    }

    #[test]
    fn shannon_is_two_level_entropy() {
        for n in linear_grid(0.0, 1.0, 101) {
            let rho =
                LocalDensityMatrix::new(diag(&[1.0 - n, n]), 0, DecompositionTag::Real).unwrap();
            assert!(
                (entropy(&rho, EntropyKind::VonNeumann) - shannon_filling(n).unwrap()).abs()
                    < 1e-12
            );
        }
    }

    #[test]
    fn dimer_curve_endpoints() {
        let grid = [0.0, 25.0];
        let real = dimer_curve(1.0, &grid, DimerDecomposition::Real, EntropyKind::Linear).unwrap();
        let recip = dimer_curve(
            1.0,
            &grid,
            DimerDecomposition::Reciprocal,
            EntropyKind::Linear,
        )
        .unwrap();
        assert!((real[0].1 - 0.75).abs() < 1e-12);
        assert!(recip[0].1.abs() < 1e-12);
        assert!((real[1].1 - 0.5).abs() < 1e-3);
        assert!((recip[1].1 - 0.5).abs() < 1e-3);
    }

    #[test]
    fn dimer_curve_matches_closed_forms() {
        let grid = linear_grid(0.0, 4.0, 17);
        let real = dimer_curve(0.7, &grid, DimerDecomposition::Real, EntropyKind::Linear).unwrap();
        let recip = dimer_curve(
            0.7,
            &grid,
            DimerDecomposition::Reciprocal,
            EntropyKind::Linear,
        )
        .unwrap();
        for ((x, sr), (_, sk)) in real.iter().zip(&recip) {
            assert!((sr - dimer_linear_entropy_real(*x)).abs() < 1e-10);
            assert!((sk - dimer_linear_entropy_reciprocal(*x)).abs() < 1e-10);
        }
    }

    #[test]
    fn dimer_curve_rejects_bad_input() {
        assert!(dimer_curve(0.0, &[0.0], DimerDecomposition::Real, EntropyKind::Linear).is_err());
        assert!(dimer_curve(1.0, &[-1.0], DimerDecomposition::Real, EntropyKind::Linear).is_err());
    }

    proptest! {
        #[test]
        fn entropy_invariant_under_local_relabeling(
            weights in proptest::collection::vec(0.01f64..1.0, 4),
            perm_seed in 0usize..24,
        ) {
            let total: f64 = weights.iter().sum();
            let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
            let mut order = [0, 1, 2, 3];
            let mut k = perm_seed;
            for i in (1..4).rev() {
                order.swap(i, k % (i + 1));
                k /= i + 1;
            }
            let permuted: Vec<f64> = order.iter().map(|&i| p[i]).collect();
            let a = LocalDensityMatrix::new(diag(&p), 0, DecompositionTag::Real).unwrap();
            let b = LocalDensityMatrix::new(diag(&permuted), 0, DecompositionTag::Reciprocal).unwrap();
            for kind in [EntropyKind::VonNeumann, EntropyKind::Linear] {
                let (sa, sb) = (entropy(&a, kind), entropy(&b, kind));
                prop_assert!((sa - sb).abs() < 1e-12);
                prop_assert!(sa >= 0.0);
            }
            prop_assert!(entropy(&a, EntropyKind::VonNeumann) <= 4f64.ln() + 1e-12);
            prop_assert!(entropy(&a, EntropyKind::Linear) <= 0.75 + 1e-12);
        }
    }
}
