//! Number-conserving Bogoliubov re-partitions of the mode space.
//!
//! A [`ModeMap`] `U` defines new annihilators `c̃_i = Σ_j U_ij c_j`, hence
//! creators `c̃†_i = Σ_j conj(U_ij) c†_j`. The induced Fock-space unitary `W`
//! sends every canonical basis state `c†_{b_1} ... c†_{b_N} |0⟩` to
//! `c̃†_{b_1} ... c̃†_{b_N} |0⟩`, which gives `W c_i W† = Σ_j U_ij c_j` and
//! `⟨0|W|0⟩ = 1`. Its matrix elements are Slater determinants,
//! `⟨A|W|B⟩ = det(conj(U)[B, A])`.
//!
//! Because the relation is stated on annihilators, induction reverses
//! products: `W(U₁ U₂) = W(U₂) W(U₁)`.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use crate::error::{domain, Error, Result};
use crate::fock::{build_basis, FockState, Lattice, SectorLabel, StateVector};
use crate::linalg::{max_abs, unitarity_defect};

/// Largest mode count for which a dense Fock-space unitary is built.
pub const MAX_FOCK_UNITARY_MODES: usize = 12;

const UNITARITY_TOL: f64 = 1e-10;
const PRODUCT_TOL: f64 = 1e-8;

/// Single-particle unitary defining a re-partition of the modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeMap {
    matrix: DMatrix<C64>,
}

impl ModeMap {
    pub fn new(matrix: DMatrix<C64>) -> Result<Self> {
        if !matrix.is_square() || matrix.nrows() == 0 {
            return domain(format!(
                "mode map must be a non-empty square matrix, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            ));
        }
        let defect = unitarity_defect(&matrix);
        if defect.is_nan() || defect >= UNITARITY_TOL {
            return domain(format!("mode map is not unitary (defect {defect:e})"));
        }
        Ok(ModeMap { matrix })
    }

    pub fn identity(modes: usize) -> Self {
        ModeMap {
            matrix: DMatrix::identity(modes, modes),
        }
    }

    /// Relabelling with `c̃_i = c_{image[i]}`.
    pub fn permutation(image: &[usize]) -> Result<Self> {
        let n = image.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, &j) in image.iter().enumerate() {
            if j >= n {
                return domain(format!("permutation image {j} out of range"));
            }
            m[(i, j)] = C64::new(1.0, 0.0);
        }
        Self::new(m)
    }

    /// Lift a per-site map to a spin-1/2 lattice, acting identically on both spins.
    pub fn spinful(site_map: &ModeMap) -> Self {
        let l = site_map.modes();
        let mut m = DMatrix::zeros(2 * l, 2 * l);
        for i in 0..l {
            for j in 0..l {
                m[(2 * i, 2 * j)] = site_map.matrix[(i, j)];
                m[(2 * i + 1, 2 * j + 1)] = site_map.matrix[(i, j)];
            }
        }
        ModeMap { matrix: m }
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn modes(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        ModeMap {
            matrix: self.matrix.adjoint(),
        }
    }

    /// Matrix product `self · other`.
    pub fn then(&self, other: &ModeMap) -> Self {
        ModeMap {
            matrix: &self.matrix * &other.matrix,
        }
    }
}

/// Discrete Fourier map on `sites` sites.
///
/// Entry `(l, j)` is `exp(i k_l j) / √L` with `k_l = 2πl/L` and lattice labels
/// `j = 0, ..., L-1`. With this zero-based labelling the `L = 2` map sends
/// `c_0 ± c_1` to the `k = 0, π` modes without extra phases.
pub fn fourier_map(sites: usize) -> Result<ModeMap> {
    if sites == 0 {
        return domain("Fourier map needs at least one site");
    }
    let l = sites as f64;
    let norm = 1.0 / l.sqrt();
    let m = DMatrix::from_fn(sites, sites, |row, col| {
        C64::from_polar(norm, 2.0 * PI * (row * col) as f64 / l)
    });
    Ok(ModeMap { matrix: m })
}

/// Wave vector `2πl/L` of Fourier row `l`.
pub fn wave_vector(index: usize, sites: usize) -> f64 {
    2.0 * PI * index as f64 / sites as f64
}

/// A unitary on the full Fock space of a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FockUnitary {
    lattice: Lattice,
    matrix: DMatrix<C64>,
    source: Option<ModeMap>,
}

impl FockUnitary {
    pub fn new(lattice: Lattice, matrix: DMatrix<C64>) -> Result<Self> {
        let dim = 1usize << lattice.modes();
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: matrix.nrows(),
            });
        }
        let defect = unitarity_defect(&matrix);
        if defect.is_nan() || defect >= UNITARITY_TOL {
            return domain(format!("Fock operator is not unitary (defect {defect:e})"));
        }
        Ok(FockUnitary {
            lattice,
            matrix,
            source: None,
        })
    }

    pub fn identity(lattice: Lattice) -> Self {
        let dim = 1usize << lattice.modes();
        FockUnitary {
            lattice,
            matrix: DMatrix::identity(dim, dim),
            source: None,
        }
    }

    /// The unitary that re-expresses a state in the occupation-number
    /// representation of the modes `c̃ = U c`.
    ///
    /// Coordinates with respect to the basis `W(U)|A⟩` are `W(U)† v = W(U†) v`.
    pub fn decomposition(map: &ModeMap, lattice: Lattice) -> Result<Self> {
        let mut w = induce_fock_unitary(&map.adjoint(), lattice)?;
        w.source = Some(map.clone());
        Ok(w)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn source(&self) -> Option<&ModeMap> {
        self.source.as_ref()
    }

    pub fn adjoint(&self) -> Self {
        FockUnitary {
            lattice: self.lattice,
            matrix: self.matrix.adjoint(),
            source: None,
        }
    }
}

/// Build the Fock-space unitary induced by `map` on `lattice`.
pub fn induce_fock_unitary(map: &ModeMap, lattice: Lattice) -> Result<FockUnitary> {
    let modes = lattice.modes();
    if map.modes() != modes {
        return Err(Error::DimensionMismatch {
            expected: modes,
            found: map.modes(),
        });
    }
    if modes > MAX_FOCK_UNITARY_MODES {
        return Err(Error::Resource(format!(
            "dense Fock unitary on {modes} modes exceeds the cap of {MAX_FOCK_UNITARY_MODES}"
        )));
    }
    let defect = unitarity_defect(map.matrix());
    if defect.is_nan() || defect >= UNITARITY_TOL {
        return domain(format!("mode map is not unitary (defect {defect:e})"));
    }
    let conj = map.matrix().map(|z| z.conj());
    let dim = 1usize << modes;
    let mut w = DMatrix::<C64>::zeros(dim, dim);
    for n in 0..=modes {
        let sector = build_basis(lattice, Some(SectorLabel::TotalN(n)))?;
        let states = sector.states();
        let occupied: Vec<Vec<usize>> = states.iter().map(|s| s.occupied().collect()).collect();
        let columns: Vec<Vec<C64>> = occupied
            .par_iter()
            .map(|rows| {
                occupied
                    .iter()
                    .map(|cols| slater_overlap(&conj, rows, cols))
                    .collect()
            })
            .collect();
        for (c, column) in columns.into_iter().enumerate() {
            for (r, amp) in column.into_iter().enumerate() {
                w[(states[r].0 as usize, states[c].0 as usize)] = amp;
            }
        }
    }
    Ok(FockUnitary {
        lattice,
        matrix: w,
        source: Some(map.clone()),
    })
}

/// Amplitude of `∏_{r in rows} (Σ_j orbitals[r, j] c†_j) |0⟩` on the canonical
/// basis state occupying `cols`.
pub(crate) fn slater_overlap(orbitals: &DMatrix<C64>, rows: &[usize], cols: &[usize]) -> C64 {
    let n = rows.len();
    if n == 0 {
        return C64::new(1.0, 0.0);
    }
    DMatrix::from_fn(n, n, |i, j| orbitals[(rows[i], cols[j])]).determinant()
}

/// Normalized Slater determinant `∏_m (Σ_j orbitals[rows[m], j] c†_j) |0⟩`
/// on the `N = rows.len()` sector of `lattice`.
pub fn slater_state(
    orbitals: &DMatrix<C64>,
    rows: &[usize],
    lattice: Lattice,
) -> Result<StateVector> {
    let basis = Arc::new(build_basis(lattice, Some(SectorLabel::TotalN(rows.len())))?);
    let amplitudes = nalgebra::DVector::from_iterator(
        basis.len(),
        basis
            .states()
            .iter()
            .map(|s| slater_overlap(orbitals, rows, &s.occupied().collect::<Vec<_>>())),
    );
    StateVector::new(basis, amplitudes)
}

/// `W v`, returned on the unrestricted basis.
pub fn transform_state(w: &FockUnitary, v: &StateVector) -> Result<StateVector> {
    if v.lattice() != w.lattice() {
        let expected = 1usize << w.lattice().modes();
        return Err(Error::DimensionMismatch {
            expected,
            found: 1usize << v.lattice().modes(),
        });
    }
    let full = v.to_full()?;
    let out = w.matrix() * full.amplitudes();
    StateVector::new(full.basis().clone(), out)
}

/// Whether `w` factorizes as a tensor product over factors of `local_dims`.
///
/// Factor 0 is the least significant index (site 0 holds the lowest bits).
/// The test peels off one factor at a time by the best rank-one operator-Schmidt
/// approximation across the cut and requires the remainder to vanish to 1e-8.
pub fn is_product_unitary(w: &FockUnitary, local_dims: &[usize]) -> Result<bool> {
    is_product_operator(w.matrix(), local_dims)
}

pub fn is_product_operator(m: &DMatrix<C64>, local_dims: &[usize]) -> Result<bool> {
    let total: usize = local_dims.iter().product();
    if !m.is_square() || m.nrows() != total {
        return Err(Error::DimensionMismatch {
            expected: total,
            found: m.nrows(),
        });
    }
    let mut rest = m.clone();
    for &d in &local_dims[..local_dims.len().saturating_sub(1)] {
        let r = rest.nrows() / d;
        let at = |ir: usize, i0: usize, jr: usize, j0: usize| (ir * d + i0, jr * d + j0);
        // Gram matrix of the d² local "rows" of the reshaped operator.
        let mut gram = DMatrix::<C64>::zeros(d * d, d * d);
        for ir in 0..r {
            for jr in 0..r {
                let block: Vec<C64> = (0..d * d).map(|p| rest[at(ir, p / d, jr, p % d)]).collect();
                for p in 0..d * d {
                    for q in 0..d * d {
                        gram[(p, q)] += block[p] * block[q].conj();
                    }
                }
            }
        }
        let (_, vecs) = crate::linalg::hermitian_eigh(&gram);
        let top = vecs.column(d * d - 1);
        let local = DMatrix::from_fn(d, d, |i0, j0| top[i0 * d + j0]);
        let remainder = DMatrix::from_fn(r, r, |ir, jr| {
            let mut acc = C64::new(0.0, 0.0);
            for i0 in 0..d {
                for j0 in 0..d {
                    acc += local[(i0, j0)].conj() * rest[at(ir, i0, jr, j0)];
                }
            }
            acc
        });
        let residual = DMatrix::from_fn(r * d, r * d, |row, col| {
            rest[(row, col)] - local[(row % d, col % d)] * remainder[(row / d, col / d)]
        });
        if max_abs(&residual) >= PRODUCT_TOL {
            return Ok(false);
        }
        rest = remainder;
    }
    Ok(true)
}

/// Apply a mode relabelling to a state directly, without building `W`.
///
/// `image[b]` is the mode that `c†_b` is sent to.
pub fn permute_state(v: &StateVector, image: &[usize]) -> Result<StateVector> {
    if image.len() != v.lattice().modes() {
        return Err(Error::DimensionMismatch {
            expected: v.lattice().modes(),
            found: image.len(),
        });
    }
    let basis = v.basis().clone();
    let mut out = nalgebra::DVector::zeros(basis.len());
    for (s, a) in v.iter() {
        let (sign, t): (f64, FockState) = crate::fock::permute_modes(s, image);
        let Some(i) = basis.index_of(t) else {
            return domain("mode permutation leaves the basis sector");
        };
        out[i] += a * sign;
    }
    StateVector::new(basis, out)
}
