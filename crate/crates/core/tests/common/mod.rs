#![allow(dead_code)]

use fermient_core::fock::{build_basis, Lattice, ModeIndex, OperatorExpr, StateVector};
use fermient_core::C64;
use nalgebra::DMatrix;
use rand::Rng;

/// Unitary from the QR factorization of a matrix with uniform complex entries.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> DMatrix<C64> {
    let m = DMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let qr = m.qr();
    let (q, r) = (qr.q(), qr.r());
    // fix column phases so the result does not depend on the QR sign convention
    let phases = DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            let d = r[(i, i)];
            if d.norm() > 0.0 {
                d / d.norm()
            } else {
                C64::new(1.0, 0.0)
            }
        } else {
            C64::new(0.0, 0.0)
        }
    });
    q * phases
}

/// Annihilators of every flat mode on the full Fock space, as dense matrices.
pub fn annihilators(lattice: Lattice) -> Vec<DMatrix<C64>> {
    let basis = build_basis(lattice, None).unwrap();
    (0..lattice.modes())
        .map(|f| {
            let mode = ModeIndex::from_flat(f, lattice.layout);
            OperatorExpr::annihilate(mode).realize(&basis).unwrap()
        })
        .collect()
}

pub fn max_dev(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Largest deviation from `{a_i, a_j} = 0` and `{a_i, a_j†} = δ_ij` over all pairs.
pub fn car_deviation(ops: &[DMatrix<C64>]) -> f64 {
    let dim = ops[0].nrows();
    let id = DMatrix::<C64>::identity(dim, dim);
    let zero = DMatrix::<C64>::zeros(dim, dim);
    let mut worst: f64 = 0.0;
    for (i, a) in ops.iter().enumerate() {
        for (j, b) in ops.iter().enumerate() {
            worst = worst.max(max_dev(&(a * b + b * a), &zero));
            let bd = b.adjoint();
            let target = if i == j { &id } else { &zero };
            worst = worst.max(max_dev(&(a * &bd + &bd * a), target));
        }
    }
    worst
}

/// Single-site reduced density matrix from the full projector `|ψ⟩⟨ψ|`,
/// tracing out every other site index by index.
pub fn oracle_site_rho(v: &StateVector, site: usize) -> DMatrix<C64> {
    let lattice = *v.lattice();
    let full = v.to_full().unwrap();
    let psi = full.amplitudes();
    let d = lattice.local_dim();
    let width = lattice.modes_per_site();
    let shift = width * site;
    let local = |i: usize| (i >> shift) & (d - 1);
    let env = |i: usize| i & !((d - 1) << shift);
    let mut rho = DMatrix::<C64>::zeros(d, d);
    for i in 0..psi.len() {
        for k in 0..psi.len() {
            if env(i) == env(k) {
                let phase = lattice.local_phase(local(i)) * lattice.local_phase(local(k));
                rho[(local(i), local(k))] += psi[i] * psi[k].conj() * phase;
            }
        }
    }
    rho
}
