use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use super::{apply_ladder, Basis, FockState, Layout, ModeIndex, Spin};
use crate::error::{domain, Result};

/// A single creation (`dagger`) or annihilation operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Ladder {
    pub mode: ModeIndex,
    pub dagger: bool,
}

impl Ladder {
    pub fn create(mode: ModeIndex) -> Self {
        Ladder { mode, dagger: true }
    }

    pub fn annihilate(mode: ModeIndex) -> Self {
        Ladder {
            mode,
            dagger: false,
        }
    }

    pub fn adjoint(self) -> Self {
        Ladder {
            dagger: !self.dagger,
            ..self
        }
    }
}

/// `coeff * factors[0] * factors[1] * ...`; the rightmost factor acts first.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coeff: C64,
    pub factors: Vec<Ladder>,
}

/// A finite sum of monomials in ladder operators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct OperatorExpr {
    terms: Vec<Term>,
}

impl OperatorExpr {
    pub fn zero() -> Self {
        OperatorExpr { terms: Vec::new() }
    }

    pub fn identity() -> Self {
        Self::scalar(C64::new(1.0, 0.0))
    }

    pub fn scalar(coeff: C64) -> Self {
        OperatorExpr {
            terms: vec![Term {
                coeff,
                factors: Vec::new(),
            }],
        }
    }

    pub fn monomial(coeff: C64, factors: Vec<Ladder>) -> Self {
        OperatorExpr {
            terms: vec![Term { coeff, factors }],
        }
    }

    pub fn create(mode: ModeIndex) -> Self {
        Self::monomial(C64::new(1.0, 0.0), vec![Ladder::create(mode)])
    }

    pub fn annihilate(mode: ModeIndex) -> Self {
        Self::monomial(C64::new(1.0, 0.0), vec![Ladder::annihilate(mode)])
    }

    /// `n = c† c` on one mode.
    pub fn number(mode: ModeIndex) -> Self {
        Self::monomial(
            C64::new(1.0, 0.0),
            vec![Ladder::create(mode), Ladder::annihilate(mode)],
        )
    }

    /// `c†_to c_from`.
    pub fn hop(to: ModeIndex, from: ModeIndex) -> Self {
        Self::monomial(
            C64::new(1.0, 0.0),
            vec![Ladder::create(to), Ladder::annihilate(from)],
        )
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn adjoint(&self) -> Self {
        OperatorExpr {
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coeff: t.coeff.conj(),
                    factors: t.factors.iter().rev().map(|f| f.adjoint()).collect(),
                })
                .collect(),
        }
    }

    pub fn scale(mut self, c: C64) -> Self {
        for t in &mut self.terms {
            t.coeff *= c;
        }
        self
    }

    pub fn commutator(a: &Self, b: &Self) -> Self {
        a.clone() * b.clone() - b.clone() * a.clone()
    }

    pub fn anticommutator(a: &Self, b: &Self) -> Self {
        a.clone() * b.clone() + b.clone() * a.clone()
    }

    /// Apply one monomial to a basis state; `None` if it annihilates it.
    pub fn apply_term(term: &Term, state: FockState) -> Option<(C64, FockState)> {
        let mut sign = 1.0;
        let mut current = state;
        for ladder in term.factors.iter().rev() {
            let (s, next) = apply_ladder(ladder.mode.flat(), ladder.dagger, current)?;
            sign *= s;
            current = next;
        }
        Some((term.coeff * sign, current))
    }

    fn check_modes(&self, basis: &Basis) -> Result<()> {
        let layout = basis.lattice().layout;
        for ladder in self.terms.iter().flat_map(|t| t.factors.iter()) {
            let spin_ok = match layout {
                Layout::Spinless => ladder.mode.spin == Spin::None,
                Layout::Spinful => ladder.mode.spin != Spin::None,
            };
            if !spin_ok {
                return domain(format!(
                    "mode {:?} does not match a {layout:?} lattice",
                    ladder.mode
                ));
            }
            if ladder.mode.flat() >= basis.modes() {
                return domain(format!(
                    "mode {:?} out of range for {} modes",
                    ladder.mode,
                    basis.modes()
                ));
            }
        }
        Ok(())
    }

    /// Dense matrix of the operator on `basis`, projected onto the span of the basis.
    pub fn realize(&self, basis: &Basis) -> Result<DMatrix<C64>> {
        self.check_modes(basis)?;
        let n = basis.len();
        let mut m = DMatrix::<C64>::zeros(n, n);
        for (col, &state) in basis.states().iter().enumerate() {
            for term in &self.terms {
                if let Some((amp, out)) = Self::apply_term(term, state) {
                    if let Some(row) = basis.index_of(out) {
                        m[(row, col)] += amp;
                    }
                }
            }
        }
        Ok(m)
    }
}

/// Matrix element `(r, c)` is `⟨basis[r]| expr |basis[c]⟩`.
pub fn realize_matrix(expr: &OperatorExpr, basis: &Basis) -> Result<DMatrix<C64>> {
    expr.realize(basis)
}

/// `Σ_b n_b` over a contiguous range of flat mode indices.
pub fn number_operator(layout: Layout, flat: std::ops::Range<usize>) -> OperatorExpr {
    flat.map(|b| OperatorExpr::number(ModeIndex::from_flat(b, layout)))
        .fold(OperatorExpr::zero(), |acc, n| acc + n)
}

/// Local projectors of a spin-1/2 site onto `{|0⟩, |↑⟩, |↓⟩, |↑↓⟩}`.
pub fn site_projectors(site: usize) -> [OperatorExpr; 4] {
    let one = OperatorExpr::identity;
    let up = OperatorExpr::number(ModeIndex::up(site));
    let down = OperatorExpr::number(ModeIndex::down(site));
    [
        (one() - up.clone()) * (one() - down.clone()),
        up.clone() * (one() - down.clone()),
        down.clone() * (one() - up.clone()),
        up * down,
    ]
}

impl Add for OperatorExpr {
    type Output = OperatorExpr;
    fn add(mut self, rhs: OperatorExpr) -> OperatorExpr {
        self.terms.extend(rhs.terms);
        self
    }
}

impl AddAssign for OperatorExpr {
    fn add_assign(&mut self, rhs: OperatorExpr) {
        self.terms.extend(rhs.terms);
    }
}

impl Sub for OperatorExpr {
    type Output = OperatorExpr;
    fn sub(self, rhs: OperatorExpr) -> OperatorExpr {
        self + (-rhs)
    }
}

impl Neg for OperatorExpr {
    type Output = OperatorExpr;
    fn neg(self) -> OperatorExpr {
        self.scale(C64::new(-1.0, 0.0))
    }
}

impl Mul for OperatorExpr {
    type Output = OperatorExpr;
    fn mul(self, rhs: OperatorExpr) -> OperatorExpr {
        let mut terms = Vec::with_capacity(self.terms.len() * rhs.terms.len());
        for a in &self.terms {
            for b in &rhs.terms {
                let mut factors = a.factors.clone();
                factors.extend_from_slice(&b.factors);
                terms.push(Term {
                    coeff: a.coeff * b.coeff,
                    factors,
                });
            }
        }
        OperatorExpr { terms }
    }
}

impl Mul<OperatorExpr> for C64 {
    type Output = OperatorExpr;
    fn mul(self, rhs: OperatorExpr) -> OperatorExpr {
        rhs.scale(self)
    }
}

impl Mul<OperatorExpr> for f64 {
    type Output = OperatorExpr;
    fn mul(self, rhs: OperatorExpr) -> OperatorExpr {
        rhs.scale(C64::new(self, 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::{build_basis, Lattice, SectorLabel};

    fn max_abs(m: &DMatrix<C64>) -> f64 {
        m.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn number_on_single_mode() {
        let basis = build_basis(Lattice::spinless(1), None).unwrap();
        let m = OperatorExpr::number(ModeIndex::spinless(0))
            .realize(&basis)
            .unwrap();
        assert_eq!(
            m,
            DMatrix::from_diagonal(&nalgebra::dvector![C64::new(0.0, 0.0), C64::new(1.0, 0.0)])
        );
    }

    #[test]
    fn hopping_in_one_particle_sector() {
        let (a, b) = (ModeIndex::spinless(0), ModeIndex::spinless(1));
        let h = OperatorExpr::hop(a, b) + OperatorExpr::hop(b, a);
        let sector = build_basis(Lattice::spinless(2), Some(SectorLabel::TotalN(1))).unwrap();
        let m = h.realize(&sector).unwrap();
        // c†_0 c_1 |bit1> : c_1 on 0b10 has no modes below occupied -> +, then c†_0 on vacuum -> +
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        assert_eq!(m, DMatrix::from_row_slice(2, 2, &[zero, one, one, zero]));

        // same block inside the full 4x4 realization
        let full = build_basis(Lattice::spinless(2), None).unwrap();
        let mf = h.realize(&full).unwrap();
        assert_eq!(mf[(1, 2)], one);
        assert_eq!(mf[(2, 1)], one);
        assert_eq!(mf[(0, 0)], zero);
        assert_eq!(mf[(3, 3)], zero);
    }

    #[test]
    fn creators_anticommute_as_vectors() {
        let basis = build_basis(Lattice::spinless(2), None).unwrap();
        let c0 = OperatorExpr::create(ModeIndex::spinless(0));
        let c1 = OperatorExpr::create(ModeIndex::spinless(1));
        let a = (c1.clone() * c0.clone())
            .realize(&basis)
            .unwrap()
            .column(0)
            .into_owned();
        let b = (c0 * c1).realize(&basis).unwrap().column(0).into_owned();
        assert!((a + b).norm() < 1e-15);
    }

    #[test]
    fn number_commutator_with_creator() {
        // [N, c†_i] = c†_i
        let basis = build_basis(Lattice::spinless(3), None).unwrap();
        let n = number_operator(Layout::Spinless, 0..3);
        for i in 0..3 {
            let ci = OperatorExpr::create(ModeIndex::spinless(i));
            let lhs = OperatorExpr::commutator(&n, &ci).realize(&basis).unwrap();
            let rhs = ci.realize(&basis).unwrap();
            assert!(max_abs(&(lhs - rhs)) < 1e-14);
        }
    }

    #[test]
    fn total_number_counts_particles() {
        let basis = build_basis(Lattice::spinless(4), None).unwrap();
        let m = number_operator(Layout::Spinless, 0..4)
            .realize(&basis)
            .unwrap();
        for (i, s) in basis.states().iter().enumerate() {
            assert_eq!(m[(i, i)].re, s.particle_number() as f64);
        }
        assert!(max_abs(&(m.clone() - DMatrix::from_diagonal(&m.diagonal()))) == 0.0);
    }

    #[test]
    fn spinful_projectors() {
        let lattice = Lattice::spinful(2);
        let basis = build_basis(lattice, None).unwrap();
        let projectors = site_projectors(1);
        let mut sum = DMatrix::<C64>::zeros(16, 16);
        for (local, p) in projectors.iter().enumerate() {
            let m = p.realize(&basis).unwrap();
            for (i, s) in basis.states().iter().enumerate() {
                let expected = if lattice.local_index(*s, 1) == local {
                    1.0
                } else {
                    0.0
                };
                assert_eq!(m[(i, i)], C64::new(expected, 0.0));
            }
            sum += m;
        }
        assert!(max_abs(&(sum - DMatrix::identity(16, 16))) < 1e-15);
    }

    #[test]
    fn realize_rejects_foreign_modes() {
        let basis = build_basis(Lattice::spinless(2), None).unwrap();
        assert!(OperatorExpr::number(ModeIndex::spinless(2))
            .realize(&basis)
            .is_err());
        assert!(OperatorExpr::number(ModeIndex::up(0))
            .realize(&basis)
            .is_err());
    }

    #[test]
    fn adjoint_reverses_factors() {
        let basis = build_basis(Lattice::spinless(3), None).unwrap();
        let e = OperatorExpr::hop(ModeIndex::spinless(2), ModeIndex::spinless(0))
            .scale(C64::new(0.3, -0.7))
            * OperatorExpr::number(ModeIndex::spinless(1));
        let m = e.realize(&basis).unwrap();
        let ma = e.adjoint().realize(&basis).unwrap();
        assert!(max_abs(&(m.adjoint() - ma)) < 1e-15);
    }
}
