//! Occupation-number (Fock) bases for spinless and spin-1/2 lattice fermions.
//!
//! A basis state is a bit-set over the flat mode index: bit `b` is set iff mode
//! `b` is occupied. For spin-1/2 lattices the layout is site-major, so site `j`
//! owns the contiguous bit pair `(2j, 2j + 1)` for `(up, down)`.
//!
//! Sign convention: the basis state with occupied modes `b_1 < b_2 < ... < b_N`
//! is `c†_{b_1} c†_{b_2} ... c†_{b_N} |0⟩`, i.e. creators are applied to the
//! vacuum in descending flat-index order. Under this convention a ladder
//! operator on mode `b` picks up `(-1)^(occupied modes below b)`.

mod basis;
mod operator;
mod state;

use std::fmt;

pub use basis::{build_basis, Basis, MAX_MODES, MAX_UNRESTRICTED_MODES};
pub use operator::{number_operator, realize_matrix, site_projectors, Ladder, OperatorExpr, Term};
pub use state::{sector_split, StateVector};

/// Spin label of a mode. `None` is used for spinless lattices.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Spin {
    None,
    Up,
    Down,
}

impl Spin {
    pub fn flipped(self) -> Spin {
        match self {
            Spin::None => Spin::None,
            Spin::Up => Spin::Down,
            Spin::Down => Spin::Up,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    Spinless,
    Spinful,
}

/// A lattice of `sites` sites, each carrying one (spinless) or two (spinful)
/// fermionic modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Lattice {
    pub sites: usize,
    pub layout: Layout,
}

impl Lattice {
    pub fn spinless(sites: usize) -> Self {
        Lattice {
            sites,
            layout: Layout::Spinless,
        }
    }

    pub fn spinful(sites: usize) -> Self {
        Lattice {
            sites,
            layout: Layout::Spinful,
        }
    }

    pub fn modes(&self) -> usize {
        match self.layout {
            Layout::Spinless => self.sites,
            Layout::Spinful => 2 * self.sites,
        }
    }

    pub fn is_spinful(&self) -> bool {
        self.layout == Layout::Spinful
    }

    /// Dimension of a single site's local space: 2 or 4.
    pub fn local_dim(&self) -> usize {
        match self.layout {
            Layout::Spinless => 2,
            Layout::Spinful => 4,
        }
    }

    pub fn modes_per_site(&self) -> usize {
        match self.layout {
            Layout::Spinless => 1,
            Layout::Spinful => 2,
        }
    }

    /// Bit mask covering the modes of `site`.
    pub fn site_mask(&self, site: usize) -> u32 {
        let width = self.modes_per_site();
        ((1u32 << width) - 1) << (width * site)
    }

    /// Local basis index of `site` in `state`.
    ///
    /// Spinful sites use the order `{|0⟩, |↑⟩, |↓⟩, |↑↓⟩}`, which coincides with
    /// reading the `(up, down)` bit pair as a little-endian number.
    pub fn local_index(&self, state: FockState, site: usize) -> usize {
        let width = self.modes_per_site();
        ((state.0 >> (width * site)) & ((1 << width) - 1)) as usize
    }

    /// Bits that put `site` in local basis state `local`.
    pub fn local_bits(&self, site: usize, local: usize) -> u32 {
        (local as u32) << (self.modes_per_site() * site)
    }

    /// Phase of the local basis vector relative to the canonical basis state
    /// carrying the same bits.
    ///
    /// The doubly occupied local state is `|↑↓⟩ := c†_↓ c†_↑ |0⟩`, which is
    /// `-c†_↑ c†_↓ |0⟩`, so it carries `-1`. All other local states carry `+1`.
    pub fn local_phase(&self, local: usize) -> f64 {
        if self.is_spinful() && local == 3 {
            -1.0
        } else {
            1.0
        }
    }

    pub fn mode(&self, site: usize, spin: Spin) -> ModeIndex {
        ModeIndex { site, spin }
    }
}

/// A single-particle mode, identified by its site and spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub site: usize,
    pub spin: Spin,
}

impl ModeIndex {
    pub fn spinless(site: usize) -> Self {
        ModeIndex {
            site,
            spin: Spin::None,
        }
    }

    pub fn up(site: usize) -> Self {
        ModeIndex {
            site,
            spin: Spin::Up,
        }
    }

    pub fn down(site: usize) -> Self {
        ModeIndex {
            site,
            spin: Spin::Down,
        }
    }

    /// Flat bit index: `site` when spinless, `2 site + {0 up, 1 down}` otherwise.
    pub fn flat(&self) -> usize {
        match self.spin {
            Spin::None => self.site,
            Spin::Up => 2 * self.site,
            Spin::Down => 2 * self.site + 1,
        }
    }

    pub fn from_flat(flat: usize, layout: Layout) -> Self {
        match layout {
            Layout::Spinless => ModeIndex::spinless(flat),
            Layout::Spinful if flat.is_multiple_of(2) => ModeIndex::up(flat / 2),
            Layout::Spinful => ModeIndex::down(flat / 2),
        }
    }
}

/// Occupation bit-set of a Fock basis state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct FockState(pub u32);

impl FockState {
    pub const VACUUM: FockState = FockState(0);

    pub fn from_modes(modes: &[usize]) -> Self {
        FockState(modes.iter().fold(0u32, |acc, &b| acc | (1 << b)))
    }

    pub fn bits(&self) -> u32 {
        self.0
    }

    pub fn is_occupied(&self, mode: usize) -> bool {
        self.0 >> mode & 1 == 1
    }

    pub fn particle_number(&self) -> usize {
        self.0.count_ones() as usize
    }

    /// Occupied flat mode indices in ascending order.
    pub fn occupied(&self) -> impl Iterator<Item = usize> + '_ {
        (0..32).filter(move |&b| self.is_occupied(b))
    }

    /// Parity of the occupied modes strictly below `mode`.
    pub fn sign_below(&self, mode: usize) -> f64 {
        let below = self.0 & ((1u32 << mode) - 1);
        if below.count_ones().is_multiple_of(2) {
            1.0
        } else {
            -1.0
        }
    }

    /// Sector label of this state within `family`.
    pub fn sector(&self, lattice: &Lattice, family: SectorFamily) -> SectorLabel {
        match family {
            SectorFamily::TotalN => SectorLabel::TotalN(self.particle_number()),
            SectorFamily::SpinResolved => {
                let up = (0..lattice.sites)
                    .filter(|&j| self.is_occupied(2 * j))
                    .count();
                let down = (0..lattice.sites)
                    .filter(|&j| self.is_occupied(2 * j + 1))
                    .count();
                SectorLabel::SpinResolved { up, down }
            }
            SectorFamily::EksTriple => {
                let (mut single_up, mut single_down, mut double) = (0, 0, 0);
                for site in 0..lattice.sites {
                    match lattice.local_index(*self, site) {
                        1 => single_up += 1,
                        2 => single_down += 1,
                        3 => double += 1,
                        _ => {}
                    }
                }
                SectorLabel::EksTriple {
                    single_up,
                    single_down,
                    double,
                }
            }
        }
    }
}

impl fmt::Display for FockState {
    /// Bits printed mode 0 first, e.g. `|1⟩` for a single particle in mode 0
    /// and `|01⟩` for one in mode 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = (32 - self.0.leading_zeros()).max(1) as usize;
        let bits: String = (0..width)
            .map(|b| if self.is_occupied(b) { '1' } else { '0' })
            .collect();
        write!(f, "|{bits}⟩")
    }
}

/// Apply `c†_mode` (`dagger = true`) or `c_mode` to a basis state.
///
/// Returns `None` when the result vanishes (creation on an occupied mode or
/// annihilation on an empty one); otherwise the sign and the new state.
pub fn apply_operator(mode: ModeIndex, dagger: bool, state: FockState) -> Option<(f64, FockState)> {
    apply_ladder(mode.flat(), dagger, state)
}

#[inline]
pub(crate) fn apply_ladder(
    flat: usize,
    dagger: bool,
    state: FockState,
) -> Option<(f64, FockState)> {
    if state.is_occupied(flat) == dagger {
        return None;
    }
    Some((state.sign_below(flat), FockState(state.0 ^ (1 << flat))))
}

/// Relabel modes `b -> image[b]` on a basis state, returning the fermionic sign.
///
/// The result is `∏_{b occupied, ascending} c†_{image[b]} |0⟩` re-expressed in
/// the canonical basis; the sign is the parity of the permutation that sorts
/// the images.
pub fn permute_modes(state: FockState, image: &[usize]) -> (f64, FockState) {
    let targets: Vec<usize> = state.occupied().map(|b| image[b]).collect();
    let mut inversions = 0usize;
    for i in 0..targets.len() {
        for j in i + 1..targets.len() {
            if targets[i] > targets[j] {
                inversions += 1;
            }
        }
    }
    let sign = if inversions.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    };
    (sign, FockState::from_modes(&targets))
}

/// Conserved-quantity label of a symmetry sector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SectorLabel {
    TotalN(usize),
    SpinResolved {
        up: usize,
        down: usize,
    },
    EksTriple {
        single_up: usize,
        single_down: usize,
        double: usize,
    },
}

impl SectorLabel {
    pub fn family(&self) -> SectorFamily {
        match self {
            SectorLabel::TotalN(_) => SectorFamily::TotalN,
            SectorLabel::SpinResolved { .. } => SectorFamily::SpinResolved,
            SectorLabel::EksTriple { .. } => SectorFamily::EksTriple,
        }
    }

    pub fn particle_number(&self) -> usize {
        match *self {
            SectorLabel::TotalN(n) => n,
            SectorLabel::SpinResolved { up, down } => up + down,
            SectorLabel::EksTriple {
                single_up,
                single_down,
                double,
            } => single_up + single_down + 2 * double,
        }
    }

    /// Check that the label can occur on `lattice`.
    pub fn validate(&self, lattice: &Lattice) -> crate::Result<()> {
        let l = lattice.sites;
        match *self {
            SectorLabel::TotalN(n) if n > lattice.modes() => {
                crate::error::domain(format!("sector {self} exceeds {} modes", lattice.modes()))
            }
            SectorLabel::TotalN(_) => Ok(()),
            _ if !lattice.is_spinful() => {
                crate::error::domain(format!("sector {self} requires a spin-1/2 lattice"))
            }
            SectorLabel::SpinResolved { up, down } if up > l || down > l => {
                crate::error::domain(format!("sector {self} exceeds {l} sites"))
            }
            SectorLabel::EksTriple {
                single_up,
                single_down,
                double,
            } if single_up + single_down + double > l => {
                crate::error::domain(format!("sector {self} exceeds {l} sites"))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for SectorLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SectorLabel::TotalN(n) => write!(f, "N={n}"),
            SectorLabel::SpinResolved { up, down } => write!(f, "Nup={up};Ndn={down}"),
            SectorLabel::EksTriple {
                single_up,
                single_down,
                double,
            } => {
                write!(f, "Nup={single_up};Ndn={single_down};Nd={double}")
            }
        }
    }
}

impl std::str::FromStr for SectorLabel {
    type Err = crate::Error;

    /// Parses the `Display` form: `N=2`, `Nup=1;Ndn=1` or `Nup=1;Ndn=0;Nd=1`.
    fn from_str(text: &str) -> crate::Result<Self> {
        let mut fields = Vec::new();
        for part in text.split(';') {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| crate::Error::Domain(format!("malformed sector label `{text}`")))?;
            let value: usize = value
                .trim()
                .parse()
                .map_err(|_| crate::Error::Domain(format!("malformed sector label `{text}`")))?;
            fields.push((key.trim(), value));
        }
        match fields.as_slice() {
            [("N", n)] => Ok(SectorLabel::TotalN(*n)),
            [("Nup", up), ("Ndn", down)] => Ok(SectorLabel::SpinResolved {
                up: *up,
                down: *down,
            }),
            [("Nup", u), ("Ndn", d), ("Nd", dd)] => Ok(SectorLabel::EksTriple {
                single_up: *u,
                single_down: *d,
                double: *dd,
            }),
            _ => Err(crate::Error::Domain(format!(
                "malformed sector label `{text}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SectorFamily {
    TotalN,
    SpinResolved,
    EksTriple,
}

impl SectorFamily {
    /// All labels of the family that occur on `lattice`, in ascending order.
    pub fn labels(&self, lattice: &Lattice) -> Vec<SectorLabel> {
        let l = lattice.sites;
        match self {
            SectorFamily::TotalN => (0..=lattice.modes()).map(SectorLabel::TotalN).collect(),
            SectorFamily::SpinResolved => (0..=l)
                .flat_map(|up| (0..=l).map(move |down| SectorLabel::SpinResolved { up, down }))
                .collect(),
            SectorFamily::EksTriple => {
                let mut out = Vec::new();
                for single_up in 0..=l {
                    for single_down in 0..=l - single_up {
                        for double in 0..=l - single_up - single_down {
                            out.push(SectorLabel::EksTriple {
                                single_up,
                                single_down,
                                double,
                            });
                        }
                    }
                }
                out
            }
        }
    }
}
