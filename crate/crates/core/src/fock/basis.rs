use super::{FockState, Lattice, SectorLabel};
use crate::error::{domain, Error, Result};

/// Hard cap on the number of modes.
pub const MAX_MODES: usize = 24;

/// Above this many modes a sector restriction is required.
pub const MAX_UNRESTRICTED_MODES: usize = 16;

/// An ordered list of Fock basis states, optionally restricted to one sector.
///
/// States are kept in ascending bit-set order. For the unrestricted basis the
/// position of a state equals its bit pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Basis {
    lattice: Lattice,
    sector: Option<SectorLabel>,
    states: Vec<FockState>,
}

impl Basis {
    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn modes(&self) -> usize {
        self.lattice.modes()
    }

    pub fn sector(&self) -> Option<SectorLabel> {
        self.sector
    }

    pub fn states(&self) -> &[FockState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.sector.is_none()
    }

    pub fn index_of(&self, state: FockState) -> Option<usize> {
        if self.sector.is_none() {
            let i = state.0 as usize;
            (i < self.states.len()).then_some(i)
        } else {
            self.states.binary_search(&state).ok()
        }
    }
}

/// Enumerate the basis of `lattice`, optionally restricted to `sector`.
pub fn build_basis(lattice: Lattice, sector: Option<SectorLabel>) -> Result<Basis> {
    let modes = lattice.modes();
    if modes == 0 {
        return domain("a Fock basis needs at least one mode");
    }
    if modes > MAX_MODES {
        return Err(Error::Resource(format!(
            "{modes} modes exceeds the cap of {MAX_MODES}"
        )));
    }
    let states = match sector {
        None => {
            if modes > MAX_UNRESTRICTED_MODES {
                return Err(Error::Resource(format!(
                    "{modes} modes without a sector restriction exceeds the cap of {MAX_UNRESTRICTED_MODES}"
                )));
            }
            (0..1u32 << modes).map(FockState).collect()
        }
        Some(label) => {
            label.validate(&lattice)?;
            let family = label.family();
            (0..1u32 << modes)
                .map(FockState)
                .filter(|s| s.sector(&lattice, family) == label)
                .collect()
        }
    };
    Ok(Basis {
        lattice,
        sector,
        states,
    })
}
