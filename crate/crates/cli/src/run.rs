use std::collections::HashMap;
use std::fs;
use std::path::Path;

use fermient_core::entanglement::{
    dimer_curve, entropy, linear_grid, partial_trace_site, reciprocal_decomposition,
    DecompositionTag, DimerDecomposition, EntropyKind,
};
use fermient_core::fock::{FockState, Lattice, ModeIndex, OperatorExpr, MAX_UNRESTRICTED_MODES};
use fermient_core::models::{ModelKind, ModelSpec};
use fermient_core::spectral::{
    diagonalize, thermal_average, thermal_local_entanglement, SpectralDecomposition, ThermalParams,
    DEGENERACY_TOL,
};
use fermient_core::transform::{transform_state, FockUnitary, ModeMap};
use fermient_core::{Error as CoreError, C64};
use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::config::{DecompositionChoice, EntropyChoice, Scenario, ScenarioConfig};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

/// Tabular result of a scenario plus its one-line summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: String,
}

pub fn run_scenario(config: &ScenarioConfig) -> Result<Report, CliError> {
    match config.scenario {
        Scenario::DimerCurve => run_dimer_curve(config),
        Scenario::EksThermal => run_eks_thermal(config),
        Scenario::FreeThermal => run_free_thermal(config),
        Scenario::Spectrum => run_spectrum(config),
        Scenario::CarCheck => run_car_check(config),
        Scenario::RhoSite => run_rho_site(config),
    }
}

fn entropy_kind(choice: EntropyChoice) -> EntropyKind {
    match choice {
        EntropyChoice::VonNeumann => EntropyKind::VonNeumann,
        EntropyChoice::Linear => EntropyKind::Linear,
    }
}

fn model_spec(config: &ScenarioConfig) -> ModelSpec {
    match config.model {
        ModelKind::FreeChain => {
            ModelSpec::free_chain(config.sites, config.t, config.mu, config.boundary)
        }
        ModelKind::Hubbard => {
            ModelSpec::hubbard(config.sites, config.t, config.u, config.mu, config.boundary)
        }
        ModelKind::EksDimer => ModelSpec::eks_dimer(),
    }
}

fn run_dimer_curve(config: &ScenarioConfig) -> Result<Report, CliError> {
    let grid = linear_grid(config.u_over_4t_min, config.u_over_4t_max, config.points);
    let kind = entropy_kind(config.entropy);
    let real = dimer_curve(config.t, &grid, DimerDecomposition::Real, kind)?;
    let reciprocal = dimer_curve(config.t, &grid, DimerDecomposition::Reciprocal, kind)?;
    let rows: Vec<Vec<Cell>> = real
        .iter()
        .zip(&reciprocal)
        .map(|(&(x, s), &(_, sk))| vec![Cell::Num(x), Cell::Num(s), Cell::Num(sk)])
        .collect();
    let (first, last) = (0, real.len() - 1);
    let summary = format!(
        "dimer-curve: S_real {:.6} -> {:.6}, S_reciprocal {:.6} -> {:.6} over U/4t in [{}, {}]",
        real[first].1,
        real[last].1,
        reciprocal[first].1,
        reciprocal[last].1,
        grid[first],
        grid[last]
    );
    Ok(Report {
        columns: vec!["U_over_4t", "S_real", "S_reciprocal"],
        rows,
        summary,
    })
}

/// Reads a site-level mode map: first line `L`, then `L` rows of `2L` floats
/// with real and imaginary parts interleaved.
pub fn read_unitary_file(path: &Path) -> Result<ModeMap, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        CliError::Input(format!("cannot read unitary file {}: {e}", path.display()))
    })?;
    let bad = |msg: String| CliError::Input(format!("unitary file {}: {msg}", path.display()));
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let l: usize = lines
        .next()
        .ok_or_else(|| bad("empty file".into()))?
        .parse()
        .map_err(|_| bad("first line must be the number of sites".into()))?;
    if l == 0 {
        return Err(bad("the number of sites must be >= 1".into()));
    }
    let mut entries = Vec::with_capacity(l * l);
    for row in 0..l {
        let line = lines
            .next()
            .ok_or_else(|| bad(format!("missing row {}", row + 1)))?;
        let values: Vec<f64> = line
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|s| !s.is_empty())
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| bad(format!("row {}: `{s}` is not a number", row + 1)))
            })
            .collect::<Result<_, _>>()?;
        if values.len() != 2 * l {
            return Err(bad(format!(
                "row {} has {} values, expected {}",
                row + 1,
                values.len(),
                2 * l
            )));
        }
        entries.extend(values.chunks(2).map(|p| C64::new(p[0], p[1])));
    }
    if lines.next().is_some() {
        return Err(bad(format!("more than {l} rows")));
    }
    Ok(ModeMap::new(DMatrix::from_row_slice(l, l, &entries))?)
}

/// The Fock-space unitary that re-expresses states in the chosen modes.
fn decomposition_unitary(
    choice: &DecompositionChoice,
    lattice: Lattice,
) -> Result<(Option<FockUnitary>, DecompositionTag), CliError> {
    match choice {
        DecompositionChoice::Real => Ok((None, DecompositionTag::Real)),
        DecompositionChoice::Reciprocal => Ok((
            Some(reciprocal_decomposition(lattice)?),
            DecompositionTag::Reciprocal,
        )),
        DecompositionChoice::Unitary(path) => {
            let map = read_unitary_file(path)?;
            if map.modes() != lattice.sites {
                return Err(CliError::Input(format!(
                    "unitary file {} acts on {} sites, the model has {}",
                    path.display(),
                    map.modes(),
                    lattice.sites
                )));
            }
            let map = if lattice.is_spinful() {
                ModeMap::spinful(&map)
            } else {
                map
            };
            let tag = DecompositionTag::Custom(path.display().to_string());
            Ok((Some(FockUnitary::decomposition(&map, lattice)?), tag))
        }
    }
}

fn thermal_rows(
    decomp: &SpectralDecomposition,
    config: &ScenarioConfig,
    mu: f64,
    unitary: Option<&FockUnitary>,
) -> Result<Vec<(f64, f64, f64)>, CliError> {
    let kind = entropy_kind(config.entropy);
    let sites = decomp.lattice().sites as f64;
    config
        .betas
        .par_iter()
        .map(|&beta| {
            let params = ThermalParams::new(beta, mu)?;
            let s = thermal_local_entanglement(decomp, &params, kind, unitary)?;
            let filling = thermal_average(decomp, &params, |e| e.particle_number as f64 / sites)?;
            Ok((beta, s, filling))
        })
        .collect()
}

fn run_eks_thermal(config: &ScenarioConfig) -> Result<Report, CliError> {
    let spec = model_spec(config);
    let decomp = diagonalize(&spec)?;
    let (unitary, _) = decomposition_unitary(&config.decomposition, spec.lattice())?;
    let rows = thermal_rows(&decomp, config, config.mu, unitary.as_ref())?;
    let values: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let summary = format!(
        "eks-thermal: S_thermal in [{lo:.12}, {hi:.12}] over {} beta values",
        rows.len()
    );
    Ok(Report {
        columns: vec!["beta", "S_thermal"],
        rows: rows
            .into_iter()
            .map(|(b, s, _)| vec![Cell::Num(b), Cell::Num(s)])
            .collect(),
        summary,
    })
}

fn run_free_thermal(config: &ScenarioConfig) -> Result<Report, CliError> {
    // the chemical potential enters as a grand-canonical weight here
    let mut spec = model_spec(config);
    spec.mu = 0.0;
    let decomp = diagonalize(&spec)?;
    let (unitary, _) = decomposition_unitary(&config.decomposition, spec.lattice())?;
    let rows = thermal_rows(&decomp, config, config.mu, unitary.as_ref())?;
    let summary = match rows.last() {
        Some(&(beta, s, n)) => format!(
            "free-thermal: L={} mu={}: S_thermal={s:.12} mean_filling={n:.12} at beta={beta}",
            config.sites, config.mu
        ),
        None => "free-thermal: no rows".into(),
    };
    Ok(Report {
        columns: vec!["beta", "mu", "S_thermal", "mean_filling"],
        rows: rows
            .into_iter()
            .map(|(b, s, n)| {
                vec![
                    Cell::Num(b),
                    Cell::Num(config.mu),
                    Cell::Num(s),
                    Cell::Num(n),
                ]
            })
            .collect(),
        summary,
    })
}

fn run_spectrum(config: &ScenarioConfig) -> Result<Report, CliError> {
    let decomp = diagonalize(&model_spec(config))?;
    let mut levels: Vec<(String, f64)> = decomp
        .entries()
        .iter()
        .filter(|e| config.sector.is_none_or(|s| s == e.sector))
        .map(|e| {
            let key = if config.group_by_sector {
                e.sector.to_string()
            } else {
                "*".to_string()
            };
            (key, e.energy)
        })
        .collect();
    if levels.is_empty() {
        return Err(CliError::Input(
            "the selected sector holds no states".into(),
        ));
    }
    // within each key, sort by energy and merge levels closer than the tolerance
    levels.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let mut grouped: Vec<(String, f64, usize)> = Vec::new();
    for (key, energy) in levels {
        match grouped.last_mut() {
            Some((k, e, n)) if *k == key && (energy - *e).abs() <= DEGENERACY_TOL => *n += 1,
            _ => grouped.push((key, energy, 1)),
        }
    }
    let total: usize = grouped.iter().map(|g| g.2).sum();
    let ground = grouped.iter().map(|g| g.1).fold(f64::INFINITY, f64::min);
    let summary = format!(
        "spectrum: {total} states in {} levels, lowest {ground:.12}",
        grouped.len()
    );
    Ok(Report {
        columns: vec!["sector", "eigenvalue", "degeneracy"],
        rows: grouped
            .into_iter()
            .map(|(k, e, n)| vec![Cell::Text(k), Cell::Num(e), Cell::Int(n as i64)])
            .collect(),
        summary,
    })
}

/// Largest deviation of `op` from `c · identity`, by acting on every basis state.
fn deviation_from_scalar(op: &OperatorExpr, c: f64, modes: usize) -> f64 {
    (0u32..1 << modes)
        .into_par_iter()
        .map(|bits| {
            let mut image: HashMap<u32, C64> = HashMap::new();
            for term in op.terms() {
                if let Some((amp, s)) = OperatorExpr::apply_term(term, FockState(bits)) {
                    *image.entry(s.0).or_default() += amp;
                }
            }
            *image.entry(bits).or_default() -= c;
            image.values().map(|z| z.norm()).fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

fn run_car_check(config: &ScenarioConfig) -> Result<Report, CliError> {
    let lattice = model_spec(config).lattice();
    let modes = lattice.modes();
    if modes > MAX_UNRESTRICTED_MODES {
        return Err(CoreError::Resource(format!(
            "car-check on {modes} modes exceeds the cap of {MAX_UNRESTRICTED_MODES}"
        ))
        .into());
    }
    let mode = |f: usize| ModeIndex::from_flat(f, lattice.layout);
    let (mut both, mut mixed) = (0.0f64, 0.0f64);
    for i in 0..modes {
        for j in 0..modes {
            let (a, b) = (
                OperatorExpr::annihilate(mode(i)),
                OperatorExpr::annihilate(mode(j)),
            );
            both = both.max(deviation_from_scalar(
                &OperatorExpr::anticommutator(&a, &b),
                0.0,
                modes,
            ));
            let delta = if i == j { 1.0 } else { 0.0 };
            let mixed_op = OperatorExpr::anticommutator(&a, &b.adjoint());
            mixed = mixed.max(deviation_from_scalar(&mixed_op, delta, modes));
        }
    }
    let summary = format!(
        "car-check: {} identities on {modes} modes, max deviation {:.3e}",
        2 * modes * modes,
        both.max(mixed)
    );
    Ok(Report {
        columns: vec!["identity", "modes", "max_deviation"],
        rows: vec![
            vec![
                Cell::Text("{c_i,c_j}=0".into()),
                Cell::Int(modes as i64),
                Cell::Num(both),
            ],
            vec![
                Cell::Text("{c_i,c_j^dagger}=delta_ij".into()),
                Cell::Int(modes as i64),
                Cell::Num(mixed),
            ],
        ],
        summary,
    })
}

fn run_rho_site(config: &ScenarioConfig) -> Result<Report, CliError> {
    let spec = model_spec(config);
    let decomp = diagonalize(&spec)?;
    let candidates: Vec<usize> = (0..decomp.len())
        .filter(|&i| {
            config
                .sector
                .is_none_or(|s| s == decomp.entries()[i].sector)
        })
        .collect();
    let Some(&lowest) = candidates.iter().min_by(|&&a, &&b| {
        decomp.entries()[a]
            .energy
            .total_cmp(&decomp.entries()[b].energy)
    }) else {
        return Err(CliError::Input(
            "the selected sector holds no states".into(),
        ));
    };
    let ground = &decomp.entries()[lowest];
    let multiplicity = candidates
        .iter()
        .filter(|&&i| decomp.entries()[i].energy - ground.energy <= DEGENERACY_TOL)
        .count();
    if multiplicity > 1 {
        return Err(CoreError::Degenerate {
            sector: ground.sector,
            energy: ground.energy,
            multiplicity,
        }
        .into());
    }
    let (unitary, tag) = decomposition_unitary(&config.decomposition, spec.lattice())?;
    let state = match &unitary {
        Some(w) => transform_state(w, &ground.vector)?,
        None => ground.vector.clone(),
    };
    let rho = partial_trace_site(&state, config.site)?.with_decomposition(tag);
    let s = entropy(&rho, entropy_kind(config.entropy));
    let d = rho.dim();
    let mut rows = Vec::with_capacity(d * d);
    for r in 0..d {
        for c in 0..d {
            let z = rho.rho()[(r, c)];
            rows.push(vec![
                Cell::Int(r as i64),
                Cell::Int(c as i64),
                Cell::Num(z.re),
                Cell::Num(z.im),
            ]);
        }
    }
    let summary = format!(
        "rho-site: site {} of the ground state in sector {} (E={:.12}), {} decomposition, entropy {s:.12}",
        config.site,
        ground.sector,
        ground.energy,
        rho.decomposition()
    );
    Ok(Report {
        columns: vec!["row", "col", "re", "im"],
        rows,
        summary,
    })
}
