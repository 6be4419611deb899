//! Flat `key = value` scenario configuration.
//!
//! Blank lines and `#` comments are ignored. Keys are case-insensitive. Every
//! key not given falls back to a scenario-dependent default, and
//! [`emit_config`] writes the fully resolved configuration back out.
//!
//! | key | values | default |
//! |-----|--------|---------|
//! | `scenario` | `dimer-curve`, `eks-thermal`, `free-thermal`, `spectrum`, `car-check`, `rho-site` | required |
//! | `model` | `free-chain`, `hubbard`, `eks-dimer` | per scenario |
//! | `sites` | integer >= 1 | 8 free chain, 2 otherwise, 5 for `car-check` |
//! | `t` | hopping > 0 | 1 |
//! | `u` | on-site repulsion | 2 |
//! | `mu` | chemical potential | 0 |
//! | `boundary` | `open`, `periodic` | periodic free chain, open otherwise |
//! | `u_over_4t_min`, `u_over_4t_max` | >= 0 | 0, 10 |
//! | `points` | integer >= 1 | 201 |
//! | `beta` | comma-separated list, each >= 0 | `0,0.5,1,2,5` |
//! | `entropy` | `vn`, `linear` | `linear` for `dimer-curve`, `vn` otherwise |
//! | `decomposition` | `real`, `reciprocal`, `unitary:FILE` | `real` |
//! | `site` | site index for `rho-site` | 0 |
//! | `sector` | `all` or a label such as `Nup=1;Ndn=1` | `all` |
//! | `group_by_sector` | `true`, `false` | `false` |
//! | `format` | `csv`, `json` | `csv` |
//! | `out` | output path | standard output |

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use fermient_core::fock::SectorLabel;
use fermient_core::models::{Boundary, ModelKind};

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(line) = self.line {
            write!(f, "line {line}: ")?;
        }
        if let Some(field) = &self.field {
            write!(f, "field `{field}`: ")?;
        }
        f.write_str(&self.message)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    DimerCurve,
    EksThermal,
    FreeThermal,
    Spectrum,
    CarCheck,
    RhoSite,
}

impl Scenario {
    pub const ALL: [Scenario; 6] = [
        Scenario::DimerCurve,
        Scenario::EksThermal,
        Scenario::FreeThermal,
        Scenario::Spectrum,
        Scenario::CarCheck,
        Scenario::RhoSite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::DimerCurve => "dimer-curve",
            Scenario::EksThermal => "eks-thermal",
            Scenario::FreeThermal => "free-thermal",
            Scenario::Spectrum => "spectrum",
            Scenario::CarCheck => "car-check",
            Scenario::RhoSite => "rho-site",
        }
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyChoice {
    VonNeumann,
    Linear,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DecompositionChoice {
    Real,
    Reciprocal,
    /// Site-level mode map read from a file.
    Unitary(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    pub model: ModelKind,
    pub sites: usize,
    pub t: f64,
    pub u: f64,
    pub mu: f64,
    pub boundary: Boundary,
    pub u_over_4t_min: f64,
    pub u_over_4t_max: f64,
    pub points: usize,
    pub betas: Vec<f64>,
    pub entropy: EntropyChoice,
    pub decomposition: DecompositionChoice,
    pub site: usize,
    pub sector: Option<SectorLabel>,
    pub group_by_sector: bool,
    pub format: Format,
    pub out: Option<PathBuf>,
}

const KEYS: [&str; 18] = [
    "scenario",
    "model",
    "sites",
    "t",
    "u",
    "mu",
    "boundary",
    "u_over_4t_min",
    "u_over_4t_max",
    "points",
    "beta",
    "entropy",
    "decomposition",
    "site",
    "sector",
    "group_by_sector",
    "format",
    "out",
];

/// Where a raw value came from, for diagnostics.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Origin {
    Line(usize),
    Flag,
}

/// Unresolved key-value pairs, before defaults and validation.
#[derive(Debug, Clone, Default)]
pub struct RawConfig {
    values: BTreeMap<&'static str, (String, Origin)>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut raw = RawConfig::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, value) = content.split_once('=').ok_or_else(|| ConfigError {
                line: Some(line_no),
                field: None,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            let key = canonical_key(key.trim()).ok_or_else(|| ConfigError {
                line: Some(line_no),
                field: None,
                message: format!("unknown key `{}`", key.trim()),
            })?;
            if raw.values.contains_key(key) {
                return Err(ConfigError {
                    line: Some(line_no),
                    field: Some(key.into()),
                    message: "key given more than once".into(),
                });
            }
            raw.values
                .insert(key, (value.trim().to_string(), Origin::Line(line_no)));
        }
        Ok(raw)
    }

    /// Set or replace a value; used for command-line overrides.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<(), ConfigError> {
        let key = canonical_key(key).ok_or_else(|| ConfigError {
            line: None,
            field: None,
            message: format!("unknown key `{key}`"),
        })?;
        self.values.insert(key, (value.into(), Origin::Flag));
        Ok(())
    }

    fn get(&self, key: &'static str) -> Option<&(String, Origin)> {
        self.values.get(key)
    }

    /// Apply defaults and validate. Warnings (such as dropped duplicate β
    /// values) are returned alongside the configuration.
    pub fn resolve(&self) -> Result<(ScenarioConfig, Vec<String>), ConfigError> {
        let mut warnings = Vec::new();
        let scenario: Scenario = match self.get("scenario") {
            Some(_) => self.parse_with("scenario", |v| v.parse())?.unwrap(),
            None => {
                return Err(ConfigError {
                    line: None,
                    field: Some("scenario".into()),
                    message: "missing".into(),
                })
            }
        };

        let default_model = match scenario {
            Scenario::DimerCurve | Scenario::RhoSite => ModelKind::Hubbard,
            Scenario::EksThermal | Scenario::Spectrum => ModelKind::EksDimer,
            Scenario::FreeThermal | Scenario::CarCheck => ModelKind::FreeChain,
        };
        let model = self
            .parse_with("model", parse_model)?
            .unwrap_or(default_model);
        let required = match scenario {
            Scenario::DimerCurve => Some(ModelKind::Hubbard),
            Scenario::EksThermal => Some(ModelKind::EksDimer),
            Scenario::FreeThermal => Some(ModelKind::FreeChain),
            _ => None,
        };
        if let Some(kind) = required {
            if model != kind {
                return Err(self.error(
                    "model",
                    format!("{} requires model {}", scenario.name(), model_name(kind)),
                ));
            }
        }

        let default_sites = match (scenario, model) {
            (Scenario::CarCheck, _) => 5,
            (_, ModelKind::FreeChain) => 8,
            _ => 2,
        };
        let sites = self
            .parse_with("sites", |v| parse_count(v, 1))?
            .unwrap_or(default_sites);
        if matches!(model, ModelKind::EksDimer) && scenario != Scenario::CarCheck && sites != 2 {
            return Err(self.error(
                "sites",
                format!("the eks-dimer model has 2 sites, got {sites}"),
            ));
        }
        if scenario == Scenario::DimerCurve && sites != 2 {
            return Err(self.error("sites", format!("dimer-curve runs on 2 sites, got {sites}")));
        }

        let t = self.parse_with("t", parse_finite)?.unwrap_or(1.0);
        if t <= 0.0 {
            return Err(self.error("t", format!("must be > 0, got {t}")));
        }
        let u = self.parse_with("u", parse_finite)?.unwrap_or(2.0);
        let mu = self.parse_with("mu", parse_finite)?.unwrap_or(0.0);
        let default_boundary = if model == ModelKind::FreeChain {
            Boundary::Periodic
        } else {
            Boundary::Open
        };
        let boundary = self
            .parse_with("boundary", parse_boundary)?
            .unwrap_or(default_boundary);
        if scenario == Scenario::DimerCurve && boundary != Boundary::Open {
            return Err(self.error("boundary", "dimer-curve uses the open dimer".into()));
        }

        let u_over_4t_min = self
            .parse_with("u_over_4t_min", parse_non_negative)?
            .unwrap_or(0.0);
        let u_over_4t_max = self
            .parse_with("u_over_4t_max", parse_non_negative)?
            .unwrap_or(10.0);
        if u_over_4t_max < u_over_4t_min {
            return Err(self.error(
                "u_over_4t_max",
                format!("must be >= u_over_4t_min ({u_over_4t_min}), got {u_over_4t_max}"),
            ));
        }
        let points = self
            .parse_with("points", |v| parse_count(v, 1))?
            .unwrap_or(201);

        let betas = match self.parse_with("beta", parse_list)? {
            Some(list) => {
                let mut unique: Vec<f64> = Vec::with_capacity(list.len());
                for b in list {
                    if unique.contains(&b) {
                        warnings.push(format!("duplicate beta value {b} ignored"));
                    } else {
                        unique.push(b);
                    }
                }
                unique
            }
            None => vec![0.0, 0.5, 1.0, 2.0, 5.0],
        };

        let default_entropy = if scenario == Scenario::DimerCurve {
            EntropyChoice::Linear
        } else {
            EntropyChoice::VonNeumann
        };
        let entropy = self
            .parse_with("entropy", parse_entropy)?
            .unwrap_or(default_entropy);
        let decomposition = self
            .parse_with("decomposition", parse_decomposition)?
            .unwrap_or(DecompositionChoice::Real);
        let site = self.parse_with("site", |v| parse_count(v, 0))?.unwrap_or(0);
        if site >= sites {
            return Err(self.error("site", format!("must be < sites ({sites}), got {site}")));
        }
        let sector = self.parse_with("sector", parse_sector)?.flatten();
        let group_by_sector = self
            .parse_with("group_by_sector", parse_bool)?
            .unwrap_or(false);
        let format = self
            .parse_with("format", parse_format)?
            .unwrap_or(Format::Csv);
        let out = self.parse_with("out", |v| {
            if v.is_empty() {
                Err("empty path".into())
            } else {
                Ok(PathBuf::from(v))
            }
        })?;

        let config = ScenarioConfig {
            scenario,
            model,
            sites,
            t,
            u,
            mu,
            boundary,
            u_over_4t_min,
            u_over_4t_max,
            points,
            betas,
            entropy,
            decomposition,
            site,
            sector,
            group_by_sector,
            format,
            out,
        };
        Ok((config, warnings))
    }

    fn parse_with<T>(
        &self,
        key: &'static str,
        parse: impl Fn(&str) -> Result<T, String>,
    ) -> Result<Option<T>, ConfigError> {
        match self.get(key) {
            None => Ok(None),
            Some((value, origin)) => parse(value).map(Some).map_err(|message| ConfigError {
                line: match origin {
                    Origin::Line(n) => Some(*n),
                    Origin::Flag => None,
                },
                field: Some(key.into()),
                message,
            }),
        }
    }

    fn error(&self, key: &'static str, message: String) -> ConfigError {
        let line = match self.get(key) {
            Some((_, Origin::Line(n))) => Some(*n),
            _ => None,
        };
        ConfigError {
            line,
            field: Some(key.into()),
            message,
        }
    }
}

/// Parse a configuration file into a validated configuration.
pub fn parse_config(text: &str) -> Result<(ScenarioConfig, Vec<String>), ConfigError> {
    RawConfig::parse(text)?.resolve()
}

/// Write every resolved field, so parsing the output reproduces `config`.
pub fn emit_config(config: &ScenarioConfig) -> String {
    let mut lines = vec![
        format!("scenario = {}", config.scenario.name()),
        format!("model = {}", model_name(config.model)),
        format!("sites = {}", config.sites),
        format!("t = {:?}", config.t),
        format!("u = {:?}", config.u),
        format!("mu = {:?}", config.mu),
        format!(
            "boundary = {}",
            match config.boundary {
                Boundary::Open => "open",
                Boundary::Periodic => "periodic",
            }
        ),
        format!("u_over_4t_min = {:?}", config.u_over_4t_min),
        format!("u_over_4t_max = {:?}", config.u_over_4t_max),
        format!("points = {}", config.points),
        format!(
            "beta = {}",
            config
                .betas
                .iter()
                .map(|b| format!("{b:?}"))
                .collect::<Vec<_>>()
                .join(",")
        ),
        format!(
            "entropy = {}",
            match config.entropy {
                EntropyChoice::VonNeumann => "vn",
                EntropyChoice::Linear => "linear",
            }
        ),
        format!(
            "decomposition = {}",
            decomposition_name(&config.decomposition)
        ),
        format!("site = {}", config.site),
        format!(
            "sector = {}",
            config.sector.map_or("all".to_string(), |s| s.to_string())
        ),
        format!("group_by_sector = {}", config.group_by_sector),
        format!(
            "format = {}",
            match config.format {
                Format::Csv => "csv",
                Format::Json => "json",
            }
        ),
    ];
    if let Some(out) = &config.out {
        lines.push(format!("out = {}", out.display()));
    }
    let mut text = lines.join("\n");
    text.push('\n');
    text
}

pub fn model_name(kind: ModelKind) -> &'static str {
    match kind {
        ModelKind::FreeChain => "free-chain",
        ModelKind::Hubbard => "hubbard",
        ModelKind::EksDimer => "eks-dimer",
    }
}

pub fn decomposition_name(choice: &DecompositionChoice) -> String {
    match choice {
        DecompositionChoice::Real => "real".into(),
        DecompositionChoice::Reciprocal => "reciprocal".into(),
        DecompositionChoice::Unitary(path) => format!("unitary:{}", path.display()),
    }
}

fn canonical_key(key: &str) -> Option<&'static str> {
    let lower = key.to_ascii_lowercase().replace('-', "_");
    KEYS.into_iter().find(|k| *k == lower)
}

/// Accepts the Unicode minus sign as well as `-`.
fn parse_float(v: &str) -> Result<f64, String> {
    v.replace('\u{2212}', "-")
        .trim()
        .parse::<f64>()
        .map_err(|_| format!("expected a number, got `{v}`"))
}

fn parse_finite(v: &str) -> Result<f64, String> {
    let x = parse_float(v)?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("must be finite, got {x}"))
    }
}

fn parse_non_negative(v: &str) -> Result<f64, String> {
    let x = parse_finite(v)?;
    if x >= 0.0 {
        Ok(x)
    } else {
        Err(format!("must be >= 0, got {x}"))
    }
}

fn parse_count(v: &str, min: usize) -> Result<usize, String> {
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("expected a non-negative integer, got `{v}`"))?;
    if n >= min {
        Ok(n)
    } else {
        Err(format!("must be >= {min}, got {n}"))
    }
}

fn parse_list(v: &str) -> Result<Vec<f64>, String> {
    let list: Vec<f64> = v
        .split(',')
        .map(parse_non_negative)
        .collect::<Result<_, _>>()?;
    if list.is_empty() {
        return Err("list must not be empty".into());
    }
    Ok(list)
}

fn parse_model(v: &str) -> Result<ModelKind, String> {
    match v.replace('_', "-").as_str() {
        "free-chain" => Ok(ModelKind::FreeChain),
        "hubbard" => Ok(ModelKind::Hubbard),
        "eks-dimer" | "eks" => Ok(ModelKind::EksDimer),
        _ => Err(format!(
            "expected free-chain, hubbard or eks-dimer, got `{v}`"
        )),
    }
}

fn parse_boundary(v: &str) -> Result<Boundary, String> {
    match v {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        _ => Err(format!("expected open or periodic, got `{v}`")),
    }
}

fn parse_entropy(v: &str) -> Result<EntropyChoice, String> {
    match v {
        "vn" => Ok(EntropyChoice::VonNeumann),
        "linear" => Ok(EntropyChoice::Linear),
        _ => Err(format!("expected vn or linear, got `{v}`")),
    }
}

fn parse_decomposition(v: &str) -> Result<DecompositionChoice, String> {
    match v {
        "real" => Ok(DecompositionChoice::Real),
        "reciprocal" => Ok(DecompositionChoice::Reciprocal),
        _ => match v.strip_prefix("unitary:") {
            Some(path) if !path.is_empty() => Ok(DecompositionChoice::Unitary(PathBuf::from(path))),
            _ => Err(format!(
                "expected real, reciprocal or unitary:FILE, got `{v}`"
            )),
        },
    }
}

fn parse_sector(v: &str) -> Result<Option<SectorLabel>, String> {
    if v == "all" {
        return Ok(None);
    }
    v.parse::<SectorLabel>()
        .map(Some)
        .map_err(|e| e.to_string())
}

fn parse_bool(v: &str) -> Result<bool, String> {
    match v {
        "true" => Ok(true),
        "false" => Ok(false),
        _ => Err(format!("expected true or false, got `{v}`")),
    }
}

fn parse_format(v: &str) -> Result<Format, String> {
    match v {
        "csv" => Ok(Format::Csv),
        "json" => Ok(Format::Json),
        _ => Err(format!("expected csv or json, got `{v}`")),
    }
}
