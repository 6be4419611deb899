use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fermient_cli::config::{Format, RawConfig};
use fermient_cli::output::{to_csv, to_json};
use fermient_cli::{emit_config, run_scenario, CliError};

/// Exact diagonalization and local entanglement of small fermion lattices.
#[derive(Parser, Debug)]
#[command(name = "fermient", version)]
struct Args {
    /// dimer-curve, eks-thermal, free-thermal, spectrum, car-check or rho-site
    scenario: String,
    /// Flat `key = value` configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (standard output if omitted).
    #[arg(long)]
    out: Option<String>,
    /// csv or json
    #[arg(long)]
    format: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    u: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    mu: Option<String>,
    /// Comma-separated inverse temperatures.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<String>,
    #[arg(long)]
    sites: Option<String>,
    /// open or periodic
    #[arg(long)]
    boundary: Option<String>,
    /// real, reciprocal or unitary:FILE
    #[arg(long)]
    decomposition: Option<String>,
    /// vn or linear
    #[arg(long)]
    entropy: Option<String>,
    /// Number of grid points.
    #[arg(long)]
    points: Option<String>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn execute(args: Args) -> Result<(), CliError> {
    let mut raw = match &args.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(|e| {
                CliError::Input(format!("cannot read config {}: {e}", path.display()))
            })?;
            RawConfig::parse(&text)?
        }
        None => RawConfig::default(),
    };
    raw.set("scenario", args.scenario.as_str())?;
    let overrides = [
        ("out", &args.out),
        ("format", &args.format),
        ("t", &args.t),
        ("u", &args.u),
        ("mu", &args.mu),
        ("beta", &args.beta),
        ("sites", &args.sites),
        ("boundary", &args.boundary),
        ("decomposition", &args.decomposition),
        ("entropy", &args.entropy),
        ("points", &args.points),
    ];
    for (key, value) in overrides {
        if let Some(v) = value {
            raw.set(key, v.as_str())?;
        }
    }
    let (config, warnings) = raw.resolve()?;
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    if args.print_config {
        print!("{}", emit_config(&config));
        return Ok(());
    }

    let report = run_scenario(&config)?;
    let text = match config.format {
        Format::Csv => to_csv(&report),
        Format::Json => to_json(&config, &report),
    };
    match &config.out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Output(format!("cannot write {}: {e}", path.display())))?,
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Output(e.to_string()))?,
    }
    eprintln!("{}", report.summary);
    Ok(())
}

fn main() -> ExitCode {
    match execute(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
