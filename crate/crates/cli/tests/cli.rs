use std::fs;
use std::process::{Command, Output};

use fermient_cli::config::parse_config;
use fermient_cli::run::Cell;
use fermient_cli::{emit_config, run_scenario};

fn fermient(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fermient"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn num(cell: &Cell) -> f64 {
    match cell {
        Cell::Num(x) => *x,
        Cell::Int(n) => *n as f64,
        Cell::Text(s) => panic!("expected a number, got {s}"),
    }
}

#[test]
fn dimer_curve_endpoints() {
    let (config, _) = parse_config("scenario = dimer-curve\nt = 1\npoints = 201\n").unwrap();
    let report = run_scenario(&config).unwrap();
    assert_eq!(report.columns, vec!["U_over_4t", "S_real", "S_reciprocal"]);
    assert_eq!(report.rows.len(), 201);
    assert_eq!(num(&report.rows[0][0]), 0.0);
    assert!((num(&report.rows[0][1]) - 0.75).abs() < 1e-12);
    assert!(num(&report.rows[0][2]).abs() < 1e-12);
    assert_eq!(num(&report.rows[200][0]), 10.0);
}

#[test]
fn eks_thermal_is_temperature_independent() {
    let (config, _) = parse_config("scenario = eks-thermal\nbeta = 0.5,1,2\n").unwrap();
    let report = run_scenario(&config).unwrap();
    assert_eq!(report.rows.len(), 3);
    for row in &report.rows {
        assert!((num(&row[1]) - 0.75 * std::f64::consts::LN_2).abs() < 1e-10);
    }
}

#[test]
fn eks_spectrum_rows() {
    let out = fermient(&["spectrum"]);
    assert!(out.status.success());
    assert_eq!(
        stdout(&out),
        "sector,eigenvalue,degeneracy\n*,-1.0000000000000000e0,8\n*,1.0000000000000000e0,8\n"
    );
}

#[test]
fn free_thermal_half_filling_at_zero_mu() {
    let (config, _) = parse_config("scenario = free-thermal\nbeta = 0.5,1\nmu = 0\n").unwrap();
    let report = run_scenario(&config).unwrap();
    assert_eq!(
        report.columns,
        vec!["beta", "mu", "S_thermal", "mean_filling"]
    );
    for row in &report.rows {
        // particle-hole symmetry of the ring pins the mean filling at 1/2
        assert!((num(&row[3]) - 0.5).abs() < 1e-12);
        assert!(num(&row[2]) > 0.0 && num(&row[2]) <= std::f64::consts::LN_2);
    }
}

#[test]
fn car_check_reports_exact_algebra() {
    let (config, _) = parse_config("scenario = car-check\nsites = 5\n").unwrap();
    let report = run_scenario(&config).unwrap();
    assert_eq!(report.rows.len(), 2);
    assert!(report.rows.iter().all(|r| num(&r[2]) < 1e-12));
}

#[test]
fn rho_site_dumps_unit_trace_matrix() {
    let (config, _) = parse_config("scenario = rho-site\nmodel = hubbard\nu = 0\n").unwrap();
    let report = run_scenario(&config).unwrap();
    assert_eq!(report.rows.len(), 16);
    let trace: f64 = report
        .rows
        .iter()
        .filter(|r| r[0] == r[1])
        .map(|r| num(&r[2]))
        .sum();
    assert!((trace - 1.0).abs() < 1e-12);
    for r in report.rows.iter().filter(|r| r[0] == r[1]) {
        assert!((num(&r[2]) - 0.25).abs() < 1e-12);
    }
}

#[test]
fn unitary_files_reproduce_builtin_decompositions() {
    let dir = tempfile::tempdir().unwrap();
    let identity = dir.path().join("identity.txt");
    fs::write(&identity, "2\n1 0 0 0\n0 0 1 0\n").unwrap();
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let fourier = dir.path().join("fourier.txt");
    fs::write(&fourier, format!("2\n{h} 0 {h} 0\n{h} 0 {} 0\n", -h)).unwrap();

    let run = |decomposition: &str| {
        let text = format!(
            "scenario = rho-site\nmodel = hubbard\nu = 1\ndecomposition = {decomposition}\n"
        );
        run_scenario(&parse_config(&text).unwrap().0).unwrap().rows
    };
    let close = |a: &[Vec<Cell>], b: &[Vec<Cell>]| {
        a.iter().zip(b).all(|(x, y)| {
            (num(&x[2]) - num(&y[2])).abs() < 1e-12 && (num(&x[3]) - num(&y[3])).abs() < 1e-12
        })
    };
    assert!(close(
        &run("real"),
        &run(&format!("unitary:{}", identity.display()))
    ));
    assert!(close(
        &run("reciprocal"),
        &run(&format!("unitary:{}", fourier.display()))
    ));
    assert!(!close(&run("real"), &run("reciprocal")));
}

#[test]
fn malformed_unitary_file_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    fs::write(&path, "2\n1 0 0 0\n").unwrap();
    let arg = format!("unitary:{}", path.display());
    let out = fermient(&["rho-site", "--decomposition", &arg]);
    assert_eq!(out.status.code(), Some(1));
    fs::write(&path, "2\n1 0 1 0\n0 0 1 0\n").unwrap();
    let out = fermient(&["rho-site", "--decomposition", &arg]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unitary"));
}

#[test]
fn emitted_config_reproduces_output_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("first.csv");
    let second = dir.path().join("second.csv");
    let cfg = dir.path().join("effective.cfg");
    let base = dir.path().join("base.cfg");
    fs::write(
        &base,
        "scenario = free-thermal\n# comment\nbeta = 0.25, 1.5\nmu = 0.3\nsites = 6\n",
    )
    .unwrap();

    let first_arg = first.to_str().unwrap();
    let out = fermient(&[
        "free-thermal",
        "--config",
        base.to_str().unwrap(),
        "--out",
        first_arg,
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );

    let printed = fermient(&[
        "free-thermal",
        "--config",
        base.to_str().unwrap(),
        "--out",
        first_arg,
        "--print-config",
    ]);
    let effective = stdout(&printed);
    fs::write(&cfg, effective.replace(first_arg, second.to_str().unwrap())).unwrap();
    let out = fermient(&["free-thermal", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(fs::read(&first).unwrap(), fs::read(&second).unwrap());

    // and the emitted text is a fixed point
    let (config, _) = parse_config(&effective).unwrap();
    assert_eq!(emit_config(&config), effective);
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let base = dir.path().join("base.cfg");
    fs::write(&base, "beta = 1\n").unwrap();
    let out = fermient(&[
        "eks-thermal",
        "--config",
        base.to_str().unwrap(),
        "--beta",
        "2,3",
    ]);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 2.0);
}

#[test]
fn json_output_has_config_columns_rows() {
    let out = fermient(&["eks-thermal", "--beta", "1", "--format", "json"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["columns"], serde_json::json!(["beta", "S_thermal"]));
    assert_eq!(doc["config"]["scenario"], "eks-thermal");
    let s = doc["rows"][0][1].as_f64().unwrap();
    assert!((s - 0.75 * std::f64::consts::LN_2).abs() < 1e-10);
}

#[test]
fn csv_floats_round_trip() {
    let out = fermient(&["dimer-curve", "--points", "9"]);
    let (config, _) = parse_config("scenario = dimer-curve\npoints = 9\n").unwrap();
    let report = run_scenario(&config).unwrap();
    let text = stdout(&out);
    assert!(!text.contains('\r'));
    for (line, row) in csv_rows(&text).iter().zip(&report.rows) {
        for (field, cell) in line.iter().zip(row) {
            assert_eq!(field.parse::<f64>().unwrap(), num(cell));
        }
    }
}

#[test]
fn exit_codes() {
    assert_eq!(
        fermient(&["dimer-curve", "--points", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(fermient(&["no-such-scenario"]).status.code(), Some(2));
    assert_eq!(
        fermient(&["free-thermal", "--sites", "40"]).status.code(),
        Some(3)
    );
    // at U/4t = 2 the ground state is a spin doublet
    assert_eq!(fermient(&["rho-site", "--u", "8"]).status.code(), Some(4));
    // the open 4-site chain has two N=2 states at zero energy
    let out = fermient(&[
        "free-thermal",
        "--sites",
        "4",
        "--boundary",
        "open",
        "--beta",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    // a scenario bound to one model rejects another
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("mismatch.cfg");
    fs::write(&cfg, "model = hubbard\nbeta = 1\n").unwrap();
    let out = fermient(&["eks-thermal", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));
}

#[test]
fn warnings_and_summary_go_to_stderr() {
    let out = fermient(&["eks-thermal", "--beta", "1,1"]);
    assert!(out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("warning: duplicate beta"));
    assert!(err.contains("eks-thermal:"));
    assert_eq!(csv_rows(&stdout(&out)).len(), 1);
}
