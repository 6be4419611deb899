use serde_json::{json, Map, Value};

use crate::config::{emit_config, ScenarioConfig};
use crate::run::{Cell, Report};

fn csv_cell(cell: &Cell) -> String {
    match cell {
        // 17 significant digits, exact for 64-bit floats
        Cell::Num(x) => format!("{x:.16e}"),
        Cell::Int(n) => n.to_string(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

pub fn to_csv(report: &Report) -> String {
    let mut out = report.columns.join(",");
    out.push('\n');
    for row in &report.rows {
        out.push_str(&row.iter().map(csv_cell).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

fn json_cell(cell: &Cell) -> Value {
    match cell {
        Cell::Num(x) => json!(x),
        Cell::Int(n) => json!(n),
        Cell::Text(s) => json!(s),
    }
}

/// One object with the effective `config`, the `columns` and the `rows`.
pub fn to_json(config: &ScenarioConfig, report: &Report) -> String {
    let mut cfg = Map::new();
    for line in emit_config(config).lines() {
        if let Some((k, v)) = line.split_once(" = ") {
            cfg.insert(k.to_string(), Value::String(v.to_string()));
        }
    }
    let doc = json!({
        "config": cfg,
        "columns": report.columns,
        "rows": report.rows.iter().map(|r| r.iter().map(json_cell).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serializes");
    text.push('\n');
    text
}
