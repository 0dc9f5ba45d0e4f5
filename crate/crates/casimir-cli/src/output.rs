//! Table emission: CSV (header + `\n` rows, full round-trip float
//! precision) or JSON ({"config": echo, "rows": [...]}), to standard
//! output or the configured path. Failed sweep rows become `# error at
//! k=<v>: msg` comment lines in CSV and {"k", "error"} objects in JSON,
//! keeping their place in the sequence.

use crate::config::{OutputFormat, RunConfig};
use casimir_core::model::Material;
use serde::Serialize;
use std::io::Write;

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
}

#[derive(Debug)]
pub enum Row {
    Cells(Vec<Cell>),
    Error { k: f64, message: String },
}

#[derive(Debug)]
pub struct Table {
    pub columns: &'static [&'static str],
    pub rows: Vec<Row>,
}

impl Table {
    pub fn single(columns: &'static [&'static str], cells: Vec<Cell>) -> Self {
        Self { columns, rows: vec![Row::Cells(cells)] }
    }
}

/// Config echo for JSON output: the physics keys in SI units, spelled
/// exactly like the input keys so the echo can seed a new run.
#[derive(Debug, Serialize)]
pub struct ConfigEcho {
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "Lx")]
    pub lx: f64,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub a1: f64,
    pub a2: f64,
    #[serde(rename = "lambda_C")]
    pub lambda_c: f64,
    pub b: f64,
    pub theta: f64,
    pub material: &'static str,
    #[serde(rename = "lambda_P", skip_serializing_if = "Option::is_none")]
    pub lambda_p: Option<f64>,
    pub method: String,
    pub rel_tol: f64,
}

impl ConfigEcho {
    pub fn from_config(config: &RunConfig) -> Self {
        let g = &config.geometry;
        let (material, lambda_p) = match config.material {
            Material::PerfectMirror => ("perfect", None),
            Material::PlasmaModel { lambda_p } => ("plasma", Some(lambda_p)),
        };
        Self {
            l: g.l,
            lx: g.lx,
            ly: g.ly,
            a1: g.a1,
            a2: g.a2,
            lambda_c: g.lambda_c,
            b: g.b,
            theta: g.theta,
            material,
            lambda_p,
            method: config.method.to_string(),
            rel_tol: config.quadrature.rel_tol,
        }
    }
}

/// Shortest round-trip digits, positional for everyday magnitudes and
/// scientific outside them so tiny energies stay legible.
fn number_text(v: f64) -> String {
    let magnitude = v.abs();
    if v != 0.0 && !(1e-4..1e16).contains(&magnitude) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Num(v) => number_text(*v),
        Cell::Text(s) => s.clone(),
    }
}

fn csv_bytes(table: &Table, stamp: Option<u64>) -> String {
    let mut out = String::new();
    if let Some(seconds) = stamp {
        out.push_str(&format!("# generated unix {seconds}\n"));
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        match row {
            Row::Cells(cells) => {
                let fields: Vec<String> = cells.iter().map(cell_text).collect();
                out.push_str(&fields.join(","));
            }
            Row::Error { k, message } => {
                out.push_str(&format!("# error at k={}: {message}", number_text(*k)));
            }
        }
        out.push('\n');
    }
    out
}

fn json_number(v: f64) -> serde_json::Value {
    serde_json::Number::from_f64(v).map(serde_json::Value::Number).unwrap_or(serde_json::Value::Null)
}

fn json_bytes(table: &Table, echo: &ConfigEcho, stamp: Option<u64>) -> String {
    let rows: Vec<serde_json::Value> = table
        .rows
        .iter()
        .map(|row| match row {
            Row::Cells(cells) => {
                let mut object = serde_json::Map::new();
                for (column, cell) in table.columns.iter().zip(cells) {
                    let value = match cell {
                        Cell::Num(v) => json_number(*v),
                        Cell::Text(s) => serde_json::Value::String(s.clone()),
                    };
                    object.insert((*column).into(), value);
                }
                serde_json::Value::Object(object)
            }
            Row::Error { k, message } => serde_json::json!({
                "k": json_number(*k),
                "error": message,
            }),
        })
        .collect();
    let mut document = serde_json::Map::new();
    if let Some(seconds) = stamp {
        document.insert("generated_unix".into(), seconds.into());
    }
    document.insert("config".into(), serde_json::to_value(echo).expect("echo serializes"));
    document.insert("rows".into(), serde_json::Value::Array(rows));
    let mut text = serde_json::to_string_pretty(&document).expect("document serializes");
    text.push('\n');
    text
}

/// Render and write the table per the config's format and destination.
pub fn emit(table: &Table, config: &RunConfig, stamp: Option<u64>) -> std::io::Result<()> {
    let text = match config.output {
        OutputFormat::Csv => csv_bytes(table, stamp),
        OutputFormat::Json => json_bytes(table, &ConfigEcho::from_config(config), stamp),
    };
    match &config.output_path {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::parse_config;

    fn config() -> RunConfig {
        parse_config(
            "L = 1um\nLx = 24um\nLy = 24um\na1 = 1nm\na2 = 2nm\nlambda_C = 2.4um\n\
             material = plasma\nlambda_P = 137nm\n",
        )
        .unwrap()
    }

    #[test]
    fn csv_shape() {
        let table = Table {
            columns: &["k_rad_per_m", "value"],
            rows: vec![
                Row::Cells(vec![Cell::Num(2.6e6), Cell::Num(-0.125)]),
                Row::Error { k: 5e6, message: "did not converge".into() },
                Row::Cells(vec![Cell::Num(1e7), Cell::Text("x".into())]),
            ],
        };
        let text = csv_bytes(&table, None);
        let lines: Vec<&str> = text.split('\n').collect();
        assert_eq!(lines[0], "k_rad_per_m,value");
        assert_eq!(lines[1], "2600000,-0.125");
        assert_eq!(lines[2], "# error at k=5000000: did not converge");
        assert_eq!(lines[3], "10000000,x");
        assert_eq!(lines[4], "");
        assert!(!text.contains('\r'));
    }

    #[test]
    fn csv_floats_round_trip() {
        for value in [5.2e-7, -4.3337525748258449e-10, 1.0 / 3.0, 2.6179938779914944e6, 1e300] {
            let table = Table::single(&["v"], vec![Cell::Num(value)]);
            let text = csv_bytes(&table, None);
            let field = text.lines().nth(1).unwrap();
            assert_eq!(field.parse::<f64>().unwrap(), value);
        }
    }

    #[test]
    fn number_notation_follows_magnitude() {
        assert_eq!(number_text(0.0), "0");
        assert_eq!(number_text(-0.125), "-0.125");
        assert_eq!(number_text(5.2e-7), "5.2e-7");
        assert_eq!(number_text(1e16), "1e16");
        assert_eq!(number_text(2617993.8779914943), "2617993.8779914943");
    }

    #[test]
    fn json_document_shape() {
        let table = Table {
            columns: &["k_rad_per_m", "value"],
            rows: vec![
                Row::Cells(vec![Cell::Num(1.0), Cell::Num(2.5)]),
                Row::Error { k: 2.0, message: "boom".into() },
            ],
        };
        let text = json_bytes(&table, &ConfigEcho::from_config(&config()), None);
        let doc: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(doc["config"]["L"], 1e-6);
        assert_eq!(doc["config"]["material"], "plasma");
        assert_eq!(doc["config"]["lambda_P"], 1.37e-7);
        assert_eq!(doc["rows"][0]["value"], 2.5);
        assert_eq!(doc["rows"][1]["error"], "boom");
        assert!(doc.get("generated_unix").is_none());
    }

    #[test]
    fn perfect_mirror_echo_omits_lambda_p() {
        let cfg = parse_config(
            "L = 1um\nLx = 24um\nLy = 24um\na1 = 1nm\na2 = 2nm\nlambda_C = 2.4um\n\
             material = perfect\n",
        )
        .unwrap();
        let text =
            json_bytes(&Table::single(&["v"], vec![Cell::Num(1.0)]), &ConfigEcho::from_config(&cfg), None);
        assert!(!text.contains("lambda_P"));
    }

    #[test]
    fn stamp_is_a_comment_or_field() {
        let table = Table::single(&["v"], vec![Cell::Num(1.0)]);
        let text = csv_bytes(&table, Some(1_000_000));
        assert!(text.starts_with("# generated unix 1000000\n"));
        let json = json_bytes(&table, &ConfigEcho::from_config(&config()), Some(7));
        let doc: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(doc["generated_unix"], 7);
    }
}
