//! CSV/JSON emission with deterministic formatting: floats in shortest
//! round-trip decimal form, LF line endings, stable key ordering.

use serde::Serialize;
use std::fs;
use std::io::Write;
use std::path::Path;

/// Shortest decimal representation that round-trips to the same `f64`;
/// non-finite values (node-guarded samples) print as `nan`.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        serde_json::to_string(&v).expect("finite float serializes")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

/// Writes column-major data as comma-separated rows with a header line.
pub fn write_csv(path: &Path, header: &[String], columns: &[&[f64]]) -> std::io::Result<()> {
    assert_eq!(header.len(), columns.len());
    let rows = columns.first().map_or(0, |c| c.len());
    assert!(columns.iter().all(|c| c.len() == rows));
    let mut out = Vec::new();
    writeln!(out, "{}", header.join(","))?;
    for i in 0..rows {
        let mut line = String::new();
        for (j, col) in columns.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&fmt_float(col[i]));
        }
        writeln!(out, "{line}")?;
    }
    fs::write(path, out)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(std::io::Error::other)?;
    text.push('\n');
    fs::write(path, text)
}

#[derive(Serialize)]
pub struct GridEcho {
    pub x_lo: f64,
    pub x_hi: f64,
    pub n_points: usize,
}

#[derive(Serialize)]
pub struct LevelsJson {
    pub energies: Vec<f64>,
    pub gauge_note: String,
    pub beta: f64,
    pub nu: f64,
    pub n_max: usize,
    pub grid: GridEcho,
}

#[derive(Serialize)]
pub struct DeltaJson {
    pub delta_e: f64,
    /// True when no closed-form shift is registered and the zero gauge is
    /// in effect (the constant lives inside `deltaV` instead).
    pub delta_e_is_gauge: bool,
    pub label: String,
    pub level: usize,
    pub guarded_points: usize,
}

#[derive(Serialize)]
pub struct VerifyLevelJson {
    pub n: usize,
    pub analytic_energy: f64,
    pub numeric_energy: f64,
    pub rel_gap: f64,
    pub overlap: f64,
    pub analytic_residual: f64,
    pub pass: bool,
}

#[derive(Serialize)]
pub struct VerifyJson {
    pub all_pass: bool,
    pub levels: Vec<VerifyLevelJson>,
    pub operator_inf_norm: f64,
    pub solver_residuals: Vec<f64>,
}

#[derive(Serialize)]
pub struct VonRoosEcho {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Serialize)]
pub struct SpectrumJson {
    pub values: Vec<f64>,
    pub residuals: Vec<f64>,
    pub k: usize,
    pub mass: String,
    pub potential: String,
    pub von_roos: VonRoosEcho,
    pub grid: GridEcho,
}
