//! Small output helpers shared by the subcommands.

use std::path::Path;

use gittins::io::LoadedInstance;
use gittins::{load_instance, Result as CoreResult};

use crate::Failure;

/// Loads an instance file; any failure here is an input error.
pub fn load(path: &Path) -> Result<LoadedInstance<f64>, Failure> {
    load_instance::<f64>(path).map_err(Failure::input)
}

/// Maps an algorithm-stage error to the precondition exit class.
pub fn run_algo<T>(result: CoreResult<T>) -> Result<T, Failure> {
    result.map_err(Failure::precondition)
}

/// Aligned plain-text table for stdout.
pub fn print_table(headers: &[&str], rows: &[Vec<String>]) {
    let mut widths: Vec<usize> = headers.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.len());
        }
    }
    let line = |cells: Vec<String>| {
        let mut out = String::new();
        for (i, (cell, w)) in cells.iter().zip(&widths).enumerate() {
            if i > 0 {
                out.push_str("  ");
            }
            out.push_str(&format!("{cell:>w$}", w = w));
        }
        println!("{out}");
    };
    line(headers.iter().map(|s| s.to_string()).collect());
    for row in rows {
        line(row.clone());
    }
}

/// Writes rows as CSV (UTF-8, comma separators, dot decimals).
pub fn to_csv(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&headers.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Dispatches report writing on the file extension (`.csv` or `.json`).
pub fn write_report(
    path: &Path,
    headers: &[&str],
    rows: &[Vec<String>],
    json: &serde_json::Value,
) -> Result<(), Failure> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => to_csv(headers, rows),
        Some("json") => {
            let mut s = serde_json::to_string_pretty(json).map_err(Failure::input)?;
            s.push('\n');
            s
        }
        other => {
            return Err(Failure::input(format!(
                "unsupported report extension {:?} (use .csv or .json)",
                other.unwrap_or("")
            )))
        }
    };
    std::fs::write(path, text).map_err(Failure::input)
}

/// Compact float formatting for tables and CSV: full precision without
/// trailing noise.
pub fn fmt_float(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.1}")
    } else {
        let mut s = format!("{x:.12}");
        while s.ends_with('0') {
            s.pop();
        }
        if s.ends_with('.') {
            s.push('0');
        }
        s
    }
}
