//! Sweep CSV format: a `#`-prefixed metadata preamble recording the full
//! configuration, then a header row and comma-separated data rows with LF
//! line endings. Floats are serialized with 17 significant digits so parsing
//! reproduces every cell bit-exactly.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::network::ProtocolParams;

use super::{column_names, ResultRow, SweepSpec};

/// Full-precision decimal form of an f64 (17 significant digits round-trips
/// every finite double).
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// One CSV cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

fn params_preamble(out: &mut String, p: &ProtocolParams) {
    let _ = writeln!(out, "# source = {}", p.source.as_str());
    let _ = writeln!(out, "# v_s = {}", format_f64(p.v_s));
    let _ = writeln!(out, "# v_e = {}", format_f64(p.v_e));
    let _ = writeln!(out, "# eta1 = {}", format_f64(p.eta1));
    let _ = writeln!(out, "# eta2 = {}", format_f64(p.eta2));
    let _ = writeln!(out, "# eta3 = {}", format_f64(p.eta3));
    let _ = writeln!(out, "# eta4 = {}", format_f64(p.eta4));
    let _ = writeln!(out, "# eps3 = {}", format_f64(p.eps3));
    let _ = writeln!(out, "# eps4 = {}", format_f64(p.eps4));
    let _ = writeln!(out, "# carrier_nbar = {}", format_f64(p.carrier_nbar));
    let _ = writeln!(out, "# thermal_variance_convention = {}", p.convention.as_str());
}

/// Render a sweep result as CSV text.
pub fn render_sweep_csv(spec: &SweepSpec, rows: &[ResultRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# thermal-sim v{} sweep {:?}",
        env!("CARGO_PKG_VERSION"),
        spec.name
    );
    let _ = writeln!(out, "# mode = {}", spec.mode.as_str());
    let _ = writeln!(out, "# seed = {}", spec.seed);
    let _ = writeln!(out, "# samples = {}", spec.samples);
    for g in &spec.grids {
        let _ = writeln!(
            out,
            "# swept {} over {} points in [{}, {}]",
            g.param.as_str(),
            g.values.len(),
            format_f64(*g.values.first().unwrap()),
            format_f64(*g.values.last().unwrap()),
        );
    }
    params_preamble(&mut out, &spec.base);
    let _ = writeln!(out, "{}", column_names(spec).join(","));
    for row in rows {
        let mut cells: Vec<String> = row.swept.iter().map(|&v| format_f64(v)).collect();
        if let Some(a) = &row.analytic {
            cells.push(format_f64(a.i_ab));
            cells.push(format_f64(a.i_ab_given_e));
            cells.push(format_f64(a.discord_b_given_a));
            cells.push(a.discord_quadrature.to_string());
            cells.push(a.physical.to_string());
            cells.push(a.verdict.to_string());
        }
        if let Some(s) = &row.sampled {
            cells.push(format_f64(s.cmi));
            cells.push(format_f64(s.cmi_se));
            cells.push(format_f64(s.g2_a.value));
            cells.push(format_f64(s.g2_a.std_error));
            cells.push(format_f64(s.g2_b.value));
            cells.push(format_f64(s.g2_b.std_error));
            cells.push(format_f64(s.g2_ab.value));
            cells.push(format_f64(s.g2_ab.std_error));
        }
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub(super) fn write_sweep_csv(path: &Path, spec: &SweepSpec, rows: &[ResultRow]) -> Result<()> {
    fs::write(path, render_sweep_csv(spec, rows))?;
    Ok(())
}

/// Generic CSV writer for a header plus rows of cells (used by the report
/// command).
pub fn write_csv(path: &Path, header: &[String], rows: &[Vec<Cell>]) -> Result<()> {
    let mut out = String::new();
    let _ = writeln!(out, "{}", header.join(","));
    for row in rows {
        let cells: Vec<String> = row
            .iter()
            .map(|c| match c {
                Cell::Num(v) => format_f64(*v),
                Cell::Text(t) => t.clone(),
            })
            .collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    fs::write(path, out)?;
    Ok(())
}

/// Parse a sweep CSV back into its header and typed cells, skipping the
/// `#` preamble. Numeric cells parse as f64; everything else stays text.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<Cell>>)> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{}: no header row", path.display())))?
        .split(',')
        .map(|s| s.to_string())
        .collect();
    let mut rows = Vec::new();
    for line in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<Cell> = line
            .split(',')
            .map(|cell| match cell.parse::<f64>() {
                Ok(v) if cell.contains(['e', '.']) => Cell::Num(v),
                _ => Cell::Text(cell.to_string()),
            })
            .collect();
        if row.len() != header.len() {
            return Err(Error::Config(format!(
                "{}: row with {} cells under a {}-column header",
                path.display(),
                row.len(),
                header.len()
            )));
        }
        rows.push(row);
    }
    Ok((header, rows))
}
