//! CSV files with fixed 17-significant-digit floats.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{CliError, Result};

/// Formats like C's `%.17g`: 17 significant digits, trailing zeros removed,
/// exponent form when the decimal exponent is below -4 or at least 17.
pub fn g17(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.16e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..17).contains(&exp) {
        let m = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{m}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (16 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Writes a header and rows of floats; `None` cells are left empty.
pub fn write_rows<W: Write>(out: &mut W, header: &[&str], rows: &[Vec<Option<f64>>]) -> std::io::Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.map(g17).unwrap_or_default()).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()
}

/// [`write_rows`] into a new file.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<Option<f64>>]) -> Result<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    write_rows(&mut BufWriter::new(file), header, rows).map_err(|e| CliError::io(path, e))
}

/// Reads a CSV with a header into named float columns.
pub fn read_table(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?
        .iter()
        .map(str::to_string)
        .collect();
    let mut columns = vec![Vec::new(); header.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::Format(format!("{}: {e}", path.display())))?;
        for (col, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| {
                CliError::Format(format!(
                    "{}: row {}: '{field}' is not a number",
                    path.display(),
                    line + 1
                ))
            })?;
            columns[col].push(v);
        }
    }
    Ok((header, columns))
}

fn column<'a>(path: &Path, header: &[String], cols: &'a [Vec<f64>], name: &str) -> Result<&'a [f64]> {
    header
        .iter()
        .position(|h| h == name)
        .map(|i| cols[i].as_slice())
        .ok_or_else(|| CliError::Format(format!("{}: missing column '{name}'", path.display())))
}

/// A curve file: `alpha,eta,h`, one row per grid node.
pub fn write_curve(path: &Path, alpha: &[f64], eta: &[f64]) -> Result<()> {
    let rows: Vec<Vec<Option<f64>>> = alpha
        .iter()
        .zip(eta)
        .map(|(a, e)| vec![Some(*a), Some(*e), Some(e.exp())])
        .collect();
    write_table(path, &["alpha", "eta", "h"], &rows)
}

/// Reads `eta` from a curve file and checks that `alpha` is the uniform grid.
pub fn read_curve(path: &Path) -> Result<Vec<f64>> {
    let (header, cols) = read_table(path)?;
    let alpha = column(path, &header, &cols, "alpha")?;
    let eta = column(path, &header, &cols, "eta")?.to_vec();
    check_uniform(path, alpha)?;
    Ok(eta)
}

/// Reads boundary data `g` from an `alpha,g` file.
pub fn read_boundary_data(path: &Path) -> Result<Vec<f64>> {
    let (header, cols) = read_table(path)?;
    check_uniform(path, column(path, &header, &cols, "alpha")?)?;
    Ok(column(path, &header, &cols, "g")?.to_vec())
}

fn check_uniform(path: &Path, alpha: &[f64]) -> Result<()> {
    let n = alpha.len();
    let step = 2.0 * std::f64::consts::PI / n.max(1) as f64;
    for (j, a) in alpha.iter().enumerate() {
        if (a - j as f64 * step).abs() > 1e-9 {
            return Err(CliError::Format(format!(
                "{}: alpha must be the uniform grid 2 pi j / {n}; row {} has {a}",
                path.display(),
                j + 1
            )));
        }
    }
    Ok(())
}
