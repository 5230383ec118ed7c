//! Two-column `x3,u1` profile files.

use std::path::Path;

use fluidgeom::fields::Profile1D;

use crate::error::{CliError, CliResult};

/// Relative tolerance on node spacing when checking uniformity.
const UNIFORM_TOL: f64 = 1e-9;

/// Reads a profile CSV with header `x3,u1`. Rows must have strictly
/// increasing, uniformly spaced `x3`.
pub fn read_profile(path: &Path) -> CliResult<Profile1D> {
    let mut r = csv::Reader::from_path(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let header = r.headers().map_err(|e| CliError::input(format!("{}: {e}", path.display())))?.clone();
    let names: Vec<&str> = header.iter().map(str::trim).collect();
    if names != ["x3", "u1"] {
        return Err(CliError::input(format!("{}: header must be `x3,u1`, found {:?}", path.display(), names)));
    }
    let mut xs = Vec::new();
    let mut us = Vec::new();
    for (k, rec) in r.records().enumerate() {
        let line = k + 2;
        let rec = rec.map_err(|e| CliError::input(format!("{}: line {line}: {e}", path.display())))?;
        let num = |i: usize| -> CliResult<f64> {
            let s = rec.get(i).unwrap_or("").trim();
            s.parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| CliError::input(format!("{}: line {line}: {s:?} is not a finite number", path.display())))
        };
        xs.push(num(0)?);
        us.push(num(1)?);
    }
    if xs.len() < 2 {
        return Err(CliError::input(format!("{}: need at least two rows", path.display())));
    }
    let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
    for (k, w) in xs.windows(2).enumerate() {
        if w[1] <= w[0] {
            return Err(CliError::input(format!("{}: line {}: x3 not increasing", path.display(), k + 3)));
        }
        if ((w[1] - w[0]) - h).abs() > UNIFORM_TOL * h.abs().max(1.0) {
            return Err(CliError::input(format!("{}: line {}: x3 spacing not uniform", path.display(), k + 3)));
        }
    }
    Ok(Profile1D::new(xs[0], h, us)?)
}

/// Writes rows under `header`, using round-trip float formatting.
pub fn write_rows(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
    let io = |e: csv::Error| CliError::input(format!("{}: {e}", path.display()));
    w.write_record(header).map_err(io)?;
    for row in rows {
        w.write_record(row.iter().map(|v| format!("{v:?}"))).map_err(io)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))
}
