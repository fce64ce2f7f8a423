//! CSV readers and writers for grid data.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{BoError, Result};
use crate::grid::{GridFunction, GridSpec};
use crate::stepper::Snapshot;

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// `x,u_t0,u_t1,...` with one row per grid point.
pub fn snapshots_csv(grid: &GridSpec, snapshots: &[Snapshot]) -> String {
    let mut s = String::from("x");
    for i in 0..snapshots.len() {
        let _ = write!(s, ",u_t{i}");
    }
    s.push('\n');
    for j in 0..grid.n_points() {
        s.push_str(&fmt_f64(grid.x(j)));
        for snap in snapshots {
            s.push(',');
            s.push_str(&fmt_f64(snap.state.values()[j]));
        }
        s.push('\n');
    }
    s
}

/// Parses a numeric CSV with a header row into columns. Empty cells
/// (absent rates) read as NaN.
pub fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| BoError::Io(format!("{}: {e}", path.display())))?;
    let header: Vec<String> = reader
        .headers()
        .map_err(|e| BoError::Io(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| BoError::Io(format!("{}: {e}", path.display())))?;
        for (col, field) in cols.iter_mut().zip(record.iter()) {
            let field = field.trim();
            if field.is_empty() {
                col.push(f64::NAN);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                BoError::Io(format!(
                    "{}: row {}: `{field}` is not a number",
                    path.display(),
                    line + 2
                ))
            })?;
            col.push(v);
        }
    }
    Ok((header, cols))
}

/// Reads a two-column `x,u` file whose abscissae must coincide with `grid`.
pub fn read_initial_condition(path: &Path, grid: &GridSpec) -> Result<GridFunction> {
    let (header, cols) = read_columns(path)?;
    if header.len() != 2 {
        return Err(BoError::Io(format!(
            "{}: expected two columns (x, u), found {}",
            path.display(),
            header.len()
        )));
    }
    let (xs, us) = (&cols[0], &cols[1]);
    if xs.len() != grid.n_points() {
        return Err(BoError::LengthMismatch {
            expected: grid.n_points(),
            got: xs.len(),
        });
    }
    let tol = 1e-9 * grid.spacing();
    for (j, &x) in xs.iter().enumerate() {
        if (x - grid.x(j)).abs() > tol {
            return Err(BoError::InvalidGrid(format!(
                "{}: x = {x} on row {} does not match grid point {}",
                path.display(),
                j + 2,
                grid.x(j)
            )));
        }
    }
    GridFunction::new(*grid, us.clone())
}
