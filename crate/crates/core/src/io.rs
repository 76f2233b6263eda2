//! File formats for lattices and complex grids.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{load_field, Decimal, NumberFieldData};
use crate::lattice::MetrizedLattice;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeFile {
    /// Path to a field file (relative to the lattice file), or `"Q"`.
    pub field: String,
    pub rank_over_field: usize,
    pub generator: Vec<Vec<Decimal>>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })
}

/// Resolve a field reference: `"Q"` or a path relative to `base_dir`.
pub fn resolve_field(reference: &str, base_dir: &Path) -> Result<NumberFieldData> {
    if reference == "Q" {
        return Ok(NumberFieldData::rationals());
    }
    let p = PathBuf::from(reference);
    let p = if p.is_absolute() { p } else { base_dir.join(p) };
    load_field(p)
}

pub fn parse_lattice(text: &str, base_dir: &Path) -> Result<MetrizedLattice> {
    let f: LatticeFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let field = Arc::new(resolve_field(&f.field, base_dir)?);
    let rows = f.generator.len();
    let cols = f.generator.first().map_or(0, Vec::len);
    if rows == 0 || f.generator.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("generator must be a non-empty rectangular matrix".into()));
    }
    let mut g = DMatrix::zeros(rows, cols);
    for (i, row) in f.generator.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            g[(i, j)] = x.to_f64()?;
        }
    }
    MetrizedLattice::new(field, f.rank_over_field, g)
}

pub fn load_lattice(path: impl AsRef<Path>) -> Result<MetrizedLattice> {
    let path = path.as_ref();
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_lattice(&read(path)?, base)
}

/// Grid files are JSON arrays of `[re, im]` pairs.
pub fn parse_grid(text: &str) -> Result<Vec<Complex64>> {
    let pts: Vec<[f64; 2]> = serde_json::from_str(text).map_err(|e| Error::Parse(format!("grid: {e}")))?;
    Ok(pts.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
}

pub fn load_grid(path: impl AsRef<Path>) -> Result<Vec<Complex64>> {
    parse_grid(&read(path.as_ref())?)
}

/// Parse a CLI complex literal `re,im` (or just `re`).
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let mut parts = text.split(',');
    let re = parts.next().unwrap_or("").trim();
    let im = parts.next().map(str::trim).unwrap_or("0");
    if parts.next().is_some() {
        return Err(Error::Parse(format!("`{text}` is not of the form re,im")));
    }
    let p = |s: &str| s.parse::<f64>().map_err(|e| Error::Parse(format!("`{s}`: {e}")));
    Ok(Complex64::new(p(re)?, p(im)?))
}
