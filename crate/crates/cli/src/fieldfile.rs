//! Field files: a JSON manifest next to a CSV or little-endian f64 payload.
//!
//! The manifest records the grid, component names and payload encoding.
//! Payload rows are nodes in storage order (`x1` fastest); each row holds
//! one value per component. CSV payloads have no header. Binary payloads
//! interleave components per node.

use std::fs;
use std::path::{Path, PathBuf};

use fluidgeom::fields::{Boundary, Grid3, ScalarField, SymTensor2Field, Tensor2Field, VectorField};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Csv,
    F64le,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryFlag {
    Periodic,
    Clamped,
}

impl From<Boundary> for BoundaryFlag {
    fn from(b: Boundary) -> Self {
        match b {
            Boundary::Periodic => BoundaryFlag::Periodic,
            Boundary::Clamped => BoundaryFlag::Clamped,
        }
    }
}

impl From<BoundaryFlag> for Boundary {
    fn from(b: BoundaryFlag) -> Self {
        match b {
            BoundaryFlag::Periodic => Boundary::Periodic,
            BoundaryFlag::Clamped => Boundary::Clamped,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    pub schema_version: u32,
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub origin: [f64; 3],
    pub boundary: [BoundaryFlag; 3],
    pub components: Vec<String>,
    pub encoding: Encoding,
    /// Payload path, relative to the manifest's directory.
    pub payload: String,
}

/// Grid plus named components, each a full node array.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldFile {
    pub grid: Grid3,
    pub names: Vec<String>,
    pub data: Vec<Vec<f64>>,
}

impl FieldFile {
    pub fn new(grid: Grid3) -> Self {
        Self { grid, names: Vec::new(), data: Vec::new() }
    }

    pub fn push(&mut self, name: &str, values: &[f64]) -> &mut Self {
        assert_eq!(values.len(), self.grid.len(), "component {name} has the wrong length");
        self.names.push(name.to_string());
        self.data.push(values.to_vec());
        self
    }

    pub fn with_scalar(mut self, name: &str, f: &ScalarField) -> Self {
        self.push(name, f.values());
        self
    }

    pub fn with_vector(mut self, names: [&str; 3], f: &VectorField) -> Self {
        for (n, c) in names.iter().zip(f.components()) {
            self.push(n, c.values());
        }
        self
    }

    pub fn with_sym(mut self, names: [&str; 6], f: &SymTensor2Field) -> Self {
        for (n, c) in names.iter().zip(f.components()) {
            self.push(n, c.values());
        }
        self
    }

    pub fn component(&self, name: &str) -> CliResult<&[f64]> {
        self.names
            .iter()
            .position(|n| n == name)
            .map(|k| self.data[k].as_slice())
            .ok_or_else(|| CliError::input(format!("field file has no component {name:?} (has {:?})", self.names)))
    }

    pub fn scalar(&self, name: &str) -> CliResult<ScalarField> {
        Ok(ScalarField::new(self.grid, self.component(name)?.to_vec())?)
    }

    pub fn vector(&self, names: [&str; 3]) -> CliResult<VectorField> {
        let comps = [self.scalar(names[0])?, self.scalar(names[1])?, self.scalar(names[2])?];
        Ok(VectorField::new(comps)?)
    }

    pub fn sym(&self, names: [&str; 6]) -> CliResult<SymTensor2Field> {
        let mut comps = Vec::with_capacity(6);
        for n in names {
            comps.push(self.scalar(n)?);
        }
        let comps: [ScalarField; 6] = comps.try_into().expect("six components");
        Ok(SymTensor2Field::new(comps)?)
    }

    pub fn tensor(&self, names: [&str; 9]) -> CliResult<Tensor2Field> {
        let mut comps = Vec::with_capacity(9);
        for n in names {
            comps.push(self.scalar(n)?);
        }
        let comps: [ScalarField; 9] = comps.try_into().expect("nine components");
        Ok(Tensor2Field::new(comps)?)
    }

    pub fn manifest(&self, encoding: Encoding, payload: &str) -> Manifest {
        Manifest {
            schema_version: SCHEMA_VERSION,
            dims: self.grid.dims(),
            spacing: self.grid.spacing(),
            origin: self.grid.origin(),
            boundary: self.grid.boundary().map(BoundaryFlag::from),
            components: self.names.clone(),
            encoding,
            payload: payload.to_string(),
        }
    }

    /// Writes `<path>` (manifest) and a payload beside it named after the
    /// manifest stem.
    pub fn write(&self, path: &Path, encoding: Encoding) -> CliResult<()> {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("field");
        let payload_name = match encoding {
            Encoding::Csv => format!("{stem}.csv"),
            Encoding::F64le => format!("{stem}.f64"),
        };
        let payload_path = sibling(path, &payload_name);
        let n = self.grid.len();
        match encoding {
            Encoding::Csv => {
                let mut w = csv::WriterBuilder::new()
                    .has_headers(false)
                    .from_path(&payload_path)
                    .map_err(|e| csv_io(&payload_path, e))?;
                for idx in 0..n {
                    // `{:?}` prints the shortest string that parses back to the same f64
                    w.write_record(self.data.iter().map(|c| format!("{:?}", c[idx])))
                        .map_err(|e| csv_io(&payload_path, e))?;
                }
                w.flush().map_err(|e| CliError::io(&payload_path, e))?;
            }
            Encoding::F64le => {
                let mut bytes = Vec::with_capacity(n * self.data.len() * 8);
                for idx in 0..n {
                    for c in &self.data {
                        bytes.extend_from_slice(&c[idx].to_le_bytes());
                    }
                }
                fs::write(&payload_path, bytes).map_err(|e| CliError::io(&payload_path, e))?;
            }
        }
        let manifest = serde_json::to_string_pretty(&self.manifest(encoding, &payload_name)).expect("manifest serializes");
        fs::write(path, manifest + "\n").map_err(|e| CliError::io(path, e))
    }

    pub fn read(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let manifest: Manifest = serde_json::from_str(&text).map_err(|e| {
            CliError::input(format!("{}: manifest line {} column {}: {e}", path.display(), e.line(), e.column()))
        })?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(CliError::input(format!(
                "{}: schema_version {} unsupported (expected {SCHEMA_VERSION})",
                path.display(),
                manifest.schema_version
            )));
        }
        if manifest.components.is_empty() {
            return Err(CliError::input(format!("{}: manifest lists no components", path.display())));
        }
        let boundary = manifest.boundary.map(Boundary::from);
        let grid = Grid3::new(manifest.dims, manifest.spacing, manifest.origin, boundary)
            .map_err(|e| CliError::input(format!("{}: {e}", path.display())))?;
        let payload_path = sibling(path, &manifest.payload);
        let k = manifest.components.len();
        let n = grid.len();
        let mut data = vec![Vec::with_capacity(n); k];
        match manifest.encoding {
            Encoding::Csv => {
                let mut r = csv::ReaderBuilder::new()
                    .has_headers(false)
                    .from_path(&payload_path)
                    .map_err(|e| csv_io(&payload_path, e))?;
                let mut rows = 0;
                for (line, rec) in r.records().enumerate() {
                    let rec = rec.map_err(|e| CliError::input(format!("{}: line {}: {e}", payload_path.display(), line + 1)))?;
                    if rec.len() != k {
                        return Err(CliError::input(format!(
                            "{}: line {}: expected {k} values, found {}",
                            payload_path.display(),
                            line + 1,
                            rec.len()
                        )));
                    }
                    if rows == n {
                        return Err(CliError::input(format!(
                            "{}: line {}: more rows than the {n} grid nodes",
                            payload_path.display(),
                            line + 1
                        )));
                    }
                    for (c, field) in rec.iter().enumerate() {
                        let v: f64 = field.trim().parse().map_err(|_| {
                            CliError::input(format!("{}: line {}: {field:?} is not a number", payload_path.display(), line + 1))
                        })?;
                        data[c].push(v);
                    }
                    rows += 1;
                }
                if rows != n {
                    return Err(CliError::input(format!(
                        "{}: {rows} rows, grid has {n} nodes",
                        payload_path.display()
                    )));
                }
            }
            Encoding::F64le => {
                let bytes = fs::read(&payload_path).map_err(|e| CliError::io(&payload_path, e))?;
                let want = n * k * 8;
                if bytes.len() != want {
                    return Err(CliError::input(format!(
                        "{}: payload is {} bytes, expected {want} ({n} nodes x {k} components x 8); mismatch at offset {}",
                        payload_path.display(),
                        bytes.len(),
                        bytes.len().min(want)
                    )));
                }
                for (i, chunk) in bytes.chunks_exact(8).enumerate() {
                    data[i % k].push(f64::from_le_bytes(chunk.try_into().expect("8-byte chunk")));
                }
            }
        }
        Ok(Self { grid, names: manifest.components, data })
    }
}

fn sibling(manifest: &Path, name: &str) -> PathBuf {
    manifest.parent().map(|d| d.join(name)).unwrap_or_else(|| PathBuf::from(name))
}

fn csv_io(path: &Path, e: csv::Error) -> CliError {
    CliError::input(format!("{}: {e}", path.display()))
}
