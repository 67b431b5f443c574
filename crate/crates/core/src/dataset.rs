//! Dense binary-classification datasets and the delimited-text loader.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Column name used for the class label when none is given.
pub const DEFAULT_TARGET: &str = "target";

/// Feature matrix (row-major) with named columns and a {0,1} target.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    feature_names: Vec<String>,
    x: Vec<f64>,
    y: Vec<u8>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        rows: Vec<Vec<f64>>,
        y: Vec<u8>,
    ) -> Result<Self> {
        let d = feature_names.len();
        let mut x = Vec::with_capacity(rows.len() * d);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != d {
                return Err(Error::Dataset(format!(
                    "row {i} has {} values, expected {d}",
                    row.len()
                )));
            }
            x.extend_from_slice(row);
        }
        Self::from_flat(name, feature_names, x, y)
    }

    /// Builds a dataset from a row-major buffer of `y.len() * feature_names.len()` values.
    pub fn from_flat(
        name: impl Into<String>,
        feature_names: Vec<String>,
        x: Vec<f64>,
        y: Vec<u8>,
    ) -> Result<Self> {
        let d = feature_names.len();
        if x.len() != y.len() * d {
            return Err(Error::Dataset(format!(
                "matrix has {} values, expected {} rows x {d} features",
                x.len(),
                y.len()
            )));
        }
        if let Some(bad) = y.iter().find(|&&v| v > 1) {
            return Err(Error::Dataset(format!("label {bad} is not in {{0,1}}")));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(Error::Dataset(format!("duplicate feature name `{name}`")));
            }
        }
        if let Some(v) = x.iter().find(|v| !v.is_finite()) {
            return Err(Error::Dataset(format!("non-finite feature value {v}")));
        }
        Ok(Self {
            name: name.into(),
            feature_names,
            x,
            y,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn n_rows(&self) -> usize {
        self.y.len()
    }

    pub fn n_features(&self) -> usize {
        self.feature_names.len()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let d = self.n_features();
        &self.x[i * d..(i + 1) * d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        (0..self.n_rows()).map(move |i| self.row(i))
    }

    #[inline]
    pub fn value(&self, row: usize, feature: usize) -> f64 {
        self.x[row * self.n_features() + feature]
    }

    pub fn labels(&self) -> &[u8] {
        &self.y
    }

    /// Number of (class-0, class-1) rows.
    pub fn class_counts(&self) -> (usize, usize) {
        let ones = self.y.iter().filter(|&&v| v == 1).count();
        (self.y.len() - ones, ones)
    }

    /// Class-1 fraction.
    pub fn prevalence(&self) -> f64 {
        let (_, ones) = self.class_counts();
        ones as f64 / self.n_rows() as f64
    }

    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        let d = self.n_features();
        let mut x = Vec::with_capacity(rows.len() * d);
        let mut y = Vec::with_capacity(rows.len());
        for &r in rows {
            x.extend_from_slice(self.row(r));
            y.push(self.y[r]);
        }
        Dataset {
            name: self.name.clone(),
            feature_names: self.feature_names.clone(),
            x,
            y,
        }
    }

    /// Keeps only the listed feature columns, in the order given.
    pub fn select_columns(&self, columns: &[usize]) -> Dataset {
        let mut x = Vec::with_capacity(self.n_rows() * columns.len());
        for i in 0..self.n_rows() {
            let row = self.row(i);
            x.extend(columns.iter().map(|&c| row[c]));
        }
        Dataset {
            name: self.name.clone(),
            feature_names: columns
                .iter()
                .map(|&c| self.feature_names[c].clone())
                .collect(),
            x,
            y: self.y.clone(),
        }
    }
}

/// Header and row-major numeric cells of a delimited file.
struct NumericTable {
    headers: Vec<String>,
    cells: Vec<f64>,
}

impl NumericTable {
    fn n_rows(&self) -> usize {
        self.cells.len() / self.headers.len()
    }

    fn column(&self, j: usize) -> impl Iterator<Item = f64> + '_ {
        self.cells
            .iter()
            .skip(j)
            .step_by(self.headers.len())
            .copied()
    }
}

/// The delimiter is tab when the header line contains one, comma otherwise.
fn read_numeric_table(path: &Path) -> Result<NumericTable> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let header_line = text.lines().next().unwrap_or("");
    if header_line.trim().is_empty() {
        return Err(Error::Dataset(format!("{}: empty file", path.display())));
    }
    let delimiter = if header_line.contains('\t') {
        b'\t'
    } else {
        b','
    };

    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .has_headers(true)
        .flexible(false)
        .from_reader(text.as_bytes());
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(path, e))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();

    let mut cells = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(path, e))?;
        let line = record.position().map_or(0, |p| p.line());
        for (i, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                line,
                reason: format!("non-numeric value `{cell}` in column `{}`", headers[i]),
            })?;
            if !value.is_finite() {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    line,
                    reason: format!("non-finite value `{cell}` in column `{}`", headers[i]),
                });
            }
            cells.push(value);
        }
    }
    if cells.is_empty() {
        return Err(Error::Dataset(format!("{}: no data rows", path.display())));
    }
    Ok(NumericTable { headers, cells })
}

fn column_index(table: &NumericTable, path: &Path, name: &str, role: &str) -> Result<usize> {
    table.headers.iter().position(|h| h == name).ok_or_else(|| {
        Error::Dataset(format!(
            "{}: missing {role} column `{name}`",
            path.display()
        ))
    })
}

/// Reads a tab- or comma-delimited file with a header row.
///
/// Targets already in {0,1} are kept as-is; any other pair of distinct
/// numeric values is mapped to 0 and 1 by sorted order.
pub fn load_dataset(path: impl AsRef<Path>, target_column: &str) -> Result<Dataset> {
    let path = path.as_ref();
    let table = read_numeric_table(path)?;
    let target_idx = column_index(&table, path, target_column, "target")?;
    let feature_names: Vec<String> = table
        .headers
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != target_idx)
        .map(|(_, h)| h.clone())
        .collect();
    let width = table.headers.len();
    let x: Vec<f64> = table
        .cells
        .iter()
        .enumerate()
        .filter(|&(i, _)| i % width != target_idx)
        .map(|(_, &v)| v)
        .collect();
    let raw_targets: Vec<f64> = table.column(target_idx).collect();

    let y = coerce_binary(&raw_targets)
        .map_err(|reason| Error::Dataset(format!("{}: {reason}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Dataset::from_flat(name, feature_names, x, y)
}

/// Reads instances to explain, picking the columns named in
/// `feature_names` in that order. Other columns, such as a target, are
/// ignored.
pub fn load_instances(path: impl AsRef<Path>, feature_names: &[String]) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let table = read_numeric_table(path)?;
    let columns: Vec<usize> = feature_names
        .iter()
        .map(|name| column_index(&table, path, name, "feature"))
        .collect::<Result<_>>()?;
    let width = table.headers.len();
    Ok((0..table.n_rows())
        .map(|i| {
            columns
                .iter()
                .map(|&j| table.cells[i * width + j])
                .collect()
        })
        .collect())
}

fn coerce_binary(raw: &[f64]) -> std::result::Result<Vec<u8>, String> {
    let mut levels: Vec<f64> = raw.to_vec();
    levels.sort_by(f64::total_cmp);
    levels.dedup();
    if levels.len() > 2 {
        return Err(format!(
            "target not binary ({} distinct values)",
            levels.len()
        ));
    }
    if levels.iter().all(|&v| v == 0.0 || v == 1.0) {
        return Ok(raw.iter().map(|&v| v as u8).collect());
    }
    let high = levels[levels.len() - 1];
    if levels.len() == 1 {
        return Err(format!(
            "target has the single level {high}, which is not 0 or 1"
        ));
    }
    Ok(raw.iter().map(|&v| u8::from(v == high)).collect())
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    let reason = match e.kind() {
        csv::ErrorKind::UnequalLengths {
            expected_len, len, ..
        } => {
            format!("ragged row: {len} fields, expected {expected_len}")
        }
        _ => e.to_string(),
    };
    Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    }
}
