//! JSON and CSV artifact formats.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{Group, GroupSpec};
use crate::matrix::OperatorMatrix;
use crate::signal::{PhaseFunction, Signal};

fn pair(v: &Complex64) -> [f64; 2] {
    [v.re, v.im]
}

/// A signal as `{group, values: [[re, im], ...]}` in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignalJson {
    pub group: GroupSpec,
    pub values: Vec<[f64; 2]>,
}

impl From<&Signal> for SignalJson {
    fn from(s: &Signal) -> Self {
        SignalJson {
            group: s.group().spec().clone(),
            values: s.values().iter().map(pair).collect(),
        }
    }
}

impl SignalJson {
    pub fn to_signal(&self) -> Result<Signal> {
        let group = Group::new(self.group.clone())?;
        Signal::new(group, self.values.iter().map(|[a, b]| Complex64::new(*a, *b)).collect())
    }
}

/// Operator matrix as `{group, rows: [[[re, im], ...], ...]}`, row-major.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    pub group: GroupSpec,
    pub rows: Vec<Vec<[f64; 2]>>,
}

impl From<&OperatorMatrix> for MatrixJson {
    fn from(m: &OperatorMatrix) -> Self {
        let n = m.dim();
        MatrixJson {
            group: m.group().spec().clone(),
            rows: (0..n)
                .map(|i| (0..n).map(|j| pair(&m.at(i, j))).collect())
                .collect(),
        }
    }
}

impl MatrixJson {
    pub fn to_matrix(&self) -> Result<OperatorMatrix> {
        let group = Group::new(self.group.clone())?;
        let entries = self
            .rows
            .iter()
            .flatten()
            .map(|[a, b]| Complex64::new(*a, *b))
            .collect();
        OperatorMatrix::new(group, entries)
    }
}

/// One nonzero symbol sample keyed by time and frequency index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolEntry {
    pub x: usize,
    pub xi: usize,
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

/// Sparse phase-space symbol; unlisted samples are zero.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SymbolJson {
    pub entries: Vec<SymbolEntry>,
}

impl SymbolJson {
    pub fn to_phase_function(&self, group: &Arc<Group>) -> Result<PhaseFunction> {
        let n = group.order();
        let mut values = vec![Complex64::new(0.0, 0.0); group.phase_len()];
        for e in &self.entries {
            if e.x >= n || e.xi >= n {
                return Err(Error::ConfigInvalid(format!(
                    "symbol entry ({}, {}) outside a group of order {n}",
                    e.x, e.xi
                )));
            }
            values[group.phase_index(e.x, e.xi)] += Complex64::new(e.re, e.im);
        }
        PhaseFunction::new(group.clone(), values)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(File::open(path)?)?)
    }
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    Ok(csv::Writer::from_path(path)?)
}

/// Columns `index, re, im`.
pub fn write_signal_csv(path: &Path, s: &Signal) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["index", "re", "im"])?;
    for (i, v) in s.values().iter().enumerate() {
        w.serialize((i, v.re, v.im))?;
    }
    w.flush()?;
    Ok(())
}

/// Columns `x, xi, re, im, abs`.
pub fn write_phase_csv(path: &Path, f: &PhaseFunction) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["x", "xi", "re", "im", "abs"])?;
    let n = f.group().order();
    for x in 0..n {
        for xi in 0..n {
            let v = f.at(x, xi);
            w.serialize((x, xi, v.re, v.im, v.norm()))?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Columns `row, col, re, im`.
pub fn write_matrix_csv(path: &Path, m: &OperatorMatrix) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["row", "col", "re", "im"])?;
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            let v = m.at(i, j);
            w.serialize((i, j, v.re, v.im))?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NormSweepRow {
    pub p: String,
    pub q: String,
    pub weight_id: String,
    pub window_id: String,
    pub value: f64,
}

/// Columns `p, q, weight_id, window_id, value`.
pub fn write_norm_sweep_csv(path: &Path, rows: &[NormSweepRow]) -> Result<()> {
    let mut w = csv_writer(path)?;
    for r in rows {
        w.serialize(r)?;
    }
    if rows.is_empty() {
        w.write_record(["p", "q", "weight_id", "window_id", "value"])?;
    }
    w.flush()?;
    Ok(())
}

/// Arbitrary rows under a fixed header.
pub fn write_rows_csv<T: Serialize>(path: &Path, header: &[&str], rows: &[T]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
