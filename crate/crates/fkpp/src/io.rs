//! CSV and JSON artifacts.
//!
//! Floats are written with Rust's shortest round-trip formatting, so every
//! value reads back bit-for-bit.

use std::fs;
use std::path::{Path, PathBuf};

use fkpp_core::pde::{Grid1D, PdeState};
use fkpp_core::spectral::{ContourTrace, SpectrumCurves};
use fkpp_core::wave::WaveProfile;
use fkpp_core::ModelParams;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, AppResult};

pub const PROFILE_COLUMNS: [&str; 5] = ["x", "a", "a_prime", "i", "i_prime"];
pub const SNAPSHOT_COLUMNS: [&str; 3] = ["x", "A", "I"];
pub const CONTOUR_COLUMNS: [&str; 4] = ["re_lambda", "im_lambda", "re_e", "im_e"];

pub fn format_float(v: f64) -> String {
    format!("{v:?}")
}

pub fn ensure_dir(dir: &Path) -> AppResult<()> {
    fs::create_dir_all(dir).map_err(|e| AppError::io(dir, e))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> AppResult<()> {
    let text = serde_json::to_string_pretty(value).map_err(|e| AppError::parse(path, e))?;
    fs::write(path, text + "\n").map_err(|e| AppError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> AppResult<T> {
    let text = fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| AppError::parse(path, e))
}

/// Writes a numeric table with a header row.
pub fn write_table<I>(path: &Path, header: &[&str], rows: I) -> AppResult<()>
where
    I: IntoIterator,
    I::Item: AsRef<[f64]>,
{
    let mut w = csv::Writer::from_path(path).map_err(|e| AppError::parse(path, e))?;
    w.write_record(header).map_err(|e| AppError::parse(path, e))?;
    for row in rows {
        let row = row.as_ref();
        if row.len() != header.len() {
            return Err(AppError::parse(path, format!("row has {} fields, header {}", row.len(), header.len())));
        }
        w.write_record(row.iter().map(|&v| format_float(v))).map_err(|e| AppError::parse(path, e))?;
    }
    w.flush().map_err(|e| AppError::io(path, e))
}

/// A numeric table read back from CSV.
#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn read_table(path: &Path) -> AppResult<Table> {
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.kind() {
        csv::ErrorKind::Io(_) => AppError::io(path, std::io::Error::other(e.to_string())),
        _ => AppError::parse(path, e),
    })?;
    let header: Vec<String> = r.headers().map_err(|e| AppError::parse(path, e))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for (line, record) in r.records().enumerate() {
        let record = record.map_err(|e| AppError::parse(path, e))?;
        let row = record
            .iter()
            .map(|f| f.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| AppError::parse(path, format!("row {}: {e}", line + 2)))?;
        rows.push(row);
    }
    Ok(Table { header, rows })
}

fn expect_header(path: &Path, table: &Table, expected: &[&str]) -> AppResult<()> {
    if table.header.iter().map(String::as_str).ne(expected.iter().copied()) {
        return Err(AppError::parse(path, format!("expected columns {expected:?}, found {:?}", table.header)));
    }
    Ok(())
}

/// Scalars of a profile that the CSV columns do not carry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProfileMeta {
    pub c: f64,
    pub d: f64,
    pub r: f64,
    pub k: f64,
    pub i_plus: f64,
    pub mu_minus: f64,
    pub mu_plus: f64,
    pub critical: bool,
    pub max_x: f64,
    pub integrated_from: f64,
    pub samples: usize,
}

impl ProfileMeta {
    pub fn of(profile: &WaveProfile) -> Self {
        let p = profile.params;
        Self {
            c: p.c,
            d: p.d,
            r: p.r,
            k: profile.k,
            i_plus: profile.i_plus,
            mu_minus: profile.mu_minus,
            mu_plus: profile.mu_plus,
            critical: profile.critical,
            max_x: profile.max_x,
            integrated_from: profile.integrated_from,
            samples: profile.len(),
        }
    }
}

/// Sidecar path of a profile CSV.
pub fn profile_sidecar(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `<stem>.csv` and `<stem>.json` into `dir`.
pub fn write_profile(dir: &Path, stem: &str, profile: &WaveProfile) -> AppResult<PathBuf> {
    ensure_dir(dir)?;
    let csv_path = dir.join(format!("{stem}.csv"));
    let rows = (0..profile.len())
        .map(|k| [profile.grid[k], profile.a[k], profile.a_prime[k], profile.i[k], profile.i_prime[k]]);
    write_table(&csv_path, &PROFILE_COLUMNS, rows)?;
    write_json(&profile_sidecar(&csv_path), &ProfileMeta::of(profile))?;
    Ok(csv_path)
}

/// Reads a profile written by [`write_profile`]; the far tail is not stored.
pub fn read_profile(csv_path: &Path) -> AppResult<WaveProfile> {
    let table = read_table(csv_path)?;
    expect_header(csv_path, &table, &PROFILE_COLUMNS)?;
    let sidecar = profile_sidecar(csv_path);
    let meta: ProfileMeta = read_json(&sidecar)?;
    if meta.samples != table.rows.len() {
        return Err(AppError::parse(
            csv_path,
            format!("{} rows but the sidecar records {} samples", table.rows.len(), meta.samples),
        ));
    }
    if table.rows.len() < 16 {
        return Err(AppError::parse(csv_path, "profile needs at least 16 samples"));
    }
    let col = |k: usize| table.rows.iter().map(|r| r[k]).collect::<Vec<f64>>();
    let grid = col(0);
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(AppError::parse(csv_path, "x column is not increasing"));
    }
    Ok(WaveProfile {
        params: ModelParams::new(meta.c, meta.d, meta.r)?,
        k: meta.k,
        grid,
        a: col(1),
        a_prime: col(2),
        i: col(3),
        i_prime: col(4),
        i_plus: meta.i_plus,
        mu_minus: meta.mu_minus,
        mu_plus: meta.mu_plus,
        critical: meta.critical,
        max_x: meta.max_x,
        integrated_from: meta.integrated_from,
        far_tail: Vec::new(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
struct SnapshotIndex {
    x_min: f64,
    x_max: f64,
    n: usize,
    frames: Vec<(String, f64)>,
}

const SNAPSHOT_INDEX: &str = "index.json";

/// Writes one `(x, A, I)` CSV per state plus an index with the times.
pub fn write_snapshots(dir: &Path, grid: &Grid1D, states: &[&PdeState]) -> AppResult<()> {
    ensure_dir(dir)?;
    let mut frames = Vec::with_capacity(states.len());
    for (k, s) in states.iter().enumerate() {
        let name = format!("frame_{k:05}.csv");
        write_table(
            &dir.join(&name),
            &SNAPSHOT_COLUMNS,
            grid.nodes().zip(s.a.iter().zip(&s.i)).map(|(x, (a, i))| [x, *a, *i]),
        )?;
        frames.push((name, s.t));
    }
    write_json(&dir.join(SNAPSHOT_INDEX), &SnapshotIndex { x_min: grid.x_min, x_max: grid.x_max, n: grid.n, frames })
}

pub fn read_snapshots(dir: &Path) -> AppResult<(Grid1D, Vec<PdeState>)> {
    let index_path = dir.join(SNAPSHOT_INDEX);
    let index: SnapshotIndex = read_json(&index_path)?;
    let grid = Grid1D::new(index.x_min, index.x_max, index.n)?;
    let mut states = Vec::with_capacity(index.frames.len());
    for (name, t) in &index.frames {
        let path = dir.join(name);
        let table = read_table(&path)?;
        expect_header(&path, &table, &SNAPSHOT_COLUMNS)?;
        if table.rows.len() != grid.n {
            return Err(AppError::parse(&path, format!("{} rows for a grid of {} nodes", table.rows.len(), grid.n)));
        }
        states.push(PdeState {
            t: *t,
            a: table.rows.iter().map(|r| r[1]).collect(),
            i: table.rows.iter().map(|r| r[2]).collect(),
        });
    }
    if states.is_empty() {
        return Err(AppError::parse(&index_path, "no frames"));
    }
    Ok((grid, states))
}

pub fn write_contour(path: &Path, trace: &ContourTrace) -> AppResult<()> {
    let rows = trace.closed_lambdas().into_iter().zip(trace.closed_values()).map(|(l, e)| [l.re, l.im, e.re, e.im]);
    write_table(path, &CONTOUR_COLUMNS, rows)
}

/// Long-format curves: one row per point with the family index.
pub fn write_curves(path: &Path, curves: &SpectrumCurves) -> AppResult<()> {
    let rows = curves.iter().enumerate().flat_map(|(f, c)| c.points.iter().map(move |z| [f as f64, z.re, z.im]));
    write_table(path, &["family", "re", "im"], rows)
}
