//! Path and report serialization.
//!
//! CSV files carry a header (`t,value` for scalar paths, `t,v0,v1,..` for
//! vector paths). The binary cache starts with the line `FSYNC1\n`, followed
//! by the row and column counts as little-endian `u64` and the row-major
//! little-endian `f64` table whose first column is time.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::noise::{SamplePath, TimeGrid};

pub const BINARY_MAGIC: &[u8; 7] = b"FSYNC1\n";

pub fn path_header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    if dim == 1 {
        h.push("value".into());
    } else {
        h.extend((0..dim).map(|j| format!("v{j}")));
    }
    h
}

/// Writes a numeric table; every entry must be finite.
pub fn write_table_csv<W: Write>(out: W, header: &[String], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for (i, row) in rows.into_iter().enumerate() {
        if row.len() != header.len() {
            return Err(Error::Format(format!("row {i} has {} columns, header has {}", row.len(), header.len())));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Format(format!("non-finite value {v} in row {i}")));
        }
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn path_rows<'a>(paths: &'a [&'a SamplePath]) -> impl Iterator<Item = Vec<f64>> + 'a {
    let n = paths[0].len();
    (0..n).map(move |i| {
        let mut row = vec![paths[0].time(i)];
        for p in paths {
            row.extend_from_slice(p.state(i));
        }
        row
    })
}

pub fn write_path_csv<W: Write>(out: W, path: &SamplePath) -> Result<()> {
    write_table_csv(out, &path_header(path.dim()), path_rows(&[path]))
}

/// Several paths on one grid side by side, with the given column prefixes
/// (`t,u0,..,v0,..`).
pub fn write_paths_csv<W: Write>(out: W, paths: &[(&str, &SamplePath)]) -> Result<()> {
    let Some((_, first)) = paths.first() else {
        return Err(Error::Format("no paths to write".into()));
    };
    let mut header = vec!["t".to_string()];
    for (prefix, p) in paths {
        if p.grid() != first.grid() {
            return Err(Error::GridMismatch("paths written together must share a grid".into()));
        }
        header.extend((0..p.dim()).map(|j| format!("{prefix}{j}")));
    }
    let refs: Vec<&SamplePath> = paths.iter().map(|(_, p)| *p).collect();
    write_table_csv(out, &header, path_rows(&refs))
}

/// Reads a path written by [`write_path_csv`]; the grid is rebuilt from the
/// first and last times.
pub fn read_path_csv<R: Read>(input: R) -> Result<SamplePath> {
    let mut r = csv::Reader::from_reader(input);
    let cols = r.headers()?.len();
    if cols < 2 {
        return Err(Error::Format("need a time column and at least one value column".into()));
    }
    let mut times = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let mut it = rec.iter().map(|s| s.trim().parse::<f64>().map_err(|e| Error::Format(e.to_string())));
        times.push(it.next().unwrap()?);
        for v in it {
            values.push(v?);
        }
    }
    path_from_table(&times, cols - 1, values)
}

fn path_from_table(times: &[f64], dim: usize, values: Vec<f64>) -> Result<SamplePath> {
    if times.len() < 2 {
        return Err(Error::Format("a path needs at least two rows".into()));
    }
    let grid = TimeGrid::new(times[0], times[times.len() - 1], times.len() - 1)?;
    for (i, &t) in times.iter().enumerate() {
        if (t - grid.point(i)).abs() > 1e-9 * grid.step().max(t.abs()) {
            return Err(Error::InvalidGrid(format!("row {i} at t = {t} is off the uniform grid")));
        }
    }
    SamplePath::new(grid, dim, values)
}

pub fn write_path_binary<W: Write>(mut out: W, path: &SamplePath) -> Result<()> {
    out.write_all(BINARY_MAGIC)?;
    out.write_all(&(path.len() as u64).to_le_bytes())?;
    out.write_all(&(path.dim() as u64 + 1).to_le_bytes())?;
    for row in path_rows(&[path]) {
        for v in row {
            out.write_all(&v.to_le_bytes())?;
        }
    }
    out.flush()?;
    Ok(())
}

pub fn read_path_binary<R: Read>(mut input: R) -> Result<SamplePath> {
    let mut magic = [0u8; 7];
    input.read_exact(&mut magic)?;
    if &magic != BINARY_MAGIC {
        return Err(Error::Format("missing FSYNC1 header".into()));
    }
    let mut word = [0u8; 8];
    input.read_exact(&mut word)?;
    let rows = u64::from_le_bytes(word) as usize;
    input.read_exact(&mut word)?;
    let cols = u64::from_le_bytes(word) as usize;
    if cols < 2 || rows < 2 || rows.checked_mul(cols).is_none_or(|c| c > 1 << 32) {
        return Err(Error::Format(format!("implausible table shape {rows} x {cols}")));
    }
    let mut times = Vec::with_capacity(rows);
    let mut values = Vec::with_capacity(rows * (cols - 1));
    for _ in 0..rows {
        for c in 0..cols {
            input.read_exact(&mut word)?;
            let v = f64::from_le_bytes(word);
            if c == 0 {
                times.push(v);
            } else {
                values.push(v);
            }
        }
    }
    path_from_table(&times, cols - 1, values)
}

pub fn save_path_csv(file: impl AsRef<Path>, path: &SamplePath) -> Result<()> {
    write_path_csv(BufWriter::new(File::create(file)?), path)
}

pub fn load_path_csv(file: impl AsRef<Path>) -> Result<SamplePath> {
    read_path_csv(BufReader::new(File::open(file)?))
}

pub fn save_path_binary(file: impl AsRef<Path>, path: &SamplePath) -> Result<()> {
    write_path_binary(BufWriter::new(File::create(file)?), path)
}

pub fn load_path_binary(file: impl AsRef<Path>) -> Result<SamplePath> {
    read_path_binary(BufReader::new(File::open(file)?))
}

/// Pretty-printed JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}
