//! Snapshot and metadata files.
//!
//! Snapshots are CSV with columns `x_center,v,w`; values are printed with
//! the shortest representation that parses back to the identical f64, so
//! a written grid reproduces the in-memory grid exactly. Run metadata
//! goes to a JSON sidecar.

use crate::runner::{Metadata, RunOutput, SnapshotData};
use anyhow::{Context, Result};
use std::fs;
use std::path::{Path, PathBuf};

fn fmt_f64(x: f64) -> String {
    format!("{x:?}")
}

pub fn write_snapshot_csv(path: &Path, snap: &SnapshotData) -> Result<()> {
    let mut wtr = csv::Writer::from_path(path)
        .with_context(|| format!("cannot create {}", path.display()))?;
    wtr.write_record(["x_center", "v", "w"])?;
    for j in 0..snap.n_cells() {
        wtr.write_record([fmt_f64(snap.x[j]), fmt_f64(snap.v[j]), fmt_f64(snap.w[j])])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads back the three columns of a snapshot CSV.
pub fn read_snapshot_csv(path: &Path) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::Reader::from_path(path)
        .with_context(|| format!("cannot open {}", path.display()))?;
    let mut x = Vec::new();
    let mut v = Vec::new();
    let mut w = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        x.push(rec[0].parse::<f64>()?);
        v.push(rec[1].parse::<f64>()?);
        w.push(rec[2].parse::<f64>()?);
    }
    Ok((x, v, w))
}

pub fn write_metadata_json(path: &Path, meta: &Metadata) -> Result<()> {
    let text = serde_json::to_string_pretty(meta)?;
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(())
}

/// Writes every snapshot plus the metadata sidecar into `dir`; returns the
/// paths written, snapshots first.
pub fn write_run(dir: &Path, out: &RunOutput) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    let stem = format!("{}_{}", out.metadata.label, out.metadata.scheme);
    let mut paths = Vec::new();
    for snap in &out.snapshots {
        let path = dir.join(format!("{stem}_t{}.csv", fmt_f64(snap.time)));
        write_snapshot_csv(&path, snap)?;
        paths.push(path);
    }
    let meta_path = dir.join(format!("{stem}_meta.json"));
    write_metadata_json(&meta_path, &out.metadata)?;
    paths.push(meta_path);
    Ok(paths)
}
