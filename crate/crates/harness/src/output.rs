//! Result files. Everything is written to a temporary file in the target
//! directory and renamed into place.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::HarnessError;
use crate::run::{Placement, SweepRecord};

pub const RESULT_FILE: &str = "result.json";
pub const PLACEMENT_FILE: &str = "placement.csv";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const TIMING_FILE: &str = "timing.json";

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), HarnessError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| HarnessError::Io(e.error))?;
    Ok(())
}

pub fn to_json<T: Serialize>(value: &T) -> Vec<u8> {
    let mut out = serde_json::to_vec_pretty(value).expect("records serialize");
    out.push(b'\n');
    out
}

pub fn write_json<T: Serialize>(
    dir: &Path,
    name: &str,
    value: &T,
) -> Result<PathBuf, HarnessError> {
    let path = dir.join(name);
    write_atomic(&path, &to_json(value))?;
    Ok(path)
}

#[derive(Serialize)]
struct PlacementRow {
    index: usize,
    r_m: f64,
    theta_rad: f64,
    x_m: f64,
    y_m: f64,
    marginal_gain: f64,
}

/// One row per chosen surface, in pick order.
pub fn placement_csv(placement: &Placement) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for s in &placement.sites {
        w.serialize(PlacementRow {
            index: s.index,
            r_m: s.range_m,
            theta_rad: s.theta_rad,
            x_m: s.x_m,
            y_m: s.y_m,
            marginal_gain: s.marginal_gain,
        })
        .expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

#[derive(Serialize)]
struct SweepCsvRow {
    #[serde(rename = "M")]
    m: usize,
    f_greedy: f64,
    f_random_mean: f64,
    f_random_std: f64,
    bound_tight: f64,
    bound_loose: f64,
}

/// One row per budget.
pub fn sweep_csv(record: &SweepRecord) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in &record.rows {
        w.serialize(SweepCsvRow {
            m: r.m,
            f_greedy: r.f_greedy,
            f_random_mean: r.f_random_mean,
            f_random_std: r.f_random_std,
            bound_tight: r.bound_tight,
            bound_loose: r.bound_loose,
        })
        .expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}
