//! Snapshot CSV (`t,x,f`) and run manifest JSON.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::model::FpModel1D;
use super::solver::{Snapshot, SolverConfig};
use crate::density::Grid1D;
use crate::error::{Error, Result};
use crate::hash::spec_hash;
use crate::scalar::{to_f64, Real};

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// One `t,x,f` row per cell and snapshot.
pub fn write_snapshots_csv<T: Real, W: Write>(snaps: &[Snapshot<T>], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["t", "x", "f"]).map_err(err)?;
    for s in snaps {
        let t = s.t.to_string();
        for (x, f) in s.density.grid().centers().into_iter().zip(s.density.values()) {
            w.write_record([t.as_str(), &to_f64(x).to_string(), &to_f64(*f).to_string()])
                .map_err(err)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SnapshotDiagnostics {
    pub t: f64,
    pub mass: f64,
    pub mean: f64,
    pub min: f64,
}

/// Record of a solver run: inputs, their hash and per-snapshot diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub model: FpModel1D,
    pub config: SolverConfig,
    pub grid: Grid1D<f64>,
    pub initial: serde_json::Value,
    pub config_hash: String,
    pub diagnostics: Vec<SnapshotDiagnostics>,
}

impl RunManifest {
    pub fn new<T: Real>(
        model: FpModel1D,
        config: SolverConfig,
        grid: Grid1D<f64>,
        initial: serde_json::Value,
        snaps: &[Snapshot<T>],
    ) -> Self {
        let config_hash = spec_hash(&(&model, &config, &grid, &initial));
        Self {
            schema_version: MANIFEST_SCHEMA_VERSION,
            model,
            config,
            grid,
            initial,
            config_hash,
            diagnostics: snaps
                .iter()
                .map(|s| SnapshotDiagnostics {
                    t: s.t,
                    mass: s.mass,
                    mean: s.mean,
                    min: s.min,
                })
                .collect(),
        }
    }
}

pub fn write_manifest<W: Write>(m: &RunManifest, out: W) -> Result<()> {
    serde_json::to_writer_pretty(out, m).map_err(|e| Error::Io(e.to_string()))
}
