//! Finite-volume solvers for one-dimensional Fokker–Planck equations.

mod io;
mod model;
mod solver;

pub use io::{write_manifest, write_snapshots_csv, RunManifest, SnapshotDiagnostics};
pub use model::FpModel1D;
pub use solver::{evolve, step, FpSolver, Snapshot, SolverConfig, NEGATIVE_TOLERANCE};
