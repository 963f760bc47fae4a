//! Decay traces, rate fits, prediction checks and the experiment suite.

mod experiment;
mod fit;
mod predict;
pub mod suite;
mod trace;

pub use experiment::{run_experiment, Experiment, InitialData, TraceMetric};
pub use fit::{fit_rate, fit_rate_in, FitKind, FitWindow, RateFit, MIN_FIT_POINTS};
pub use predict::{check_prediction, Prediction, PredictionCheck, EXACT_TOLERANCE, PDE_TOLERANCE};
pub use trace::{write_traces_csv, DecayTrace, TracePoint};
