use serde::{Deserialize, Serialize};

use super::trace::DecayTrace;
use crate::density::{AnalyticDensity, Grid1D, GridDensity1D, GridDensityNd, GridNd, IsoGaussianMixture};
use crate::error::{invalid, Result};
use crate::exact_nd::{drift_decay_check, fp_decay_check, heat_decay_check, ExactBackend};
use crate::fp1d::{FpModel1D, FpSolver, SolverConfig};
use crate::hash::spec_hash;
use crate::metrics::{cramer_cdf, energy_alpha_grid, Form, KernelRule};

/// Initial datum of a one-dimensional solver run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialData {
    Analytic { density: AnalyticDensity, tail_tolerance: Option<f64> },
    /// Gaussian mixture given as `(weight, mean, var)` triples.
    GaussianMixture { components: Vec<(f64, f64, f64)> },
    /// The rasterized steady state of the model.
    Equilibrium,
}

impl InitialData {
    pub fn rasterize(&self, solver: &FpSolver) -> Result<GridDensity1D<f64>> {
        let grid = *solver.grid();
        match self {
            InitialData::Analytic { density, tail_tolerance } => match tail_tolerance {
                Some(tol) => density.rasterize_with_tolerance(&grid, *tol),
                None => density.rasterize(&grid),
            },
            InitialData::GaussianMixture { components } => {
                let mix = IsoGaussianMixture::new(components.iter().map(|&(w, m, v)| (w, vec![m], v)).collect())?;
                let nd: GridDensityNd<f64> = mix.rasterize(&GridNd::cube(grid, 1), 1e-6)?;
                GridDensity1D::normalized(grid, nd.values().to_vec())
            }
            InitialData::Equilibrium => solver.equilibrium(),
        }
    }
}

/// Distance tracked along a solver run, always against the discrete equilibrium.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TraceMetric {
    Cramer,
    Energy { alpha: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Solver {
        model: FpModel1D,
        initial: InitialData,
        cells: usize,
        #[serde(default)]
        solver: SolverConfig,
        metric: TraceMetric,
    },
    Drift {
        alpha: f64,
        f0: IsoGaussianMixture,
        g0: IsoGaussianMixture,
        times: Vec<f64>,
        #[serde(default)]
        backend: ExactBackend,
    },
    FullFp {
        alpha: f64,
        f0: IsoGaussianMixture,
        times: Vec<f64>,
        #[serde(default)]
        backend: ExactBackend,
    },
    Heat {
        alpha: f64,
        f0: IsoGaussianMixture,
        g0: IsoGaussianMixture,
        times: Vec<f64>,
        #[serde(default)]
        backend: ExactBackend,
    },
}

/// Absolute error floor of a Cramér distance on `grid` given the mass mismatch
/// of the operands; CDF rounding of order `eps * cells` enters squared.
fn cramer_floor(grid: &Grid1D<f64>, mass_gap: f64) -> f64 {
    let width = grid.x_max() - grid.x_min();
    let e = mass_gap + 16.0 * f64::EPSILON * grid.n_cells() as f64;
    width * e * e
}

/// Runs one experiment; traces are deterministic functions of the descriptor.
pub fn run_experiment(spec: &Experiment) -> Result<DecayTrace> {
    let hash = spec_hash(spec);
    match spec {
        Experiment::Solver {
            model,
            initial,
            cells,
            solver,
            metric,
        } => {
            if *cells < 2 {
                return Err(invalid("cells", format!("need at least 2 cells, got {cells}")));
            }
            let s = FpSolver::with_default_grid(*model, *cells, *solver)?;
            let eq = s.equilibrium::<f64>()?;
            let f0 = initial.rasterize(&s)?;
            let snaps = s.evolve(&f0)?;
            let (name, alpha, form) = match metric {
                TraceMetric::Cramer => ("cramer", None, Form::Cdf),
                TraceMetric::Energy { alpha } => ("energy_alpha", Some(*alpha), Form::Pairwise),
            };
            let mut trace = DecayTrace::new(name, alpha, 1, form, model.name()).with_provenance(hash);
            let eq_cdf = eq.cdf();
            for snap in &snaps {
                let gap = (snap.mass - eq.mass()).abs();
                let v = match metric {
                    TraceMetric::Cramer => cramer_cdf(&snap.density.cdf(), &eq_cdf)?,
                    TraceMetric::Energy { alpha } => {
                        energy_alpha_grid(&snap.density, &eq, *alpha, KernelRule::Midpoint)?
                    }
                };
                let floor = cramer_floor(s.grid(), gap) * if alpha.is_some() { 2.0 } else { 1.0 };
                trace.push(snap.t, v.value, v.err + floor)?;
            }
            Ok(trace)
        }
        Experiment::Drift {
            alpha,
            f0,
            g0,
            times,
            backend,
        } => drift_decay_check(*alpha, f0, g0, times, *backend),
        Experiment::FullFp {
            alpha,
            f0,
            times,
            backend,
        } => Ok(fp_decay_check(*alpha, f0, times, *backend)?.trace),
        Experiment::Heat {
            alpha,
            f0,
            g0,
            times,
            backend,
        } => Ok(heat_decay_check(*alpha, f0, g0, times, *backend)?.trace),
    }
}
