//! The `evolve` subcommand and its declarative run configuration.

use std::fs::{self, File};
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use clap::Args;
use edecay::decay::InitialData;
use edecay::density::io::write_density_csv;
use edecay::density::{GridDensity1D, IsoGaussianMixture, MASS_TOLERANCE};
use edecay::exact_nd::{evolve_exact, LinearFlow};
use edecay::fp1d::{write_manifest, write_snapshots_csv, FpModel1D, FpSolver, RunManifest, SolverConfig};
use edecay::Error;
use serde::{Deserialize, Serialize};

use crate::source::{parse_source, Source};

pub const EXACT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSection {
    pub name: Option<String>,
    pub sigma: Option<f64>,
    pub lambda: Option<f64>,
    pub m: Option<f64>,
    pub p: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    pub cells: Option<usize>,
    pub dt: Option<f64>,
    pub t_final: Option<f64>,
    pub stride: Option<usize>,
    pub theta: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    /// `equilibrium` or a density source.
    pub source: Option<String>,
    pub tail_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExactSection {
    pub flow: LinearFlow,
    /// `(weight, mean, var)` triples.
    pub components: Vec<(f64, Vec<f64>, f64)>,
    pub times: Vec<f64>,
}

/// Declarative run document; every field may also come from a flag.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub model: ModelSection,
    #[serde(default)]
    pub solver: SolverSection,
    #[serde(default)]
    pub initial: InitialSection,
    pub exact: Option<ExactSection>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// constant_diffusion, porous_medium, wealth or opinion.
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long)]
    pub sigma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub m: Option<f64>,
    #[arg(long)]
    pub p: Option<f64>,
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_final: Option<f64>,
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// `equilibrium` or a density source such as gaussian:0.2,0.01.
    #[arg(long)]
    pub initial: Option<String>,
    #[arg(long)]
    pub tail_tolerance: Option<f64>,
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::Parse(e.to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(parse_err)
    }

    pub fn apply(&mut self, a: &EvolveArgs, out: Option<&PathBuf>) {
        fn set<T: Clone>(slot: &mut Option<T>, v: &Option<T>) {
            if v.is_some() {
                *slot = v.clone();
            }
        }
        set(&mut self.out, &out.cloned());
        set(&mut self.model.name, &a.model);
        set(&mut self.model.sigma, &a.sigma);
        set(&mut self.model.lambda, &a.lambda);
        set(&mut self.model.m, &a.m);
        set(&mut self.model.p, &a.p);
        set(&mut self.solver.cells, &a.cells);
        set(&mut self.solver.dt, &a.dt);
        set(&mut self.solver.t_final, &a.t_final);
        set(&mut self.solver.stride, &a.stride);
        set(&mut self.solver.theta, &a.theta);
        set(&mut self.initial.source, &a.initial);
        set(&mut self.initial.tail_tolerance, &a.tail_tolerance);
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("edecay-run"))
    }

    /// Model with defaults filled in; parameters foreign to the model are rejected.
    pub fn model(&self) -> Result<FpModel1D, Error> {
        let s = &self.model;
        let name = s.name.as_deref().unwrap_or("opinion");
        let allowed: &[&str] = match name {
            "constant_diffusion" => &["sigma"],
            "porous_medium" => &["p"],
            "wealth" => &["sigma", "lambda"],
            "opinion" => &["lambda", "m"],
            other => {
                return Err(Error::InvalidParameter {
                    name: "model",
                    reason: format!("unknown model `{other}`"),
                })
            }
        };
        for (key, v) in [("sigma", s.sigma), ("lambda", s.lambda), ("m", s.m), ("p", s.p)] {
            if v.is_some() && !allowed.contains(&key) {
                return Err(Error::Parse(format!("parameter `{key}` does not apply to model `{name}`")));
            }
        }
        let model = match name {
            "constant_diffusion" => FpModel1D::ConstantDiffusion {
                sigma: s.sigma.unwrap_or(1.0),
            },
            "porous_medium" => FpModel1D::PorousMedium { p: s.p.unwrap_or(2.0) },
            "wealth" => FpModel1D::Wealth {
                sigma: s.sigma.unwrap_or(1.0),
                lambda: s.lambda.unwrap_or(1.0),
            },
            _ => FpModel1D::Opinion {
                lambda: s.lambda.unwrap_or(1.0),
                m: s.m.unwrap_or(0.0),
            },
        };
        model.validate()?;
        Ok(model)
    }

    pub fn solver(&self) -> Result<(usize, SolverConfig), Error> {
        let d = SolverConfig::default();
        let s = &self.solver;
        let cfg = SolverConfig {
            dt: s.dt.unwrap_or(d.dt),
            t_final: s.t_final.unwrap_or(d.t_final),
            stride: s.stride.unwrap_or(d.stride),
            theta: s.theta.unwrap_or(d.theta),
        };
        cfg.validate()?;
        Ok((s.cells.unwrap_or(512), cfg))
    }

    /// Starting density and the record of where it came from.
    pub fn initial(&self, solver: &FpSolver) -> Result<(GridDensity1D<f64>, serde_json::Value), Error> {
        let spec = self.initial.source.as_deref().unwrap_or("equilibrium");
        let record = serde_json::json!({ "source": spec, "tail_tolerance": self.initial.tail_tolerance });
        let data = if spec == "equilibrium" {
            InitialData::Equilibrium
        } else {
            match parse_source(spec)? {
                Source::Analytic(density) => InitialData::Analytic {
                    density,
                    tail_tolerance: self.initial.tail_tolerance,
                },
                Source::Grid(f) if f.grid() == solver.grid() => return Ok((f, record)),
                Source::Grid(_) => return Err(Error::GridMismatch),
                Source::Samples(_) => {
                    return Err(Error::Unsupported("sample clouds cannot start a solver run".into()))
                }
            }
        };
        Ok((data.rasterize(solver)?, record))
    }
}

#[derive(Debug, Serialize)]
pub struct EvolveSummary {
    pub out: PathBuf,
    pub model: String,
    pub snapshots: usize,
    pub max_mass_error: f64,
    pub min_density: f64,
    pub config_hash: String,
}

fn create(path: &Path) -> Result<BufWriter<File>, Error> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?))
}

pub fn run_evolve(cfg: &RunConfig) -> Result<EvolveSummary, Error> {
    let out = cfg.out_dir();
    if let Some(exact) = &cfg.exact {
        return run_exact(exact, &out);
    }
    let model = cfg.model()?;
    let (cells, solver_cfg) = cfg.solver()?;
    let solver = FpSolver::with_default_grid(model, cells, solver_cfg)?;
    let (f0, record) = cfg.initial(&solver)?;
    let snaps = solver.evolve(&f0)?;
    let manifest = RunManifest::new(model, solver_cfg, *solver.grid(), record, &snaps);
    fs::create_dir_all(&out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    write_snapshots_csv(&snaps, create(&out.join("snapshots.csv"))?)?;
    write_manifest(&manifest, create(&out.join("manifest.json"))?)?;
    let last = snaps.last().expect("at least the initial snapshot");
    write_density_csv(&last.density, create(&out.join("final.csv"))?)?;
    let max_mass_error = snaps.iter().map(|s| (s.mass - 1.0).abs()).fold(0.0, f64::max);
    if max_mass_error > MASS_TOLERANCE {
        return Err(Error::MassNotNormalized {
            mass: 1.0 + max_mass_error,
            tolerance: MASS_TOLERANCE,
        });
    }
    Ok(EvolveSummary {
        out,
        model: model.name().into(),
        snapshots: snaps.len(),
        max_mass_error,
        min_density: snaps.iter().map(|s| s.min).fold(f64::INFINITY, f64::min),
        config_hash: manifest.config_hash,
    })
}

#[derive(Debug, Serialize)]
struct ExactState {
    t: f64,
    state: IsoGaussianMixture,
}

#[derive(Debug, Serialize)]
struct ExactRecord<'a> {
    schema_version: u32,
    flow: LinearFlow,
    initial: &'a IsoGaussianMixture,
    config_hash: String,
    states: Vec<ExactState>,
}

fn run_exact(exact: &ExactSection, out: &Path) -> Result<EvolveSummary, Error> {
    let initial = IsoGaussianMixture::new(exact.components.clone())?;
    if exact.times.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::InvalidParameter {
            name: "times",
            reason: "must be finite and nonnegative".into(),
        });
    }
    let states = exact
        .times
        .iter()
        .map(|&t| Ok(ExactState { t, state: evolve_exact(exact.flow, &initial, t)? }))
        .collect::<Result<Vec<_>, Error>>()?;
    let record = ExactRecord {
        schema_version: EXACT_SCHEMA_VERSION,
        flow: exact.flow,
        initial: &initial,
        config_hash: edecay::hash::spec_hash(exact),
        states,
    };
    fs::create_dir_all(out).map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
    serde_json::to_writer_pretty(create(&out.join("exact.json"))?, &record).map_err(|e| Error::Io(e.to_string()))?;
    Ok(EvolveSummary {
        out: out.to_path_buf(),
        model: exact.flow.name().into(),
        snapshots: record.states.len(),
        max_mass_error: 0.0,
        min_density: 0.0,
        config_hash: record.config_hash,
    })
}
