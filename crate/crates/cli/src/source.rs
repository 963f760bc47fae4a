//! Density sources named on the command line.

use std::fs::File;
use std::path::Path;

use edecay::density::io::{read_density_csv, read_samples_csv};
use edecay::density::{AnalyticDensity, Grid1D, GridDensity1D, SampleCloud};
use edecay::Error;

/// Quantile cut used to close unbounded supports before rasterizing.
pub const WINDOW_QUANTILE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub enum Source {
    Analytic(AnalyticDensity),
    Grid(GridDensity1D<f64>),
    Samples(SampleCloud<f64>),
}

fn numbers(name: &str, args: &str, count: usize) -> Result<Vec<f64>, Error> {
    let vals = args
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Error::Parse(format!("`{name}:{args}`: {e}")))?;
    if vals.len() != count {
        return Err(Error::Parse(format!("`{name}` takes {count} number(s), got {}", vals.len())));
    }
    Ok(vals)
}

/// Parses `gaussian:m,v`, `dirac:x`, `invgamma:mu`, `beta:m,lambda`, `barenblatt:p`,
/// `uniform:a,b`, `exp:rate`, `grid:PATH` or `samples:PATH`.
pub fn parse_source(spec: &str) -> Result<Source, Error> {
    let (name, args) = spec
        .split_once(':')
        .ok_or_else(|| Error::Parse(format!("`{spec}` is not of the form kind:args")))?;
    let analytic = |d: Result<AnalyticDensity, Error>| d.map(Source::Analytic);
    match name.trim() {
        "gaussian" => {
            let v = numbers(name, args, 2)?;
            analytic(AnalyticDensity::gaussian_1d(v[0], v[1]))
        }
        "dirac" => analytic(AnalyticDensity::dirac(numbers(name, args, 1)?[0])),
        "invgamma" => analytic(AnalyticDensity::inverse_gamma(numbers(name, args, 1)?[0])),
        "beta" => {
            let v = numbers(name, args, 2)?;
            analytic(AnalyticDensity::beta_opinion(v[0], v[1]))
        }
        "barenblatt" => analytic(AnalyticDensity::barenblatt(numbers(name, args, 1)?[0])),
        "uniform" => {
            let v = numbers(name, args, 2)?;
            analytic(AnalyticDensity::uniform(v[0], v[1]))
        }
        "exp" => analytic(AnalyticDensity::exponential(numbers(name, args, 1)?[0])),
        "grid" => read_density_csv(open(args)?).map(Source::Grid),
        "samples" => read_samples_csv(open(args)?).map(Source::Samples),
        other => Err(Error::Parse(format!("unknown density kind `{other}`"))),
    }
}

fn open(path: &str) -> Result<File, Error> {
    File::open(Path::new(path)).map_err(|e| Error::Io(format!("{path}: {e}")))
}

/// Finite window covering all but `WINDOW_QUANTILE` of each tail.
pub fn window(d: &AnalyticDensity) -> Result<(f64, f64), Error> {
    let (lo, hi) = d.support();
    let lo = if lo.is_finite() { lo } else { d.quantile(WINDOW_QUANTILE)? };
    let hi = if hi.is_finite() { hi } else { d.quantile(1.0 - WINDOW_QUANTILE)? };
    Ok((lo, hi))
}

impl Source {
    pub fn is_point_mass(&self) -> bool {
        matches!(self, Source::Analytic(AnalyticDensity::DiracMixture { .. }))
    }

    pub fn dim(&self) -> usize {
        match self {
            Source::Analytic(d) => d.dim(),
            Source::Grid(_) => 1,
            Source::Samples(c) => c.dim(),
        }
    }

    /// Cell density on `grid`; samples and point masses have none.
    pub fn on_grid(&self, grid: &Grid1D<f64>) -> Result<GridDensity1D<f64>, Error> {
        match self {
            Source::Analytic(d) => d.rasterize(grid),
            Source::Grid(f) if f.grid() == grid => Ok(f.clone()),
            Source::Grid(_) => Err(Error::GridMismatch),
            Source::Samples(_) => Err(Error::Unsupported("sample clouds have no grid density".into())),
        }
    }

    /// Sample cloud: point masses exactly, other laws through `n` quantiles.
    pub fn to_cloud(&self, n: usize) -> Result<SampleCloud<f64>, Error> {
        match self {
            Source::Analytic(d) if self.is_point_mass() => d.to_samples(),
            Source::Analytic(d) => d.quantile_cloud(n),
            Source::Grid(f) => edecay::decay::suite::grid_quantile_cloud(f, n),
            Source::Samples(c) => Ok(c.clone()),
        }
    }

    /// Extent on the line, if the source fixes one.
    pub fn extent(&self) -> Result<Option<(f64, f64)>, Error> {
        match self {
            Source::Analytic(d) if d.dim() == 1 && !self.is_point_mass() => window(d).map(Some),
            _ => Ok(None),
        }
    }
}

/// Grid shared by two sources: a grid source fixes it, analytic laws get the union of their windows.
pub fn common_grid(a: &Source, b: Option<&Source>, cells: usize) -> Result<Grid1D<f64>, Error> {
    let all: Vec<&Source> = std::iter::once(a).chain(b).collect();
    if let Some(Source::Grid(f)) = all.iter().find(|s| matches!(s, Source::Grid(_))) {
        return Ok(*f.grid());
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for s in &all {
        if let Some((l, h)) = s.extent()? {
            lo = lo.min(l);
            hi = hi.max(h);
        } else {
            return Err(Error::Unsupported("source cannot be placed on a grid".into()));
        }
    }
    Grid1D::new(lo, hi, cells)
}
