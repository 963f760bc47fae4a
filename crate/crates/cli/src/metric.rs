//! The `metric` subcommand.

use clap::{Args, ValueEnum};
use edecay::density::GridDensity1D;
use edecay::metrics::{
    cramer_cdf, cramer_expectation, cramer_fourier, d1_metric, energy_alpha_fourier, energy_alpha_grid,
    energy_alpha_pairwise, energy_negative_fourier, energy_negative_order, gini, DistanceValue, Form, KernelRule,
};
use edecay::Error;
use serde::Serialize;

use crate::source::{common_grid, parse_source, Source};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricKind {
    Cramer,
    Energy,
    EnergyNegative,
    D1,
    Gini,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormChoice {
    All,
    Cdf,
    Fourier,
    Expectation,
    Pairwise,
}

impl FormChoice {
    fn admits(self, f: Form) -> bool {
        match self {
            FormChoice::All => true,
            FormChoice::Cdf => f == Form::Cdf,
            FormChoice::Fourier => f == Form::Fourier,
            FormChoice::Expectation => f == Form::Expectation,
            FormChoice::Pairwise => f == Form::Pairwise,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
}

#[derive(Debug, Args)]
pub struct MetricArgs {
    #[arg(long, value_enum)]
    pub kind: MetricKind,
    /// First density: gaussian:m,v  dirac:x  invgamma:mu  beta:m,lambda  barenblatt:p  uniform:a,b  exp:rate  grid:PATH  samples:PATH
    #[arg(long)]
    pub a: String,
    /// Second density (not used by gini).
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, value_enum, default_value = "all")]
    pub form: FormChoice,
    /// Cells of the shared grid for analytic sources.
    #[arg(long, default_value_t = 2048)]
    pub cells: usize,
    /// Quantile points when a law must be turned into a sample cloud.
    #[arg(long, default_value_t = 2000)]
    pub samples: usize,
    #[arg(long, value_enum, default_value = "json")]
    pub format: OutputFormat,
}

#[derive(Debug, Serialize)]
pub struct MetricReport {
    pub kind: MetricKind,
    pub alpha: Option<f64>,
    pub results: Vec<DistanceValue<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gini: Option<edecay::metrics::GiniIndex>,
}

impl MetricReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("kind,form,value,err\n");
        let kind = serde_json::to_value(self.kind).unwrap();
        let kind = kind.as_str().unwrap_or_default();
        if let Some(g) = &self.gini {
            s.push_str(&format!("{kind},pairwise,{},{}\n", g.pairwise, g.discrepancy));
        }
        for r in &self.results {
            let form = serde_json::to_value(r.form).unwrap();
            s.push_str(&format!("{kind},{},{},{}\n", form.as_str().unwrap_or_default(), r.value, r.err));
        }
        s
    }
}

fn need_alpha(args: &MetricArgs) -> Result<f64, Error> {
    args.alpha.ok_or(Error::InvalidParameter {
        name: "alpha",
        reason: "required for this metric".into(),
    })
}

fn both_grids(a: &Source, b: &Source, cells: usize) -> Result<(GridDensity1D<f64>, GridDensity1D<f64>), Error> {
    let grid = common_grid(a, Some(b), cells)?;
    Ok((a.on_grid(&grid)?, b.on_grid(&grid)?))
}

fn griddable(s: &Source) -> bool {
    matches!(s, Source::Grid(_)) || (matches!(s, Source::Analytic(_)) && !s.is_point_mass() && s.dim() == 1)
}

pub fn run_metric(args: &MetricArgs) -> Result<MetricReport, Error> {
    let a = parse_source(&args.a)?;
    let b = match (&args.b, args.kind) {
        (_, MetricKind::Gini) => None,
        (Some(spec), _) => Some(parse_source(spec)?),
        (None, _) => {
            return Err(Error::InvalidParameter {
                name: "b",
                reason: "a second density is required".into(),
            })
        }
    };
    if args.kind == MetricKind::Gini {
        let g = if griddable(&a) {
            gini(&a.on_grid(&common_grid(&a, None, args.cells)?)?.cdf())?
        } else {
            gini(&a.to_cloud(args.samples)?)?
        };
        return Ok(MetricReport {
            kind: args.kind,
            alpha: None,
            results: Vec::new(),
            gini: Some(g),
        });
    }
    let b = b.expect("second source");
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let grids = griddable(&a) && griddable(&b);
    let want = |f: Form| args.form.admits(f);
    let mut results = Vec::new();
    match args.kind {
        MetricKind::Cramer => {
            if grids {
                let (f, g) = both_grids(&a, &b, args.cells)?;
                if want(Form::Cdf) {
                    results.push(cramer_cdf(&f.cdf(), &g.cdf())?);
                }
                if want(Form::Fourier) {
                    results.push(cramer_fourier(&f, &g, None)?);
                }
            }
            if want(Form::Expectation) && (!grids || args.form == FormChoice::Expectation) {
                results.push(cramer_expectation(&a.to_cloud(args.samples)?, &b.to_cloud(args.samples)?)?);
            }
        }
        MetricKind::Energy => {
            let alpha = need_alpha(args)?;
            if grids {
                let (f, g) = both_grids(&a, &b, args.cells)?;
                if want(Form::Pairwise) {
                    results.push(energy_alpha_grid(&f, &g, alpha, KernelRule::CellAverage)?);
                }
                if want(Form::Fourier) {
                    results.push(energy_alpha_fourier(&f, &g, alpha, None)?);
                }
            } else if want(Form::Pairwise) {
                results.push(energy_alpha_pairwise(&a.to_cloud(args.samples)?, &b.to_cloud(args.samples)?, alpha)?);
            }
        }
        MetricKind::EnergyNegative => {
            let alpha = need_alpha(args)?;
            if !grids {
                return Err(Error::Unsupported("negative-order distances need densities on a grid".into()));
            }
            let (f, g) = both_grids(&a, &b, args.cells)?;
            if want(Form::Pairwise) {
                results.push(energy_negative_order(&f, &g, alpha)?);
            }
            if want(Form::Fourier) {
                results.push(energy_negative_fourier(&f, &g, alpha, None)?);
            }
        }
        MetricKind::D1 => {
            if grids {
                let (f, g) = both_grids(&a, &b, args.cells)?;
                results.push(d1_metric(&f, &g, None)?);
            } else {
                results.push(d1_metric(&a.to_cloud(args.samples)?, &b.to_cloud(args.samples)?, None)?);
            }
        }
        MetricKind::Gini => unreachable!(),
    }
    if results.is_empty() {
        return Err(Error::Unsupported("requested form is not available for these sources".into()));
    }
    Ok(MetricReport {
        kind: args.kind,
        alpha: args.alpha,
        results,
        gini: None,
    })
}
