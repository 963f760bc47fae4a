use serde::{Deserialize, Serialize};

use super::trace::DecayTrace;
use crate::error::{Error, Result};

pub const MIN_FIT_POINTS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FitKind {
    /// `log value` against `t`.
    Exponential,
    /// `log value` against `log t`.
    Power,
}

/// Which samples enter a fit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitWindow {
    pub t_min: f64,
    pub t_max: f64,
    /// Samples stop counting once `value < floor_factor * err`.
    pub floor_factor: f64,
}

impl Default for FitWindow {
    fn default() -> Self {
        Self {
            t_min: 0.0,
            t_max: f64::INFINITY,
            floor_factor: 10.0,
        }
    }
}

impl FitWindow {
    pub fn from(t_min: f64) -> Self {
        Self {
            t_min,
            ..Self::default()
        }
    }
}

/// Least-squares line through the log-transformed samples.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateFit {
    pub kind: FitKind,
    pub slope: f64,
    pub intercept: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub rms: f64,
    pub points: usize,
}

pub fn fit_rate(trace: &DecayTrace, kind: FitKind) -> Result<RateFit> {
    fit_rate_in(trace, kind, FitWindow::default())
}

pub fn fit_rate_in(trace: &DecayTrace, kind: FitKind, window: FitWindow) -> Result<RateFit> {
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ts = Vec::new();
    for p in &trace.points {
        if p.t < window.t_min || p.t > window.t_max {
            continue;
        }
        if !(p.value > 0.0) || p.value < window.floor_factor * p.err {
            break;
        }
        let x = match kind {
            FitKind::Exponential => p.t,
            FitKind::Power => {
                if p.t <= 0.0 {
                    continue;
                }
                p.t.ln()
            }
        };
        xs.push(x);
        ys.push(p.value.ln());
        ts.push(p.t);
    }
    if xs.len() < MIN_FIT_POINTS {
        return Err(Error::InsufficientPoints {
            found: xs.len(),
            required: MIN_FIT_POINTS,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    Ok(RateFit {
        kind,
        slope,
        intercept,
        t_lo: ts[0],
        t_hi: *ts.last().expect("nonempty"),
        rms,
        points: xs.len(),
    })
}
