use serde::{Deserialize, Serialize};

use super::fit::{fit_rate_in, FitKind, FitWindow, RateFit};
use super::trace::DecayTrace;
use crate::error::{Error, Result};

/// Default tolerance for traces produced by PDE solvers.
pub const PDE_TOLERANCE: f64 = 0.1;
/// Default tolerance for traces of exact evolutions.
pub const EXACT_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Prediction {
    /// Decay at least as fast as `e^{-rate t}`: passes iff `slope <= -rate (1 - tol)`.
    AtLeastRate { rate: f64 },
    /// Decay exactly like `e^{-rate t}`: passes iff `|slope + rate| <= tol rate`.
    ExactRate { rate: f64 },
    /// Pointwise upper envelope, one value per sample.
    Envelope { values: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionCheck {
    pub passed: bool,
    /// Positive when passing; relative distance to the pass/fail threshold.
    pub margin: f64,
    pub fit: Option<RateFit>,
    pub tolerance: f64,
}

/// Compares a trace with a predicted rate or envelope.
///
/// Rate fits skip the first relaxation time `t < 1/rate` and stop at ten times
/// the error floor of the trace.
pub fn check_prediction(trace: &DecayTrace, prediction: &Prediction, tol: f64) -> Result<PredictionCheck> {
    match prediction {
        Prediction::AtLeastRate { rate } | Prediction::ExactRate { rate } => {
            if !(*rate > 0.0) {
                return Err(Error::IncompatiblePrediction(format!("rate must be positive, got {rate}")));
            }
            let t0 = trace.points.first().map_or(0.0, |p| p.t);
            let fit = fit_rate_in(trace, FitKind::Exponential, FitWindow::from(t0 + 1.0 / rate))?;
            let (passed, margin) = match prediction {
                Prediction::AtLeastRate { .. } => {
                    let threshold = -rate * (1.0 - tol);
                    (fit.slope <= threshold, (threshold - fit.slope) / rate)
                }
                _ => {
                    let dev = (fit.slope + rate).abs() / rate;
                    (dev <= tol, (tol - dev) / tol)
                }
            };
            Ok(PredictionCheck {
                passed,
                margin,
                fit: Some(fit),
                tolerance: tol,
            })
        }
        Prediction::Envelope { values } => {
            if values.len() != trace.points.len() {
                return Err(Error::IncompatiblePrediction(format!(
                    "envelope has {} values for {} samples",
                    values.len(),
                    trace.points.len()
                )));
            }
            let mut margin = f64::INFINITY;
            for (p, &env) in trace.points.iter().zip(values) {
                let cap = env * (1.0 + tol);
                let m = if cap > 0.0 { (cap - p.value) / cap } else { -p.value };
                margin = margin.min(m);
            }
            Ok(PredictionCheck {
                passed: margin >= 0.0,
                margin,
                fit: None,
                tolerance: tol,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::Form;

    fn synthetic(f: impl Fn(f64) -> f64, count: usize, dt: f64) -> DecayTrace {
        let mut tr = DecayTrace::new("synthetic", None, 1, Form::Cdf, "none");
        for k in 0..count {
            let t = k as f64 * dt;
            tr.push(t, f(t), 0.0).unwrap();
        }
        tr
    }

    #[test]
    fn rate_claims() {
        let tr = synthetic(|t| 3.0 * (-2.5 * t).exp(), 40, 0.1);
        let at_least = check_prediction(&tr, &Prediction::AtLeastRate { rate: 2.0 }, PDE_TOLERANCE).unwrap();
        assert!(at_least.passed && at_least.margin > 0.0);
        let too_fast = check_prediction(&tr, &Prediction::AtLeastRate { rate: 3.0 }, PDE_TOLERANCE).unwrap();
        assert!(!too_fast.passed && too_fast.margin < 0.0);
        let exact = check_prediction(&tr, &Prediction::ExactRate { rate: 2.5 }, EXACT_TOLERANCE).unwrap();
        assert!(exact.passed);
        assert!((exact.fit.unwrap().t_lo - 0.4).abs() < 1e-12);
    }

    #[test]
    fn envelope_claims() {
        let tr = synthetic(|t| 1.0 / (1.0 + t), 6, 1.0);
        let env: Vec<f64> = tr.points.iter().map(|p| 1.0 / (1.0 + 0.9 * p.t)).collect();
        assert!(check_prediction(&tr, &Prediction::Envelope { values: env.clone() }, 0.0).unwrap().passed);
        let low: Vec<f64> = env.iter().map(|v| v * 0.5).collect();
        assert!(!check_prediction(&tr, &Prediction::Envelope { values: low }, 0.1).unwrap().passed);
        assert!(matches!(
            check_prediction(&tr, &Prediction::Envelope { values: env[..3].to_vec() }, 0.1),
            Err(Error::IncompatiblePrediction(_))
        ));
        assert!(check_prediction(&tr, &Prediction::AtLeastRate { rate: -1.0 }, 0.1).is_err());
    }
}
