use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::metrics::Form;

/// One sample of a metric along an evolution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub t: f64,
    pub value: f64,
    pub err: f64,
    /// Value of the predicted law or envelope at `t`, when there is one.
    pub predicted: Option<f64>,
}

/// Time series of a distance between an evolving law and a reference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayTrace {
    pub run_id: String,
    pub metric: String,
    pub alpha: Option<f64>,
    pub dim: usize,
    pub form: Form,
    pub model: String,
    pub config_hash: String,
    pub points: Vec<TracePoint>,
}

impl DecayTrace {
    pub fn new(metric: impl Into<String>, alpha: Option<f64>, dim: usize, form: Form, model: impl Into<String>) -> Self {
        Self {
            run_id: String::new(),
            metric: metric.into(),
            alpha,
            dim,
            form,
            model: model.into(),
            config_hash: String::new(),
            points: Vec::new(),
        }
    }

    /// Stamps provenance; the run id is the first twelve hex digits of the hash.
    pub fn with_provenance(mut self, config_hash: String) -> Self {
        self.run_id = config_hash.chars().take(12).collect();
        self.config_hash = config_hash;
        self
    }

    pub fn push(&mut self, t: f64, value: f64, err: f64) -> Result<()> {
        if let Some(last) = self.points.last() {
            if !(t > last.t) {
                return Err(invalid("t", format!("times must increase ({} after {})", t, last.t)));
            }
        }
        if !value.is_finite() {
            return Err(invalid("value", format!("non-finite value at t = {t}")));
        }
        self.points.push(TracePoint {
            t,
            value: value.max(0.0),
            err: err.abs(),
            predicted: None,
        });
        Ok(())
    }

    pub fn times(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.t).collect()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    /// Attaches predicted values, one per point.
    pub fn annotate(&mut self, predicted: &[f64]) -> Result<()> {
        if predicted.len() != self.points.len() {
            return Err(Error::IncompatiblePrediction(format!(
                "{} predicted values for {} samples",
                predicted.len(),
                self.points.len()
            )));
        }
        for (p, &v) in self.points.iter_mut().zip(predicted) {
            p.predicted = Some(v);
        }
        Ok(())
    }

    pub fn is_nonincreasing(&self, rel_tol: f64) -> bool {
        self.points
            .windows(2)
            .all(|w| w[1].value <= w[0].value * (1.0 + rel_tol) + w[0].err + w[1].err)
    }
}

/// Writes traces as `run_id,t,metric,alpha,value,err` rows.
pub fn write_traces_csv<W: Write>(traces: &[DecayTrace], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["run_id", "t", "metric", "alpha", "value", "err"]).map_err(err)?;
    for tr in traces {
        let alpha = tr.alpha.map(|a| a.to_string()).unwrap_or_default();
        for p in &tr.points {
            w.write_record([
                tr.run_id.as_str(),
                &p.t.to_string(),
                tr.metric.as_str(),
                &alpha,
                &p.value.to_string(),
                &p.err.to_string(),
            ])
            .map_err(err)?;
        }
    }
    w.flush()?;
    Ok(())
}
