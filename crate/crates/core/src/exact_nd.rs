//! Closed-form evolutions in `R^n` of isotropic Gaussian and point-mass data under
//!
//! * drift `f_t = div(x f)`,
//! * heat `f_t = Lap f`,
//! * linear Fokker–Planck `f_t = Lap f + div(x f)`,
//!
//! and checks of the corresponding energy-distance decay laws.

use serde::{Deserialize, Serialize};

use crate::decay::DecayTrace;
use crate::density::IsoGaussianMixture;
use crate::error::{invalid, Error, Result};
use crate::hash::spec_hash;
use crate::metrics::{
    check_negative_order, d1_metric, energy_alpha_fourier, energy_alpha_mixture, energy_negative_fourier,
    energy_negative_mixture, DistanceValue, Form, MetricConstants,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinearFlow {
    Drift,
    Heat,
    FullFp,
}

impl LinearFlow {
    /// Image of `(mean, var)` after time `t`.
    pub fn map(self, mean: &[f64], var: f64, t: f64) -> (Vec<f64>, f64) {
        let e = (-t).exp();
        match self {
            LinearFlow::Drift => (mean.iter().map(|m| m * e).collect(), var * e * e),
            LinearFlow::Heat => (mean.to_vec(), var + 2.0 * t),
            LinearFlow::FullFp => (mean.iter().map(|m| m * e).collect(), 1.0 + (var - 1.0) * e * e),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LinearFlow::Drift => "drift",
            LinearFlow::Heat => "heat",
            LinearFlow::FullFp => "full_fp",
        }
    }
}

/// `N(mean, var I)`; `var = 0` is a point mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianState {
    pub mean: Vec<f64>,
    pub var: f64,
}

impl GaussianState {
    pub fn new(mean: Vec<f64>, var: f64) -> Result<Self> {
        if mean.is_empty() || mean.iter().any(|m| !m.is_finite()) {
            return Err(invalid("mean", "needs at least one finite coordinate"));
        }
        if !(var.is_finite() && var >= 0.0) {
            return Err(invalid("var", format!("must be finite and nonnegative, got {var}")));
        }
        Ok(Self { mean, var })
    }

    pub fn standard(n: usize) -> Self {
        Self {
            mean: vec![0.0; n],
            var: 1.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn evolve(&self, flow: LinearFlow, t: f64) -> Result<Self> {
        check_time(t)?;
        let (mean, var) = flow.map(&self.mean, self.var, t);
        Ok(Self { mean, var })
    }

    pub fn to_mixture(&self) -> IsoGaussianMixture {
        IsoGaussianMixture::single(self.mean.clone(), self.var).expect("validated state")
    }
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("time must be finite and nonnegative, got {t}")));
    }
    Ok(())
}

/// Evolves every component of a mixture; point masses spread under `Heat` and `FullFp`.
pub fn evolve_exact(flow: LinearFlow, state: &IsoGaussianMixture, t: f64) -> Result<IsoGaussianMixture> {
    check_time(t)?;
    Ok(state.map_components(|m, v| flow.map(m, v, t)))
}

/// How energy distances between mixtures are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExactBackend {
    /// Radial Fourier quadrature of the closed-form characteristic functions.
    #[default]
    Fourier,
    /// Closed-form kernel expectations.
    Expectation,
}

impl ExactBackend {
    pub fn energy(self, f: &IsoGaussianMixture, g: &IsoGaussianMixture, alpha: f64) -> Result<DistanceValue> {
        match self {
            // Point masses have no decaying spectrum; the expectation form is exact for them.
            ExactBackend::Fourier if f.min_var() > 0.0 || g.min_var() > 0.0 => energy_alpha_fourier(f, g, alpha, None),
            _ => energy_alpha_mixture(f, g, alpha),
        }
    }

    pub fn energy_negative(self, f: &IsoGaussianMixture, g: &IsoGaussianMixture, alpha: f64) -> Result<DistanceValue> {
        match self {
            ExactBackend::Fourier if f.min_var() > 0.0 || g.min_var() > 0.0 => {
                energy_negative_fourier(f, g, alpha, None)
            }
            _ => energy_negative_mixture(f, g, alpha),
        }
    }

    fn form(self) -> Form {
        match self {
            ExactBackend::Fourier => Form::Fourier,
            ExactBackend::Expectation => Form::Expectation,
        }
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    for &t in times {
        check_time(t)?;
    }
    if times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(invalid("times", "must be strictly increasing"));
    }
    Ok(())
}

fn same_dim(f: &IsoGaussianMixture, g: &IsoGaussianMixture) -> Result<usize> {
    if f.dim() != g.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            found: g.dim(),
        });
    }
    Ok(f.dim())
}

#[derive(Serialize)]
struct CheckSpec<'a> {
    check: &'a str,
    alpha: f64,
    f0: &'a IsoGaussianMixture,
    g0: &'a IsoGaussianMixture,
    times: &'a [f64],
    backend: ExactBackend,
}

fn new_trace(
    check: &str,
    flow: LinearFlow,
    alpha: f64,
    f0: &IsoGaussianMixture,
    g0: &IsoGaussianMixture,
    times: &[f64],
    backend: ExactBackend,
) -> DecayTrace {
    let hash = spec_hash(&CheckSpec {
        check,
        alpha,
        f0,
        g0,
        times,
        backend,
    });
    DecayTrace::new("energy_alpha", Some(alpha), f0.dim(), backend.form(), flow.name()).with_provenance(hash)
}

/// `E_alpha(f(t), g(t))` under the drift flow, annotated with `e^{-alpha t} E_alpha(0)`.
pub fn drift_decay_check(
    alpha: f64,
    f0: &IsoGaussianMixture,
    g0: &IsoGaussianMixture,
    times: &[f64],
    backend: ExactBackend,
) -> Result<DecayTrace> {
    same_dim(f0, g0)?;
    check_times(times)?;
    let flow = LinearFlow::Drift;
    let e0 = backend.energy(f0, g0, alpha)?.value;
    let mut trace = new_trace("drift", flow, alpha, f0, g0, times, backend);
    let mut predicted = Vec::with_capacity(times.len());
    for &t in times {
        let v = backend.energy(&evolve_exact(flow, f0, t)?, &evolve_exact(flow, g0, t)?, alpha)?;
        trace.push(t, v.value, v.err)?;
        predicted.push((-alpha * t).exp() * e0);
    }
    trace.annotate(&predicted)?;
    Ok(trace)
}

/// Both sides of `dE_alpha/dt = -2 alpha (n-2+alpha) E_{-(2-alpha)} - alpha E_alpha`
/// along the Fokker–Planck flow towards the standard Gaussian.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub trace: DecayTrace,
    pub derivative: Vec<f64>,
    pub rhs: Vec<f64>,
    pub e_negative: Vec<f64>,
}

impl IdentityCheck {
    /// Largest `|dE/dt - rhs| / |rhs|` over samples with `t >= t_min`; absolute where `rhs = 0`.
    pub fn max_relative_error(&self, t_min: f64) -> f64 {
        self.trace
            .points
            .iter()
            .zip(self.derivative.iter().zip(&self.rhs))
            .filter(|(p, _)| p.t >= t_min)
            .map(|(_, (d, r))| {
                let diff = (d - r).abs();
                if *r == 0.0 {
                    diff
                } else {
                    diff / r.abs()
                }
            })
            .fold(0.0, f64::max)
    }
}

/// Central-difference step used for the time derivative at `t`.
pub fn derivative_step(t: f64) -> f64 {
    (t * 1e-3).max(1e-6)
}

pub fn fp_decay_check(alpha: f64, f0: &IsoGaussianMixture, times: &[f64], backend: ExactBackend) -> Result<IdentityCheck> {
    let n = f0.dim();
    check_negative_order(n, alpha)?;
    check_times(times)?;
    let flow = LinearFlow::FullFp;
    let target = GaussianState::standard(n).to_mixture();
    let mut trace = new_trace("full_fp", flow, alpha, f0, &target, times, backend);
    let energy = |t: f64| -> Result<DistanceValue> { backend.energy(&evolve_exact(flow, f0, t)?, &target, alpha) };
    let factor = 2.0 * alpha * (n as f64 - 2.0 + alpha);
    let mut derivative = Vec::with_capacity(times.len());
    let mut rhs = Vec::with_capacity(times.len());
    let mut e_negative = Vec::with_capacity(times.len());
    for &t in times {
        let ft = evolve_exact(flow, f0, t)?;
        let e = backend.energy(&ft, &target, alpha)?;
        let en = backend.energy_negative(&ft, &target, alpha)?.value;
        let dt = derivative_step(t);
        let d = if t >= dt {
            (energy(t + dt)?.value - energy(t - dt)?.value) / (2.0 * dt)
        } else {
            (energy(t + dt)?.value - e.value) / dt
        };
        trace.push(t, e.value, e.err)?;
        derivative.push(d);
        rhs.push(-factor * en - alpha * e.value);
        e_negative.push(en);
    }
    let e0 = trace.points.first().map_or(0.0, |p| p.value);
    let t0 = times.first().copied().unwrap_or(0.0);
    let predicted: Vec<f64> = times.iter().map(|t| (-alpha * (t - t0)).exp() * e0).collect();
    trace.annotate(&predicted)?;
    Ok(IdentityCheck {
        trace,
        derivative,
        rhs,
        e_negative,
    })
}

/// Heat-flow trace with its polynomial envelope and the `d_1` history.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeatCheck {
    pub trace: DecayTrace,
    pub d1: Vec<f64>,
    pub rate: f64,
    pub envelope_holds: bool,
    pub d1_nonincreasing: bool,
}

/// `(E_0^{-2/(2-alpha)} + 2 C t/(2-alpha))^{-(2-alpha)/2}`, the solution of
/// `y' = -C y^{(4-alpha)/(2-alpha)}` with `y(0) = E_0`.
pub fn heat_envelope(e0: f64, rate: f64, alpha: f64, t: f64) -> f64 {
    if e0 <= 0.0 {
        return 0.0;
    }
    let k = 2.0 - alpha;
    (e0.powf(-2.0 / k) + 2.0 * rate * t / k).powf(-k / 2.0)
}

/// Relative slack allowed when comparing quadrature values against the envelope and
/// when checking that `d_1` does not increase.
pub const HEAT_CHECK_SLACK: f64 = 1e-6;

pub fn heat_decay_check(
    alpha: f64,
    f0: &IsoGaussianMixture,
    g0: &IsoGaussianMixture,
    times: &[f64],
    backend: ExactBackend,
) -> Result<HeatCheck> {
    let n = same_dim(f0, g0)?;
    check_negative_order(n, alpha)?;
    check_times(times)?;
    let flow = LinearFlow::Heat;
    let mut trace = new_trace("heat", flow, alpha, f0, g0, times, backend);
    let e0 = backend.energy(f0, g0, alpha)?.value.max(0.0);
    let d1_0 = d1_metric(f0, g0, None)?.value;
    let rate = if d1_0 > 0.0 {
        MetricConstants::new(n, alpha)?.heat_rate(d1_0)
    } else {
        0.0
    };
    let mut d1 = Vec::with_capacity(times.len());
    let mut envelope = Vec::with_capacity(times.len());
    for &t in times {
        let (ft, gt) = (evolve_exact(flow, f0, t)?, evolve_exact(flow, g0, t)?);
        let e = backend.energy(&ft, &gt, alpha)?;
        trace.push(t, e.value, e.err)?;
        d1.push(d1_metric(&ft, &gt, None)?.value);
        envelope.push(heat_envelope(e0, rate, alpha, t));
    }
    trace.annotate(&envelope)?;
    let envelope_holds = trace
        .points
        .iter()
        .zip(&envelope)
        .all(|(p, env)| p.value <= env * (1.0 + HEAT_CHECK_SLACK) + p.err);
    let d1_nonincreasing = d1
        .windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + HEAT_CHECK_SLACK) + 1e-14);
    Ok(HeatCheck {
        trace,
        d1,
        rate,
        envelope_holds,
        d1_nonincreasing,
    })
}
