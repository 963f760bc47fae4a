use serde::{Deserialize, Serialize};
use statrs::function::{beta, erf, gamma};

use super::grid::Grid1D;
use super::gridded::GridDensity1D;
use super::mixture::IsoGaussianMixture;
use super::samples::SampleCloud;
use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, Real};
use crate::special::{bisect, gamma_fn, gaussian_abs_moment, ln_gamma, norm_cdf, norm_sf, tanh_sinh};

/// Default bound on the mass a grid window may clip during rasterization.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-6;

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Closed-form probability laws.
///
/// Parameters are validated on construction; serialized form is the
/// [`AnalyticParams`] tagged record, so deserialized values are validated too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AnalyticParams", into = "AnalyticParams")]
pub enum AnalyticDensity {
    /// `N(mean, var * I)` in `R^n`, `n = mean.len()`.
    Gaussian { mean: Vec<f64>, var: f64 },
    /// `(kappa (c^2 - x^2))_+^{1/(p-1)}` with `kappa = (p-1)/(2p)`; `c` fixes unit mass.
    Barenblatt { p: f64, c: f64 },
    /// Inverse Gamma with shape `mu` and unit mean.
    InverseGamma { mu: f64 },
    /// Beta-type law on `(-1, 1)` with mean `m` and diffusion `lambda`.
    BetaOpinion { m: f64, lambda: f64 },
    /// Weighted point masses in `R^n`.
    DiracMixture { points: Vec<Vec<f64>>, weights: Vec<f64> },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
}

/// Serialized parameter record of an [`AnalyticDensity`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum AnalyticParams {
    Gaussian { mean: Vec<f64>, var: f64 },
    Barenblatt { p: f64 },
    InverseGamma { mu: f64 },
    BetaOpinion { m: f64, lambda: f64 },
    DiracMixture { points: Vec<Vec<f64>>, weights: Vec<f64> },
    Uniform { a: f64, b: f64 },
    Exponential { rate: f64 },
}

impl TryFrom<AnalyticParams> for AnalyticDensity {
    type Error = Error;

    fn try_from(p: AnalyticParams) -> Result<Self> {
        match p {
            AnalyticParams::Gaussian { mean, var } => Self::gaussian(mean, var),
            AnalyticParams::Barenblatt { p } => Self::barenblatt(p),
            AnalyticParams::InverseGamma { mu } => Self::inverse_gamma(mu),
            AnalyticParams::BetaOpinion { m, lambda } => Self::beta_opinion(m, lambda),
            AnalyticParams::DiracMixture { points, weights } => Self::dirac_mixture(points, weights),
            AnalyticParams::Uniform { a, b } => Self::uniform(a, b),
            AnalyticParams::Exponential { rate } => Self::exponential(rate),
        }
    }
}

impl From<AnalyticDensity> for AnalyticParams {
    fn from(d: AnalyticDensity) -> Self {
        match d {
            AnalyticDensity::Gaussian { mean, var } => AnalyticParams::Gaussian { mean, var },
            AnalyticDensity::Barenblatt { p, .. } => AnalyticParams::Barenblatt { p },
            AnalyticDensity::InverseGamma { mu } => AnalyticParams::InverseGamma { mu },
            AnalyticDensity::BetaOpinion { m, lambda } => AnalyticParams::BetaOpinion { m, lambda },
            AnalyticDensity::DiracMixture { points, weights } => {
                AnalyticParams::DiracMixture { points, weights }
            }
            AnalyticDensity::Uniform { a, b } => AnalyticParams::Uniform { a, b },
            AnalyticDensity::Exponential { rate } => AnalyticParams::Exponential { rate },
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

/// Exponent `k = 1/(p-1)` and prefactor `kappa = (p-1)/(2p)` of the Barenblatt profile.
fn barenblatt_shape(p: f64) -> (f64, f64) {
    (1.0 / (p - 1.0), (p - 1.0) / (2.0 * p))
}

impl AnalyticDensity {
    pub fn gaussian(mean: Vec<f64>, var: f64) -> Result<Self> {
        if mean.is_empty() {
            return Err(invalid("mean", "needs at least one coordinate"));
        }
        if mean.iter().any(|m| !m.is_finite()) {
            return Err(invalid("mean", "coordinates must be finite"));
        }
        positive("var", var)?;
        Ok(Self::Gaussian { mean, var })
    }

    pub fn gaussian_1d(mean: f64, var: f64) -> Result<Self> {
        Self::gaussian(vec![mean], var)
    }

    /// Barenblatt profile of exponent `p > 1`, normalized to unit mass.
    pub fn barenblatt(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 1.0) {
            return Err(invalid("p", format!("must exceed 1, got {p}")));
        }
        let (k, kappa) = barenblatt_shape(p);
        // mass = kappa^k c^{2k+1} B(1/2, k+1)
        let ln_b = beta::ln_beta(0.5, k + 1.0);
        let c = (-(k * kappa.ln() + ln_b) / (2.0 * k + 1.0)).exp();
        Ok(Self::Barenblatt { p, c })
    }

    pub fn inverse_gamma(mu: f64) -> Result<Self> {
        if !(mu.is_finite() && mu > 1.0) {
            return Err(invalid("mu", format!("must exceed 1, got {mu}")));
        }
        Ok(Self::InverseGamma { mu })
    }

    pub fn beta_opinion(m: f64, lambda: f64) -> Result<Self> {
        if !(m > -1.0 && m < 1.0) {
            return Err(invalid("m", format!("must lie in (-1, 1), got {m}")));
        }
        positive("lambda", lambda)?;
        Ok(Self::BetaOpinion { m, lambda })
    }

    pub fn dirac_mixture(points: Vec<Vec<f64>>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() || points.len() != weights.len() {
            return Err(invalid("weights", "need one weight per point, at least one point"));
        }
        let dim = points[0].len();
        if dim == 0 || points.iter().any(|p| p.len() != dim) {
            return Err(invalid("points", "all points need the same nonzero dimension"));
        }
        if points.iter().flatten().any(|x| !x.is_finite()) {
            return Err(invalid("points", "coordinates must be finite"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(invalid("weights", "must be positive"));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(invalid("weights", format!("must sum to 1, got {total}")));
        }
        Ok(Self::DiracMixture { points, weights })
    }

    /// Unit point mass at `x` on the line.
    pub fn dirac(x: f64) -> Result<Self> {
        Self::dirac_mixture(vec![vec![x]], vec![1.0])
    }

    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(invalid("b", format!("need finite a < b, got [{a}, {b}]")));
        }
        Ok(Self::Uniform { a, b })
    }

    pub fn exponential(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Self::Exponential { rate })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::Gaussian { mean, .. } => mean.len(),
            Self::DiracMixture { points, .. } => points[0].len(),
            _ => 1,
        }
    }

    fn require_1d(&self) -> Result<()> {
        match self.dim() {
            1 => Ok(()),
            found => Err(Error::DimensionMismatch { expected: 1, found }),
        }
    }

    /// Beta parameters of `t = (1 + x)/2`.
    fn beta_params(m: f64, lambda: f64) -> (f64, f64) {
        ((1.0 + m) / lambda, (1.0 - m) / lambda)
    }

    /// Closure of the support on the line.
    pub fn support(&self) -> (f64, f64) {
        match self {
            Self::Barenblatt { c, .. } => (-c, *c),
            Self::InverseGamma { .. } | Self::Exponential { .. } => (0.0, f64::INFINITY),
            Self::BetaOpinion { .. } => (-1.0, 1.0),
            Self::Uniform { a, b } => (*a, *b),
            Self::DiracMixture { points, .. } => {
                let lo = points.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
                let hi = points.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
                (lo, hi)
            }
            Self::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
        }
    }

    /// Mean vector.
    pub fn mean(&self) -> Vec<f64> {
        match self {
            Self::Gaussian { mean, .. } => mean.clone(),
            Self::DiracMixture { points, weights } => {
                let mut m = vec![0.0; points[0].len()];
                for (p, w) in points.iter().zip(weights) {
                    for (mk, pk) in m.iter_mut().zip(p) {
                        *mk += w * pk;
                    }
                }
                m
            }
            Self::Barenblatt { .. } => vec![0.0],
            Self::InverseGamma { .. } => vec![1.0],
            Self::BetaOpinion { m, .. } => vec![*m],
            Self::Uniform { a, b } => vec![0.5 * (a + b)],
            Self::Exponential { rate } => vec![1.0 / rate],
        }
    }

    /// Density on the line; zero outside the support.
    pub fn pdf(&self, x: f64) -> f64 {
        let lp = self.ln_pdf(x);
        if lp == f64::NEG_INFINITY {
            0.0
        } else {
            lp.exp()
        }
    }

    /// Log-density on the line (`-inf` outside the support). Point masses give `-inf` everywhere.
    pub fn ln_pdf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, var } => {
                let z = x - mean[0];
                -0.5 * z * z / var - 0.5 * (2.0 * std::f64::consts::PI * var).ln()
            }
            Self::Barenblatt { p, c } => {
                let (k, kappa) = barenblatt_shape(*p);
                let q = c * c - x * x;
                if q <= 0.0 {
                    f64::NEG_INFINITY
                } else {
                    k * (kappa * q).ln()
                }
            }
            Self::InverseGamma { mu } => {
                if x <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                mu * (mu - 1.0).ln() - ln_gamma(*mu) - (mu - 1.0) / x - (1.0 + mu) * x.ln()
            }
            Self::BetaOpinion { m, lambda } => {
                if x <= -1.0 || x >= 1.0 {
                    return f64::NEG_INFINITY;
                }
                let (a, b) = Self::beta_params(*m, *lambda);
                let t = 0.5 * (1.0 + x);
                (a - 1.0) * t.ln() + (b - 1.0) * (1.0 - t).ln() - beta::ln_beta(a, b) - 2f64.ln()
            }
            Self::Uniform { a, b } => {
                if x < *a || x > *b {
                    f64::NEG_INFINITY
                } else {
                    -(b - a).ln()
                }
            }
            Self::Exponential { rate } => {
                if x < 0.0 {
                    f64::NEG_INFINITY
                } else {
                    rate.ln() - rate * x
                }
            }
            Self::DiracMixture { .. } => f64::NEG_INFINITY,
        }
    }

    /// Distribution function on the line.
    pub fn cdf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, var } => norm_cdf((x - mean[0]) / var.sqrt()),
            Self::Barenblatt { p, c } => {
                if x <= -c {
                    0.0
                } else if x >= *c {
                    1.0
                } else {
                    let k = barenblatt_shape(*p).0;
                    beta::beta_reg(k + 1.0, k + 1.0, 0.5 * (1.0 + x / c))
                }
            }
            Self::InverseGamma { mu } => {
                if x <= 0.0 {
                    0.0
                } else {
                    gamma::gamma_ur(*mu, (mu - 1.0) / x)
                }
            }
            Self::BetaOpinion { m, lambda } => {
                if x <= -1.0 {
                    0.0
                } else if x >= 1.0 {
                    1.0
                } else {
                    let (a, b) = Self::beta_params(*m, *lambda);
                    beta::beta_reg(a, b, 0.5 * (1.0 + x))
                }
            }
            Self::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    -(-rate * x).exp_m1()
                }
            }
            Self::DiracMixture { points, weights } => points
                .iter()
                .zip(weights)
                .filter(|(p, _)| p[0] <= x)
                .map(|(_, w)| w)
                .sum::<f64>()
                .min(1.0),
        }
    }

    /// Survival function `1 - cdf`, accurate in the right tail.
    pub fn sf(&self, x: f64) -> f64 {
        match self {
            Self::Gaussian { mean, var } => norm_sf((x - mean[0]) / var.sqrt()),
            Self::Barenblatt { p, c } => {
                if x <= -c {
                    1.0
                } else if x >= *c {
                    0.0
                } else {
                    let k = barenblatt_shape(*p).0;
                    beta::beta_reg(k + 1.0, k + 1.0, 0.5 * (1.0 - x / c))
                }
            }
            Self::InverseGamma { mu } => {
                if x <= 0.0 {
                    1.0
                } else {
                    gamma::gamma_lr(*mu, (mu - 1.0) / x)
                }
            }
            Self::BetaOpinion { m, lambda } => {
                if x <= -1.0 {
                    1.0
                } else if x >= 1.0 {
                    0.0
                } else {
                    let (a, b) = Self::beta_params(*m, *lambda);
                    beta::beta_reg(b, a, 0.5 * (1.0 - x))
                }
            }
            Self::Uniform { a, b } => ((b - x) / (b - a)).clamp(0.0, 1.0),
            Self::Exponential { rate } => {
                if x <= 0.0 {
                    1.0
                } else {
                    (-rate * x).exp()
                }
            }
            Self::DiracMixture { .. } => 1.0 - self.cdf(x),
        }
    }

    /// Quantile function on the line for `u` in `(0, 1)`.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.require_1d()?;
        if !(u > 0.0 && u < 1.0) {
            return Err(invalid("u", format!("must lie in (0, 1), got {u}")));
        }
        let x = match self {
            Self::Gaussian { mean, var } => {
                mean[0] + var.sqrt() * std::f64::consts::SQRT_2 * erf::erf_inv(2.0 * u - 1.0)
            }
            Self::Uniform { a, b } => a + (b - a) * u,
            Self::Exponential { rate } => -(-u).ln_1p() / rate,
            Self::DiracMixture { points, weights } => {
                let mut order: Vec<usize> = (0..points.len()).collect();
                order.sort_by(|&i, &j| points[i][0].total_cmp(&points[j][0]));
                let mut acc = 0.0;
                let mut x = points[order[order.len() - 1]][0];
                for &i in &order {
                    acc += weights[i];
                    if acc >= u {
                        x = points[i][0];
                        break;
                    }
                }
                x
            }
            Self::InverseGamma { .. } => {
                // bracket in log space
                let g = |y: f64| self.cdf(y.exp()) - u;
                let (mut lo, mut hi) = (-5.0f64, 5.0f64);
                while g(lo) > 0.0 {
                    lo -= 5.0;
                }
                while g(hi) < 0.0 {
                    hi += 5.0;
                }
                bisect(g, lo, hi, 1e-15).exp()
            }
            Self::Barenblatt { c, .. } => bisect(|x| self.cdf(x) - u, -c, *c, 1e-15),
            Self::BetaOpinion { .. } => bisect(|x| self.cdf(x) - u, -1.0, 1.0, 1e-15),
        };
        Ok(x)
    }

    /// Absolute moment `E|X|^s` (Euclidean norm in `R^n`).
    pub fn abs_moment(&self, s: f64) -> Result<f64> {
        if !(s.is_finite() && s > 0.0) {
            return Err(invalid("s", format!("moment order must be positive, got {s}")));
        }
        let v = match self {
            Self::Gaussian { mean, var } => {
                let dist = mean.iter().map(|m| m * m).sum::<f64>().sqrt();
                gaussian_abs_moment(mean.len(), dist, *var, s)
            }
            Self::DiracMixture { points, weights } => points
                .iter()
                .zip(weights)
                .map(|(p, w)| w * p.iter().map(|x| x * x).sum::<f64>().sqrt().powf(s))
                .sum(),
            Self::Barenblatt { p, c } => {
                let (k, kappa) = barenblatt_shape(*p);
                (k * kappa.ln() + (2.0 * k + 1.0 + s) * c.ln() + beta::ln_beta(0.5 * (s + 1.0), k + 1.0))
                    .exp()
            }
            Self::InverseGamma { mu } => {
                if s >= *mu {
                    return Err(Error::MomentDiverges { order: s, limit: *mu });
                }
                (s * (mu - 1.0).ln() + ln_gamma(mu - s) - ln_gamma(*mu)).exp()
            }
            Self::BetaOpinion { m, lambda } => {
                // In t = (1 + x)/2, with each endpoint singularity placed at zero.
                let (a, b) = Self::beta_params(*m, *lambda);
                let ln_b = beta::ln_beta(a, b);
                // int_0^{1/2} t^{e-1} g(t) dt = (1/e) int_0^{2^-e} g(v^{1/e}) dv
                let half = |e: f64, other: f64| {
                    let g = move |v: f64| {
                        let t = v.powf(1.0 / e);
                        (1.0 - 2.0 * t).powf(s) * ((other - 1.0) * (-t).ln_1p() - ln_b).exp() / e
                    };
                    tanh_sinh(g, 0.0, 0.5f64.powf(e), 1e-13)
                };
                half(a, b) + half(b, a)
            }
            Self::Uniform { a, b } => {
                // int |x|^s over [a, b], split at zero
                let prim = |x: f64| x.signum() * x.abs().powf(s + 1.0) / (s + 1.0);
                (prim(*b) - prim(*a)) / (b - a)
            }
            Self::Exponential { rate } => gamma_fn(s + 1.0) / rate.powf(s),
        };
        Ok(v)
    }

    /// Center used to switch between left- and right-tail evaluations.
    fn pivot(&self) -> f64 {
        match self {
            Self::Gaussian { mean, .. } => mean[0],
            _ => self.mean()[0],
        }
    }

    /// Probability of each cell of `grid`, evaluated from the distribution function.
    pub fn cell_masses(&self, grid: &Grid1D<f64>) -> Result<Vec<f64>> {
        self.require_1d()?;
        if matches!(self, Self::DiracMixture { .. }) {
            return Err(Error::PointMassNotRasterizable);
        }
        let pivot = self.pivot();
        let edges: Vec<f64> = (0..=grid.n_cells()).map(|i| grid.edge(i)).collect();
        Ok(edges
            .windows(2)
            .map(|w| {
                let (a, b) = (w[0], w[1]);
                let m = if a >= pivot {
                    self.sf(a) - self.sf(b)
                } else if b <= pivot {
                    self.cdf(b) - self.cdf(a)
                } else {
                    (self.cdf(pivot) - self.cdf(a)) + (self.sf(pivot) - self.sf(b))
                };
                m.max(0.0)
            })
            .collect())
    }

    /// Mass outside `[x_min, x_max]`.
    pub fn clipped_mass(&self, grid: &Grid1D<f64>) -> f64 {
        self.cdf(grid.x_min()) + self.sf(grid.x_max())
    }

    /// Cell averages on `grid`, renormalized to unit mass.
    pub fn rasterize<T: Real>(&self, grid: &Grid1D<T>) -> Result<GridDensity1D<T>> {
        self.rasterize_with_tolerance(grid, DEFAULT_TAIL_TOLERANCE)
    }

    pub fn rasterize_with_tolerance<T: Real>(
        &self,
        grid: &Grid1D<T>,
        tail_tolerance: f64,
    ) -> Result<GridDensity1D<T>> {
        let g = grid.to_f64();
        let masses = self.cell_masses(&g)?;
        let clipped = self.clipped_mass(&g);
        if clipped > tail_tolerance {
            return Err(Error::TailMassTooLarge {
                clipped,
                tolerance: tail_tolerance,
            });
        }
        let total: f64 = masses.iter().sum();
        if total <= 0.0 {
            return Err(Error::InvalidGrid("window misses the support".into()));
        }
        let h = g.h();
        let values = masses.iter().map(|m| lit::<T>(m / (total * h))).collect();
        GridDensity1D::normalized(*grid, values)
    }

    /// Logarithms of the unnormalized cell averages, finite wherever the density is positive.
    ///
    /// Falls back to the log-density at the cell center where the cell mass underflows.
    pub fn log_cell_averages(&self, grid: &Grid1D<f64>) -> Result<Vec<f64>> {
        let masses = self.cell_masses(grid)?;
        let h = grid.h();
        Ok(masses
            .iter()
            .enumerate()
            .map(|(i, &m)| {
                if m > 1e-280 {
                    (m / h).ln()
                } else {
                    self.ln_pdf(grid.center(i))
                }
            })
            .collect())
    }

    /// `n` equal-weight points at the quantiles `(i - 1/2)/n`.
    pub fn quantile_cloud(&self, n: usize) -> Result<SampleCloud<f64>> {
        if n == 0 {
            return Err(invalid("n", "need at least one point"));
        }
        let xs = (0..n)
            .map(|i| self.quantile((i as f64 + 0.5) / n as f64))
            .collect::<Result<Vec<_>>>()?;
        SampleCloud::from_1d(xs)
    }

    /// Gaussian and point-mass laws as an isotropic Gaussian mixture.
    pub fn to_mixture(&self) -> Result<IsoGaussianMixture> {
        match self {
            Self::Gaussian { mean, var } => IsoGaussianMixture::single(mean.clone(), *var),
            Self::DiracMixture { points, weights } => IsoGaussianMixture::new(
                weights
                    .iter()
                    .zip(points)
                    .map(|(w, p)| (*w, p.clone(), 0.0))
                    .collect(),
            ),
            _ => Err(Error::Unsupported(
                "only Gaussian and point-mass laws convert to mixtures".into(),
            )),
        }
    }

    /// Point-mass laws as a sample cloud.
    pub fn to_samples(&self) -> Result<SampleCloud<f64>> {
        match self {
            Self::DiracMixture { points, weights } => {
                SampleCloud::new(points[0].len(), points.clone(), weights.clone())
            }
            _ => Err(Error::Unsupported("only point masses convert to samples directly".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
        tanh_sinh(f, a, b, 1e-13)
    }

    #[test]
    fn barenblatt_has_unit_mass() {
        for p in [1.5, 2.0, 3.0] {
            let d = AnalyticDensity::barenblatt(p).unwrap();
            let AnalyticDensity::Barenblatt { c, .. } = d else { unreachable!() };
            let mass = quad(|x| d.pdf(x), -c, c);
            assert!((mass - 1.0).abs() < 1e-10, "p = {p}: {mass}");
            assert!((d.cdf(0.0) - 0.5).abs() < 1e-14);
        }
        let AnalyticDensity::Barenblatt { c, .. } = AnalyticDensity::barenblatt(2.0).unwrap() else {
            unreachable!()
        };
        assert!((c - 3f64.cbrt()).abs() < 1e-14);
    }

    #[test]
    fn closed_form_moments_match_quadrature() {
        let cases = [
            AnalyticDensity::barenblatt(1.5).unwrap(),
            AnalyticDensity::barenblatt(3.0).unwrap(),
            AnalyticDensity::inverse_gamma(3.0).unwrap(),
            AnalyticDensity::exponential(2.0).unwrap(),
            AnalyticDensity::uniform(-0.5, 2.0).unwrap(),
            AnalyticDensity::gaussian_1d(0.7, 1.3).unwrap(),
        ];
        for d in &cases {
            for s in [0.5, 1.0, 2.0] {
                let (lo, hi) = d.support();
                let (lo, hi) = (lo.max(-40.0), hi.min(400.0));
                let mut q = 0.0;
                if hi > 1.0 && matches!(d, AnalyticDensity::InverseGamma { .. }) {
                    // tail beyond 1 through y = 1/x
                    let tail = quad(|y| y.powf(-s - 2.0) * d.pdf(1.0 / y), 0.0, 1.0);
                    q += tail + quad(|x| x.powf(s) * d.pdf(x), 0.0, 1.0);
                    let m = d.abs_moment(s).unwrap();
                    assert!((m - q).abs() < 1e-9 * m, "{d:?} s={s}: {m} vs {q}");
                    continue;
                }
                let cuts = [lo, lo.max(0.0).min(hi), hi];
                for w in cuts.windows(2) {
                    if w[1] > w[0] {
                        q += quad(|x| x.abs().powf(s) * d.pdf(x), w[0], w[1]);
                    }
                }
                let m = d.abs_moment(s).unwrap();
                assert!((m - q).abs() < 1e-9 * m.max(1.0), "{d:?} s={s}: {m} vs {q}");
            }
        }
    }

    #[test]
    fn inverse_gamma_has_unit_mean_and_diverging_moments() {
        let d = AnalyticDensity::inverse_gamma(3.0).unwrap();
        assert!((d.abs_moment(1.0).unwrap() - 1.0).abs() < 1e-14);
        let d2 = AnalyticDensity::inverse_gamma(2.0).unwrap();
        assert!(matches!(d2.abs_moment(2.0), Err(Error::MomentDiverges { .. })));
    }

    #[test]
    fn dirac_moment_example() {
        let d = AnalyticDensity::dirac_mixture(vec![vec![0.0], vec![2.0]], vec![0.5, 0.5]).unwrap();
        assert!((d.abs_moment(1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn beta_cdf_and_mean() {
        let d = AnalyticDensity::beta_opinion(0.3, 0.7).unwrap();
        let q = quad(|x| d.pdf(x), -1.0, 0.2);
        assert!((q - d.cdf(0.2)).abs() < 1e-10);
        assert!((d.cdf(0.2) + d.sf(0.2) - 1.0).abs() < 1e-14);
        let mean = quad(|x| x * d.pdf(x), -1.0, 1.0);
        assert!((mean - 0.3).abs() < 1e-10);
    }

    #[test]
    fn beta_second_moment_with_singular_endpoints() {
        for (m, lambda) in [(0.5, 4.0), (-0.8, 0.25), (0.0, 2.0)] {
            let d = AnalyticDensity::beta_opinion(m, lambda).unwrap();
            let (a, b) = ((1.0 + m) / lambda, (1.0 - m) / lambda);
            let et = a / (a + b);
            let et2 = et * (a + 1.0) / (a + b + 1.0);
            let expect = 4.0 * et2 - 4.0 * et + 1.0;
            let got = d.abs_moment(2.0).unwrap();
            assert!((got - expect).abs() < 1e-10, "{m},{lambda}: {got} vs {expect}");
        }
    }

    #[test]
    fn rasterize_rejects_clipping_windows() {
        let d = AnalyticDensity::gaussian_1d(0.0, 1.0).unwrap();
        let g = Grid1D::new(-3.0, 3.0, 64).unwrap();
        let err = d.rasterize(&g).unwrap_err();
        let Error::TailMassTooLarge { clipped, .. } = err else { panic!("{err:?}") };
        assert!((clipped - erf::erfc(3.0 / 2f64.sqrt())).abs() < 1e-15);
        assert!(matches!(
            AnalyticDensity::dirac(0.0).unwrap().rasterize(&g),
            Err(Error::PointMassNotRasterizable)
        ));
    }

    #[test]
    fn rasterize_barenblatt_has_compact_support() {
        let d = AnalyticDensity::barenblatt(2.0).unwrap();
        let g = Grid1D::new(-2.0f64, 2.0, 400).unwrap();
        let f = d.rasterize(&g).unwrap();
        let c = 3f64.cbrt();
        for (i, &v) in f.values().iter().enumerate() {
            if g.edge(i) >= c || g.edge(i + 1) <= -c {
                assert_eq!(v, 0.0);
            }
        }
        assert!((f.mass() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rasterize_beta_is_symmetric() {
        let d = AnalyticDensity::beta_opinion(0.0, 0.5).unwrap();
        let g = Grid1D::new(-1.0f64, 1.0, 400).unwrap();
        let f = d.rasterize(&g).unwrap();
        for i in 0..400 {
            assert!((f.values()[i] - f.values()[g.mirror(i)]).abs() < 1e-12);
        }
        assert!((f.mass() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn serde_round_trip_recomputes_constants() {
        let d = AnalyticDensity::barenblatt(1.5).unwrap();
        let s = serde_json::to_string(&d).unwrap();
        assert_eq!(s, r#"{"kind":"barenblatt","p":1.5}"#);
        let back: AnalyticDensity = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        assert!(serde_json::from_str::<AnalyticDensity>(r#"{"kind":"inverse_gamma","mu":0.5}"#).is_err());
        assert!(serde_json::from_str::<AnalyticDensity>(r#"{"kind":"uniform","a":0,"b":1,"x":2}"#).is_err());
    }

    #[test]
    fn quantiles_invert_cdf() {
        let cases = [
            AnalyticDensity::gaussian_1d(1.0, 2.0).unwrap(),
            AnalyticDensity::barenblatt(2.0).unwrap(),
            AnalyticDensity::inverse_gamma(2.5).unwrap(),
            AnalyticDensity::beta_opinion(-0.4, 1.5).unwrap(),
            AnalyticDensity::exponential(0.5).unwrap(),
        ];
        for d in &cases {
            for u in [0.01, 0.3, 0.5, 0.9, 0.999] {
                let x = d.quantile(u).unwrap();
                assert!((d.cdf(x) - u).abs() < 1e-9, "{d:?} u={u}");
            }
        }
    }
}
