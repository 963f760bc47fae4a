use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::grid_nd::{GridDensityNd, GridNd};
use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, Real};
use crate::special::{gaussian_abs_moment, norm_cdf, norm_sf, tree_sum};

/// One isotropic component `w * N(mean, var * I)`; `var = 0` is a point mass.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianComponent {
    pub weight: f64,
    pub mean: Vec<f64>,
    pub var: f64,
}

/// Finite mixture of isotropic Gaussians and point masses in `R^n`.
///
/// Closed under the drift, heat and Fokker–Planck flows, and its characteristic
/// function and kernel expectations are available in closed form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IsoGaussianMixture {
    dim: usize,
    components: Vec<GaussianComponent>,
}

impl IsoGaussianMixture {
    /// Components as `(weight, mean, var)`; weights positive and summing to one.
    pub fn new(components: Vec<(f64, Vec<f64>, f64)>) -> Result<Self> {
        if components.is_empty() {
            return Err(invalid("components", "need at least one"));
        }
        let dim = components[0].1.len();
        if dim == 0 {
            return Err(invalid("mean", "needs at least one coordinate"));
        }
        let mut out = Vec::with_capacity(components.len());
        for (weight, mean, var) in components {
            if mean.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: mean.len(),
                });
            }
            if !(weight.is_finite() && weight > 0.0) {
                return Err(invalid("weight", format!("must be positive, got {weight}")));
            }
            if !(var.is_finite() && var >= 0.0) || mean.iter().any(|m| !m.is_finite()) {
                return Err(invalid("var", "mean and variance must be finite, variance nonnegative"));
            }
            out.push(GaussianComponent { weight, mean, var });
        }
        let total: f64 = out.iter().map(|c| c.weight).sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(invalid("weight", format!("weights must sum to 1, got {total}")));
        }
        Ok(Self {
            dim,
            components: out,
        })
    }

    pub fn single(mean: Vec<f64>, var: f64) -> Result<Self> {
        Self::new(vec![(1.0, mean, var)])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[GaussianComponent] {
        &self.components
    }

    pub fn min_var(&self) -> f64 {
        self.components.iter().map(|c| c.var).fold(f64::INFINITY, f64::min)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.dim];
        for c in &self.components {
            for (mk, ck) in m.iter_mut().zip(&c.mean) {
                *mk += c.weight * ck;
            }
        }
        m
    }

    /// Applies `(mean, var) -> (mean', var')` to every component.
    pub fn map_components(&self, f: impl Fn(&[f64], f64) -> (Vec<f64>, f64)) -> Self {
        let components = self
            .components
            .iter()
            .map(|c| {
                let (mean, var) = f(&c.mean, c.var);
                GaussianComponent {
                    weight: c.weight,
                    mean,
                    var,
                }
            })
            .collect();
        Self {
            dim: self.dim,
            components,
        }
    }

    /// `int e^{-i xi . x} dF(x)`.
    pub fn char_fn(&self, xi: &[f64]) -> Complex64 {
        let r2: f64 = xi.iter().map(|x| x * x).sum();
        self.components
            .iter()
            .map(|c| {
                let phase: f64 = xi.iter().zip(&c.mean).map(|(a, b)| a * b).sum();
                Complex64::from_polar(c.weight * (-0.5 * c.var * r2).exp(), -phase)
            })
            .sum()
    }

    /// `E|X - Y|^p` for independent `X ~ self`, `Y ~ other`, any `p > -n`.
    pub fn kernel_expectation(&self, other: &Self, p: f64) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        let mut terms = Vec::with_capacity(self.components.len() * other.components.len());
        for a in &self.components {
            for b in &other.components {
                let d = a
                    .mean
                    .iter()
                    .zip(&b.mean)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                let s = a.var + b.var;
                if s == 0.0 && d == 0.0 {
                    if p <= 0.0 {
                        return Err(Error::Unsupported(
                            "singular kernel between coincident point masses".into(),
                        ));
                    }
                    terms.push(0.0);
                    continue;
                }
                terms.push(a.weight * b.weight * gaussian_abs_moment(self.dim, d, s, p));
            }
        }
        Ok(tree_sum(&terms))
    }

    pub fn abs_moment(&self, s: f64) -> f64 {
        self.components
            .iter()
            .map(|c| {
                let d = c.mean.iter().map(|x| x * x).sum::<f64>().sqrt();
                c.weight * gaussian_abs_moment(self.dim, d, c.var, s)
            })
            .sum()
    }

    /// Exact cell averages on a tensor grid, renormalized to unit mass.
    pub fn rasterize<T: Real>(&self, grid: &GridNd<T>, tail_tolerance: f64) -> Result<GridDensityNd<T>> {
        if grid.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                found: self.dim,
            });
        }
        if self.min_var() <= 0.0 {
            return Err(Error::PointMassNotRasterizable);
        }
        let shape = grid.shape();
        let total_cells: usize = shape.iter().product();
        let mut values = vec![0.0f64; total_cells];
        let mut clipped = 0.0;
        for c in &self.components {
            let sd = c.var.sqrt();
            let axis_masses: Vec<Vec<f64>> = (0..self.dim)
                .map(|k| {
                    let g = grid.axis(k).to_f64();
                    (0..g.n_cells())
                        .map(|i| {
                            let (a, b) = ((g.edge(i) - c.mean[k]) / sd, (g.edge(i + 1) - c.mean[k]) / sd);
                            if a >= 0.0 {
                                norm_sf(a) - norm_sf(b)
                            } else {
                                norm_cdf(b) - norm_cdf(a)
                            }
                        })
                        .collect()
                })
                .collect();
            let kept: f64 = axis_masses.iter().map(|m| m.iter().sum::<f64>()).product();
            clipped += c.weight * (1.0 - kept);
            for (flat, v) in values.iter_mut().enumerate() {
                let idx = grid.unflatten(flat);
                let mut prod = c.weight;
                for (k, &i) in idx.iter().enumerate() {
                    prod *= axis_masses[k][i];
                }
                *v += prod;
            }
        }
        if clipped > tail_tolerance {
            return Err(Error::TailMassTooLarge {
                clipped,
                tolerance: tail_tolerance,
            });
        }
        let vol = grid.to_f64().cell_volume();
        GridDensityNd::normalized(grid.clone(), values.into_iter().map(|m| lit(m / vol)).collect())
    }
}
