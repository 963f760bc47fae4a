//! Fourier forms of the distances: `int |f^ - g^|^2 / |xi|^{n + beta}` reduced to a
//! radial integral of the angular average of `|f^ - g^|^2`.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::{c_const, check_alpha, check_negative_order, d_const};
use super::{DistanceValue, Form};
use crate::density::{GridDensity1D, GridDensityNd, IsoGaussianMixture, SampleCloud};
use crate::error::{invalid, Error, Result};
use crate::scalar::{to_f64, Real};
use crate::special::{gauss_legendre, sphere_area, sphere_avg_cos, sphere_avg_cos_m1, tree_sum};

/// Radial quadrature on `[xi_lo, cutoff]`: geometric panels with Gauss–Legendre
/// nodes. The interval `[0, xi_lo]` is integrated from the small-`xi` expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FourierGrid {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    xi_lo: f64,
    cutoff: f64,
    directions: usize,
}

impl FourierGrid {
    pub const DEFAULT_PANELS: usize = 128;
    pub const DEFAULT_ORDER: usize = 16;
    pub const DEFAULT_DIRECTIONS: usize = 16;

    /// `directions` sets the angular resolution: `directions` angles in 2D,
    /// `directions / 2` polar by `directions` azimuthal nodes in 3D.
    pub fn new(xi_lo: f64, cutoff: f64, panels: usize, order: usize, directions: usize) -> Result<Self> {
        if !(xi_lo > 0.0 && cutoff > xi_lo && cutoff.is_finite()) {
            return Err(invalid("cutoff", format!("need 0 < xi_lo < cutoff, got {xi_lo}, {cutoff}")));
        }
        if panels == 0 || order == 0 || directions < 2 {
            return Err(invalid("panels", "need at least one panel, one node and two directions"));
        }
        let (gx, gw) = gauss_legendre(order);
        let ratio = (cutoff / xi_lo).powf(1.0 / panels as f64);
        let mut nodes = Vec::with_capacity(panels * order);
        let mut weights = Vec::with_capacity(panels * order);
        for k in 0..panels {
            let a = xi_lo * ratio.powi(k as i32);
            let b = if k + 1 == panels { cutoff } else { a * ratio };
            let half = 0.5 * (b - a);
            for (x, w) in gx.iter().zip(&gw) {
                nodes.push(a + half * (x + 1.0));
                weights.push(half * w);
            }
        }
        Ok(Self {
            nodes,
            weights,
            xi_lo,
            cutoff,
            directions,
        })
    }

    /// Default layout for cells of side `h` in a window of size `width`.
    pub fn for_spacing(h: f64, width: f64) -> Result<Self> {
        Self::new(
            1e-4 / width,
            40.0 / h,
            Self::DEFAULT_PANELS,
            Self::DEFAULT_ORDER,
            Self::DEFAULT_DIRECTIONS,
        )
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn xi_lo(&self) -> f64 {
        self.xi_lo
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Unit directions on a half sphere with weights summing to one.
    pub fn directions(&self, n: usize) -> Result<Vec<(Vec<f64>, f64)>> {
        let m = self.directions;
        match n {
            1 => Ok(vec![(vec![1.0], 1.0)]),
            2 => Ok((0..m)
                .map(|j| {
                    let t = (j as f64 + 0.5) * std::f64::consts::PI / m as f64;
                    (vec![t.cos(), t.sin()], 1.0 / m as f64)
                })
                .collect()),
            3 => {
                let (gx, gw) = gauss_legendre((m / 2).max(2));
                let mut out = Vec::new();
                for (x, w) in gx.iter().zip(&gw) {
                    let u = 0.5 * (x + 1.0);
                    let s = (1.0 - u * u).sqrt();
                    for j in 0..m {
                        let phi = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                        out.push((vec![s * phi.cos(), s * phi.sin(), u], 0.5 * w / m as f64));
                    }
                }
                Ok(out)
            }
            _ => Err(Error::Unsupported(format!("angular quadrature in dimension {n}"))),
        }
    }
}

/// Signed difference of two equal-mass laws, ready for Fourier evaluation.
#[derive(Debug, Clone)]
pub enum SpectralDiff {
    /// Piecewise-constant densities on a tensor grid: signed cell masses.
    Cells {
        centers: Vec<Vec<f64>>,
        h: Vec<f64>,
        masses: Vec<f64>,
    },
    /// Weighted point masses.
    Atoms { dim: usize, points: Vec<f64>, masses: Vec<f64> },
    /// Signed Gaussian components `(weight, mean, var)`.
    Mixture {
        dim: usize,
        components: Vec<(f64, Vec<f64>, f64)>,
    },
}

impl SpectralDiff {
    pub fn dim(&self) -> usize {
        match self {
            Self::Cells { centers, .. } => centers.len(),
            Self::Atoms { dim, .. } | Self::Mixture { dim, .. } => *dim,
        }
    }

    fn l1(&self) -> f64 {
        match self {
            Self::Cells { masses, .. } | Self::Atoms { masses, .. } => masses.iter().map(|m| m.abs()).sum(),
            Self::Mixture { components, .. } => components.iter().map(|c| c.0.abs()).sum(),
        }
    }

    /// First moment of the difference, `int x (f - g)`.
    pub fn mean_gap(&self) -> Vec<f64> {
        let n = self.dim();
        let mut m = vec![0.0; n];
        match self {
            Self::Cells { centers, masses, .. } => {
                let shape: Vec<usize> = centers.iter().map(|c| c.len()).collect();
                for (flat, &w) in masses.iter().enumerate() {
                    let mut rest = flat;
                    for k in (0..n).rev() {
                        m[k] += w * centers[k][rest % shape[k]];
                        rest /= shape[k];
                    }
                }
            }
            Self::Atoms { points, masses, .. } => {
                for (p, &w) in points.chunks(n).zip(masses) {
                    for (mk, pk) in m.iter_mut().zip(p) {
                        *mk += w * pk;
                    }
                }
            }
            Self::Mixture { components, .. } => {
                for (w, mean, _) in components {
                    for (mk, pk) in m.iter_mut().zip(mean) {
                        *mk += w * pk;
                    }
                }
            }
        }
        m
    }

    /// `f^(xi) - g^(xi)` with `f^(xi) = int e^{-i xi . x} f(x) dx`.
    pub fn char_at(&self, xi: &[f64]) -> Complex64 {
        match self {
            Self::Cells { centers, h, masses } => {
                let n = centers.len();
                let mut current: Vec<Complex64> = masses.iter().map(|&m| Complex64::new(m, 0.0)).collect();
                for k in (0..n).rev() {
                    let m = centers[k].len();
                    let phase: Vec<Complex64> = centers[k].iter().map(|&x| Complex64::from_polar(1.0, -xi[k] * x)).collect();
                    current = current
                        .chunks(m)
                        .map(|row| row.iter().zip(&phase).map(|(a, b)| a * b).sum())
                        .collect();
                }
                let sinc: f64 = xi.iter().zip(h).map(|(&x, &hk)| sinc(0.5 * x * hk)).product();
                current[0] * sinc
            }
            Self::Atoms { dim, points, masses } => points
                .chunks(*dim)
                .zip(masses)
                .map(|(p, &w)| {
                    let ph: f64 = p.iter().zip(xi).map(|(a, b)| a * b).sum();
                    Complex64::from_polar(w, -ph)
                })
                .sum(),
            Self::Mixture { components, .. } => {
                let r2: f64 = xi.iter().map(|x| x * x).sum();
                components
                    .iter()
                    .map(|(w, mean, var)| {
                        let ph: f64 = mean.iter().zip(xi).map(|(a, b)| a * b).sum();
                        Complex64::from_polar(w * (-0.5 * var * r2).exp(), -ph)
                    })
                    .sum()
            }
        }
    }

    /// Angular average of `|f^ - g^|^2` on the sphere of radius `rho`.
    pub fn power(&self, rho: f64, dirs: &[(Vec<f64>, f64)]) -> f64 {
        if let Self::Mixture { dim, components } = self {
            let mut terms = Vec::with_capacity(components.len() * components.len());
            for a in components {
                for b in components {
                    let d: f64 = a.1.iter().zip(&b.1).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
                    // Weights sum to zero, so subtracting one per pair leaves the sum
                    // unchanged and keeps each term small near the origin.
                    let s = sphere_avg_cos(*dim, rho * d);
                    let em1 = (-0.5 * (a.2 + b.2) * rho * rho).exp_m1();
                    terms.push(a.0 * b.0 * (em1 * s + sphere_avg_cos_m1(*dim, rho * d)));
                }
            }
            return tree_sum(&terms).max(0.0);
        }
        let terms: Vec<f64> = dirs
            .iter()
            .map(|(u, w)| {
                let xi: Vec<f64> = u.iter().map(|x| x * rho).collect();
                w * self.char_at(&xi).norm_sqr()
            })
            .collect();
        tree_sum(&terms)
    }

    /// Bound on `|S^{n-1}| int_cutoff^inf rho^{-1-beta} A(rho) d rho`.
    pub fn tail_bound(&self, beta: f64, cutoff: f64) -> f64 {
        let s = sphere_area(self.dim());
        let l2 = self.l1().powi(2);
        let atoms = || {
            if beta > 0.0 {
                s * l2 * cutoff.powf(-beta) / beta
            } else {
                f64::INFINITY
            }
        };
        match self {
            Self::Cells { h, .. } => {
                let hmin = h.iter().copied().fold(f64::INFINITY, f64::min);
                let n = self.dim() as f64;
                s * l2 * 4.0 * n / (hmin * hmin) * cutoff.powf(-2.0 - beta) / (2.0 + beta)
            }
            Self::Atoms { .. } => atoms(),
            Self::Mixture { components, .. } => {
                let v = components.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
                if v <= 0.0 {
                    return atoms();
                }
                let q = -1.0 - beta;
                let denom = 2.0 * v * cutoff - q.max(0.0) / cutoff;
                if denom <= 0.0 {
                    return f64::INFINITY;
                }
                s * l2 * cutoff.powf(q) * (-v * cutoff * cutoff).exp() / denom
            }
        }
    }

    /// Quadrature layout matched to the resolution of the difference.
    pub fn default_grid(&self) -> Result<FourierGrid> {
        match self {
            Self::Cells { centers, h, .. } => {
                let hmin = h.iter().copied().fold(f64::INFINITY, f64::min);
                let width = centers
                    .iter()
                    .zip(h)
                    .map(|(c, hk)| c.len() as f64 * hk)
                    .fold(0.0, f64::max);
                if centers.len() == 1 {
                    FourierGrid::for_spacing(hmin, width)
                } else {
                    FourierGrid::new(1e-4 / width, 40.0 / hmin, 64, 8, 12)
                }
            }
            Self::Atoms { dim, points, .. } => {
                let spread = spread(points.chunks(*dim));
                FourierGrid::new(1e-4 / spread, 1e3 / spread, 128, 16, FourierGrid::DEFAULT_DIRECTIONS)
            }
            Self::Mixture { components, .. } => {
                let vmin = components.iter().map(|c| c.2).fold(f64::INFINITY, f64::min);
                let vmax = components.iter().map(|c| c.2).fold(0.0, f64::max);
                let spread = spread(components.iter().map(|c| c.1.as_slice())) + vmax.sqrt();
                let cutoff = if vmin > 0.0 { (40.0 / vmin).sqrt() } else { 1e3 / spread };
                FourierGrid::new(
                    1e-4 / spread,
                    cutoff,
                    FourierGrid::DEFAULT_PANELS,
                    FourierGrid::DEFAULT_ORDER,
                    FourierGrid::DEFAULT_DIRECTIONS,
                )
            }
        }
    }
}

fn spread<'a>(points: impl Iterator<Item = &'a [f64]>) -> f64 {
    let pts: Vec<&[f64]> = points.collect();
    let mut s: f64 = 1.0;
    for a in &pts {
        for b in &pts {
            let d: f64 = a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            s = s.max(d);
        }
    }
    s
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Representations whose difference has a computable Fourier transform.
pub trait Spectral {
    fn spectral_diff(&self, other: &Self) -> Result<SpectralDiff>;
}

fn check_mass(a: f64, b: f64) -> Result<()> {
    if (a - b).abs() > 1e-8 {
        return Err(Error::UnequalMass { left: a, right: b });
    }
    Ok(())
}

impl<T: Real> Spectral for GridDensity1D<T> {
    fn spectral_diff(&self, other: &Self) -> Result<SpectralDiff> {
        self.grid().ensure_same(other.grid())?;
        check_mass(to_f64(self.mass()), to_f64(other.mass()))?;
        let g = self.grid().to_f64();
        let masses = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(&a, &b)| (to_f64(a) - to_f64(b)) * g.h())
            .collect();
        Ok(SpectralDiff::Cells {
            centers: vec![g.centers()],
            h: vec![g.h()],
            masses,
        })
    }
}

impl<T: Real> Spectral for GridDensityNd<T> {
    fn spectral_diff(&self, other: &Self) -> Result<SpectralDiff> {
        self.grid().ensure_same(other.grid())?;
        check_mass(to_f64(self.mass()), to_f64(other.mass()))?;
        let g = self.grid().to_f64();
        let vol = g.cell_volume();
        let masses = self
            .values()
            .iter()
            .zip(other.values())
            .map(|(&a, &b)| (to_f64(a) - to_f64(b)) * vol)
            .collect();
        Ok(SpectralDiff::Cells {
            centers: g.axes().iter().map(|a| a.centers()).collect(),
            h: g.axes().iter().map(|a| a.h()).collect(),
            masses,
        })
    }
}

impl<T: Real> Spectral for SampleCloud<T> {
    fn spectral_diff(&self, other: &Self) -> Result<SpectralDiff> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let (a, b) = (self.to_f64(), other.to_f64());
        let mut points = Vec::with_capacity((a.len() + b.len()) * a.dim());
        let mut masses = Vec::with_capacity(a.len() + b.len());
        for (p, &w) in a.points().zip(a.weights()) {
            points.extend_from_slice(p);
            masses.push(w);
        }
        for (p, &w) in b.points().zip(b.weights()) {
            points.extend_from_slice(p);
            masses.push(-w);
        }
        Ok(SpectralDiff::Atoms {
            dim: a.dim(),
            points,
            masses,
        })
    }
}

impl Spectral for IsoGaussianMixture {
    fn spectral_diff(&self, other: &Self) -> Result<SpectralDiff> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        let components = self
            .components()
            .iter()
            .map(|c| (c.weight, c.mean.clone(), c.var))
            .chain(other.components().iter().map(|c| (-c.weight, c.mean.clone(), c.var)))
            .collect();
        Ok(SpectralDiff::Mixture {
            dim: self.dim(),
            components,
        })
    }
}

/// `|S^{n-1}| int_0^inf rho^{-1-beta} A(rho) d rho` and the neglected tail bound.
///
/// On `[0, xi_lo]` the average power is `A(rho) ~ a rho^2` for equal masses, which
/// integrates to `a xi_lo^{2-beta} / (2-beta)`.
fn radial_integral(diff: &SpectralDiff, fg: &FourierGrid, beta: f64) -> Result<(f64, f64)> {
    let n = diff.dim();
    let dirs = fg.directions(n)?;
    let terms: Vec<f64> = fg
        .nodes
        .par_iter()
        .zip(&fg.weights)
        .map(|(&rho, &w)| w * rho.powf(-1.0 - beta) * diff.power(rho, &dirs))
        .collect();
    let lo = fg.xi_lo;
    let a = diff.power(lo, &dirs) / (lo * lo);
    let head = a * lo.powf(2.0 - beta) / (2.0 - beta);
    let s = sphere_area(n);
    Ok((s * (head + tree_sum(&terms)), diff.tail_bound(beta, fg.cutoff)))
}

fn fourier_value(diff: &SpectralDiff, fg: Option<&FourierGrid>, beta: f64, constant: f64) -> Result<DistanceValue> {
    let owned;
    let fg = match fg {
        Some(g) => g,
        None => {
            owned = diff.default_grid()?;
            &owned
        }
    };
    let (integral, tail) = radial_integral(diff, fg, beta)?;
    let value = constant * integral;
    let tail_bound = constant * tail;
    Ok(DistanceValue {
        value,
        form: Form::Fourier,
        err: tail_bound + 1e-12 * value.abs(),
        tail_bound,
    })
}

/// Parseval form `(1/2pi) int |f^ - g^|^2 / xi^2` of the Cramér distance.
pub fn cramer_fourier<S: Spectral + ?Sized>(f: &S, g: &S, fg: Option<&FourierGrid>) -> Result<DistanceValue> {
    let diff = f.spectral_diff(g)?;
    if diff.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: diff.dim(),
        });
    }
    fourier_value(&diff, fg, 1.0, 0.5 / std::f64::consts::PI)
}

/// `c_{n,alpha} int |f^ - g^|^2 / |xi|^{n+alpha}`.
pub fn energy_alpha_fourier<S: Spectral + ?Sized>(
    f: &S,
    g: &S,
    alpha: f64,
    fg: Option<&FourierGrid>,
) -> Result<DistanceValue> {
    check_alpha(alpha)?;
    let diff = f.spectral_diff(g)?;
    let c = c_const(diff.dim(), alpha)?;
    fourier_value(&diff, fg, alpha, c)
}

/// `d_{n,alpha} int |f^ - g^|^2 / |xi|^{n-2+alpha}`.
pub fn energy_negative_fourier<S: Spectral + ?Sized>(
    f: &S,
    g: &S,
    alpha: f64,
    fg: Option<&FourierGrid>,
) -> Result<DistanceValue> {
    let diff = f.spectral_diff(g)?;
    check_negative_order(diff.dim(), alpha)?;
    let d = d_const(diff.dim(), alpha)?;
    fourier_value(&diff, fg, alpha - 2.0, d)
}

/// `sup_xi |f^ - g^| / |xi|` over the radial nodes and directions, refined by
/// golden-section search, together with the `xi -> 0` limit `|mean(f) - mean(g)|`.
pub fn d1_metric<S: Spectral + ?Sized>(f: &S, g: &S, fg: Option<&FourierGrid>) -> Result<DistanceValue> {
    let diff = f.spectral_diff(g)?;
    let owned;
    let fg = match fg {
        Some(g) => g,
        None => {
            owned = diff.default_grid()?;
            &owned
        }
    };
    let n = diff.dim();
    let dirs = fg.directions(n)?;
    let ratio = |rho: f64, u: &[f64]| {
        let xi: Vec<f64> = u.iter().map(|x| x * rho).collect();
        diff.char_at(&xi).norm() / rho
    };
    let scan: Vec<(f64, usize, usize)> = fg
        .nodes
        .par_iter()
        .enumerate()
        .map(|(k, &rho)| {
            let mut best = (0.0, k, 0);
            for (j, (u, _)) in dirs.iter().enumerate() {
                let r = ratio(rho, u);
                if r > best.0 {
                    best = (r, k, j);
                }
            }
            best
        })
        .collect();
    let (mut best, k, j) = scan
        .iter()
        .copied()
        .fold((0.0, 0, 0), |acc, s| if s.0 > acc.0 { s } else { acc });
    if best > 0.0 {
        let u = &dirs[j].0;
        let mut a = if k == 0 { fg.xi_lo } else { fg.nodes[k - 1] };
        let mut b = if k + 1 == fg.len() { fg.cutoff } else { fg.nodes[k + 1] };
        let gr = 0.5 * (5f64.sqrt() - 1.0);
        let mut c = b - gr * (b - a);
        let mut d = a + gr * (b - a);
        let (mut fc, mut fd) = (ratio(c, u), ratio(d, u));
        for _ in 0..80 {
            if fc > fd {
                b = d;
                d = c;
                fd = fc;
                c = b - gr * (b - a);
                fc = ratio(c, u);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + gr * (b - a);
                fd = ratio(d, u);
            }
        }
        best = best.max(fc).max(fd);
    }
    let gap = diff.mean_gap().iter().map(|x| x * x).sum::<f64>().sqrt();
    let value = best.max(gap);
    Ok(DistanceValue {
        value,
        form: Form::Fourier,
        err: 1e-12 * value,
        tail_bound: 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{AnalyticDensity, Grid1D};
    use crate::metrics::cramer::cramer_cdf;

    #[test]
    fn parseval_cramer_matches_cdf_form() {
        let g = Grid1D::new(-12.0, 12.0, 2048).unwrap();
        for (m, v) in [(1.0, 1.0), (0.0, 4.0)] {
            let a = AnalyticDensity::gaussian_1d(0.0, 1.0).unwrap().rasterize(&g).unwrap();
            let b = AnalyticDensity::gaussian_1d(m, v).unwrap().rasterize(&g).unwrap();
            let fourier = cramer_fourier(&a, &b, None).unwrap();
            let cdf = cramer_cdf(&a.cdf(), &b.cdf()).unwrap();
            assert!((fourier.value - cdf.value).abs() < 1e-3 * cdf.value, "{} vs {}", fourier.value, cdf.value);
            assert!(fourier.tail_bound < 1e-6);
            let e = energy_alpha_fourier(&a, &b, 1.0, None).unwrap();
            assert!((e.value - 2.0 * fourier.value).abs() < 1e-12 * e.value);
        }
    }

    #[test]
    fn mixture_power_matches_direction_average() {
        let a = IsoGaussianMixture::new(vec![(0.5, vec![0.0, 0.0], 1.0), (0.5, vec![1.0, 0.5], 0.5)]).unwrap();
        let b = IsoGaussianMixture::single(vec![0.2, 0.0], 2.0).unwrap();
        let diff = a.spectral_diff(&b).unwrap();
        let fg = FourierGrid::new(1e-3, 10.0, 4, 4, 256).unwrap();
        let dirs = fg.directions(2).unwrap();
        for rho in [0.3, 1.0, 2.5] {
            let closed = diff.power(rho, &dirs);
            let avg: f64 = dirs
                .iter()
                .map(|(u, w)| w * diff.char_at(&[u[0] * rho, u[1] * rho]).norm_sqr())
                .sum();
            assert!((closed - avg).abs() < 1e-10, "{closed} vs {avg}");
        }
    }

    #[test]
    fn d1_of_point_masses_is_the_gap() {
        let x = SampleCloud::from_1d(vec![0.0]).unwrap();
        let y = SampleCloud::from_1d(vec![1.7]).unwrap();
        let d = d1_metric(&x, &y, None).unwrap();
        assert!((d.value - 1.7).abs() < 1e-12);
        assert_eq!(d1_metric(&x, &x, None).unwrap().value, 0.0);
    }

    #[test]
    fn energy_fourier_matches_closed_form_for_mixtures() {
        for (n, alpha) in [(1, 0.5), (2, 1.0), (3, 1.5)] {
            let a = IsoGaussianMixture::single(vec![0.0; n], 1.0).unwrap();
            let mut m = vec![0.0; n];
            m[0] = 0.8;
            let b = IsoGaussianMixture::new(vec![(0.3, m, 0.5), (0.7, vec![0.0; n], 1.5)]).unwrap();
            let f = energy_alpha_fourier(&a, &b, alpha, None).unwrap();
            let e = crate::metrics::energy_alpha_mixture(&a, &b, alpha).unwrap();
            assert!((f.value - e.value).abs() < 1e-6 * e.value, "n={n}: {} vs {}", f.value, e.value);
            if n >= 2 {
                let f = energy_negative_fourier(&a, &b, alpha, None).unwrap();
                let e = crate::metrics::energy_negative_mixture(&a, &b, alpha).unwrap();
                assert!((f.value - e.value).abs() < 1e-6 * e.value, "n={n}: {} vs {}", f.value, e.value);
            }
        }
    }
}
