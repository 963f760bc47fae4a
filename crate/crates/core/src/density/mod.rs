//! Grid, analytic and sample representations of probability measures.

mod analytic;
mod grid;
mod grid_nd;
mod gridded;
pub mod io;
mod mixture;
mod samples;

pub use analytic::{AnalyticDensity, AnalyticParams, DEFAULT_TAIL_TOLERANCE};
pub use grid::Grid1D;
pub use grid_nd::{GridDensityNd, GridNd};
pub use gridded::{cdf_from_density, mass_tolerance, mean_from_cdf, CdfCurve, GridDensity1D, MASS_TOLERANCE};
pub use mixture::{GaussianComponent, IsoGaussianMixture};
pub use samples::SampleCloud;


use crate::error::{invalid, Result};
use crate::scalar::{lit, to_f64, Real};

/// Absolute moments `m_s = int |x|^s dF`.
pub trait Moments {
    fn abs_moment(&self, s: f64) -> Result<f64>;
}

impl<T: Real> Moments for GridDensity1D<T> {
    fn abs_moment(&self, s: f64) -> Result<f64> {
        Ok(to_f64(GridDensity1D::abs_moment(self, lit(s))))
    }
}

impl<T: Real> Moments for SampleCloud<T> {
    fn abs_moment(&self, s: f64) -> Result<f64> {
        Ok(to_f64(SampleCloud::abs_moment(self, lit(s))))
    }
}

impl Moments for AnalyticDensity {
    fn abs_moment(&self, s: f64) -> Result<f64> {
        AnalyticDensity::abs_moment(self, s)
    }
}

impl Moments for IsoGaussianMixture {
    fn abs_moment(&self, s: f64) -> Result<f64> {
        Ok(IsoGaussianMixture::abs_moment(self, s))
    }
}

/// Absolute moment of order `s > 0` of any representation.
pub fn moment<M: Moments + ?Sized>(d: &M, s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(invalid("s", format!("moment order must be positive, got {s}")));
    }
    d.abs_moment(s)
}
