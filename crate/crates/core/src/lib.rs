//! Cramér and energy distances between probability measures, Fokker–Planck
//! evolutions in one and several dimensions, and decay-to-equilibrium checks.

pub mod decay;
pub mod density;
pub mod error;
pub mod exact_nd;
pub mod fp1d;
pub mod hash;
pub mod metrics;
pub mod scalar;
pub mod special;

pub use error::{Error, Result};

pub type Grid1D64 = density::Grid1D<f64>;
pub type Grid1D32 = density::Grid1D<f32>;
pub type GridDensity1D64 = density::GridDensity1D<f64>;
pub type GridDensity1D32 = density::GridDensity1D<f32>;
pub type GridDensityNd64 = density::GridDensityNd<f64>;
pub type GridDensityNd32 = density::GridDensityNd<f32>;
pub type CdfCurve64 = density::CdfCurve<f64>;
pub type CdfCurve32 = density::CdfCurve<f32>;
pub type SampleCloud64 = density::SampleCloud<f64>;
pub type SampleCloud32 = density::SampleCloud<f32>;
pub type Snapshot64 = fp1d::Snapshot<f64>;
pub type Snapshot32 = fp1d::Snapshot<f32>;
