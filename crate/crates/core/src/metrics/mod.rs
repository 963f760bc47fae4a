//! Cramér, energy and Fourier-based distances, the Gini index and the
//! interpolation bound between energy distances of positive and negative order.
//!
//! The constants of the interpolation bound are read off the two pieces of the
//! frequency split at radius `R`: the low band is bounded by
//! `c * |S^{n-1}| * d1^2 * R^{2-alpha} / (2-alpha)`, so `A = c * 2 pi^{n/2} / Gamma(n/2)`,
//! and the high band by `(c/d) * E_{-(2-alpha)} / R^2`, so `B = c/d`.

mod bound;
mod constants;
mod cramer;
mod energy;
mod fourier;
mod kernel;

use serde::{Deserialize, Serialize};

use crate::scalar::{lit, Real};

pub use bound::{interpolation_bound, InterpolationBound};
pub use constants::{c_const, d_const, MetricConstants};
pub(crate) use constants::check_negative_order;
pub use cramer::{cramer_cdf, cramer_empirical, cramer_expectation, gini, min_cdf, GiniIndex, GiniSource};
pub use energy::{
    energy_alpha_grid, energy_alpha_mixture, energy_alpha_pairwise, energy_negative_mixture, energy_negative_order,
    KernelGrid,
};
pub use fourier::{
    cramer_fourier, d1_metric, energy_alpha_fourier, energy_negative_fourier, FourierGrid, Spectral, SpectralDiff,
};
pub use kernel::{cell_pair_weight, KernelRule};

/// Which representation a distance was computed from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Form {
    Cdf,
    Fourier,
    Expectation,
    Pairwise,
}

/// A distance together with the form used and an error estimate.
///
/// `err` covers quadrature and rounding; `tail_bound` is the neglected
/// high-frequency contribution of Fourier forms (zero otherwise) and is
/// already included in `err`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceValue<T = f64> {
    pub value: T,
    pub form: Form,
    pub err: T,
    pub tail_bound: T,
}

impl DistanceValue<f64> {
    pub(crate) fn exact(value: f64, form: Form, terms: usize) -> Self {
        let err = 4.0 * f64::EPSILON * (terms.max(1) as f64).sqrt() * value.abs().max(f64::MIN_POSITIVE);
        Self {
            value,
            form,
            err,
            tail_bound: 0.0,
        }
    }

    pub(crate) fn cast<T: Real>(self) -> DistanceValue<T> {
        DistanceValue {
            value: lit(self.value),
            form: self.form,
            err: lit(self.err),
            tail_bound: lit(self.tail_bound),
        }
    }
}

impl<T: Real> DistanceValue<T> {
    /// Value clipped at zero; rounding can push a vanishing distance slightly negative.
    pub fn nonnegative(&self) -> T {
        self.value.max(T::zero())
    }
}

/// Deterministic sum of `f(i)` over `0..n`, parallel over fixed blocks.
pub(crate) fn par_tree_sum(n: usize, f: impl Fn(usize) -> f64 + Sync) -> f64 {
    use rayon::prelude::*;
    const BLOCK: usize = 256;
    let blocks: Vec<f64> = (0..n.div_ceil(BLOCK))
        .into_par_iter()
        .map(|b| {
            let terms: Vec<f64> = (b * BLOCK..((b + 1) * BLOCK).min(n)).map(&f).collect();
            crate::special::tree_sum(&terms)
        })
        .collect();
    crate::special::tree_sum(&blocks)
}
