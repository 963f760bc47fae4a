use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, to_f64, Real};

const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// Weighted point set in `R^n`, stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleCloud<T> {
    dim: usize,
    coords: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> SampleCloud<T> {
    pub fn new(dim: usize, points: Vec<Vec<T>>, weights: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "must be at least 1"));
        }
        if points.is_empty() || points.len() != weights.len() {
            return Err(invalid("weights", "need one weight per point, at least one point"));
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: p.len(),
            });
        }
        let coords: Vec<T> = points.into_iter().flatten().collect();
        if coords.iter().any(|x| !x.is_finite()) {
            return Err(invalid("points", "coordinates must be finite"));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= T::zero())) {
            return Err(invalid("weights", "must be nonnegative"));
        }
        let total: f64 = weights.iter().map(|&w| to_f64(w)).sum();
        let tol = WEIGHT_SUM_TOLERANCE.max(8.0 * to_f64(T::epsilon()) * weights.len() as f64);
        if (total - 1.0).abs() > tol {
            return Err(invalid("weights", format!("must sum to 1, got {total}")));
        }
        Ok(Self {
            dim,
            coords,
            weights,
        })
    }

    /// Equal-weight cloud.
    pub fn uniform(dim: usize, points: Vec<Vec<T>>) -> Result<Self> {
        let n = points.len();
        let w = T::one() / crate::scalar::count::<T>(n.max(1));
        Self::new(dim, points, vec![w; n])
    }

    /// Equal-weight cloud on the line.
    pub fn from_1d(xs: Vec<T>) -> Result<Self> {
        Self::uniform(1, xs.into_iter().map(|x| vec![x]).collect())
    }

    pub(crate) fn from_parts_unchecked(dim: usize, points: Vec<Vec<T>>, weights: Vec<T>) -> Self {
        Self {
            dim,
            coords: points.into_iter().flatten().collect(),
            weights,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[T]> {
        self.coords.chunks(self.dim)
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn mean(&self) -> Vec<T> {
        let mut m = vec![T::zero(); self.dim];
        for (p, &w) in self.points().zip(&self.weights) {
            for (mk, &pk) in m.iter_mut().zip(p) {
                *mk += w * pk;
            }
        }
        m
    }

    /// `sum w_i |x_i|^s`.
    pub fn abs_moment(&self, s: T) -> T {
        self.points()
            .zip(&self.weights)
            .map(|(p, &w)| w * norm(p).powf(s))
            .sum()
    }

    /// Every point multiplied by `c`.
    pub fn scaled(&self, c: T) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.iter().map(|&x| x * c).collect(),
            weights: self.weights.clone(),
        }
    }

    pub fn to_f64(&self) -> SampleCloud<f64> {
        SampleCloud {
            dim: self.dim,
            coords: self.coords.iter().map(|&x| to_f64(x)).collect(),
            weights: self.weights.iter().map(|&w| to_f64(w)).collect(),
        }
    }

    pub fn from_f64(c: &SampleCloud<f64>) -> Self {
        Self {
            dim: c.dim,
            coords: c.coords.iter().map(|&x| lit(x)).collect(),
            weights: c.weights.iter().map(|&w| lit(w)).collect(),
        }
    }

    /// Sorted 1D atoms `(x, w)`; fails for `n > 1`.
    pub fn sorted_atoms(&self) -> Result<Vec<(T, T)>> {
        if self.dim != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: self.dim,
            });
        }
        let mut atoms: Vec<(T, T)> = self.coords.iter().copied().zip(self.weights.iter().copied()).collect();
        atoms.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite coordinates"));
        Ok(atoms)
    }
}

pub(crate) fn norm<T: Real>(p: &[T]) -> T {
    p.iter().map(|&x| x * x).sum::<T>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validates_weights_and_shape() {
        assert!(SampleCloud::new(1, vec![vec![0.0], vec![1.0]], vec![0.5, 0.4]).is_err());
        assert!(SampleCloud::new(2, vec![vec![0.0, 1.0], vec![1.0]], vec![0.5, 0.5]).is_err());
        assert!(SampleCloud::new(1, vec![vec![f64::NAN]], vec![1.0]).is_err());
        let c = SampleCloud::new(2, vec![vec![3.0, 4.0], vec![0.0, 0.0]], vec![0.25f64, 0.75]).unwrap();
        assert_eq!(c.point(0), &[3.0, 4.0]);
        assert!((c.abs_moment(1.0) - 1.25).abs() < 1e-15);
        assert_eq!(c.mean(), vec![0.75, 1.0]);
    }

    #[test]
    fn uniform_weights_sum_to_one_for_awkward_sizes() {
        for n in [3usize, 7, 400, 1001] {
            let c = SampleCloud::from_1d((0..n).map(|i| i as f64).collect()).unwrap();
            assert_eq!(c.len(), n);
        }
        let c32 = SampleCloud::<f32>::from_1d((0..999).map(|i| i as f32).collect());
        assert!(c32.is_ok());
    }
}
