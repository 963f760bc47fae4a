use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::gridded::{mass_tolerance, GridDensity1D, MASS_TOLERANCE};
use crate::error::{invalid, Error, Result};
use crate::scalar::{to_f64, Real};

/// Tensor product of 1D grids; cells are indexed row-major (last axis fastest).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridNd<T> {
    axes: Vec<Grid1D<T>>,
}

impl<T: Real> GridNd<T> {
    pub fn new(axes: Vec<Grid1D<T>>) -> Result<Self> {
        if axes.is_empty() {
            return Err(invalid("axes", "need at least one axis"));
        }
        Ok(Self { axes })
    }

    /// The same axis repeated `n` times.
    pub fn cube(axis: Grid1D<T>, n: usize) -> Self {
        Self {
            axes: vec![axis; n.max(1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, k: usize) -> &Grid1D<T> {
        &self.axes[k]
    }

    pub fn axes(&self) -> &[Grid1D<T>] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.n_cells()).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.n_cells()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cell_volume(&self) -> T {
        self.axes.iter().fold(T::one(), |acc, a| acc * a.h())
    }

    pub fn unflatten(&self, mut flat: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for k in (0..self.dim()).rev() {
            let n = self.axes[k].n_cells();
            idx[k] = flat % n;
            flat /= n;
        }
        idx
    }

    pub fn flatten(&self, idx: &[usize]) -> usize {
        idx.iter()
            .zip(&self.axes)
            .fold(0, |acc, (&i, a)| acc * a.n_cells() + i)
    }

    pub fn center(&self, flat: usize) -> Vec<T> {
        self.unflatten(flat)
            .iter()
            .zip(&self.axes)
            .map(|(&i, a)| a.center(i))
            .collect()
    }

    pub fn to_f64(&self) -> GridNd<f64> {
        GridNd {
            axes: self.axes.iter().map(|a| a.to_f64()).collect(),
        }
    }

    /// True when every axis shares the same cell width (to rounding).
    pub fn is_isotropic(&self) -> bool {
        let h0 = to_f64(self.axes[0].h());
        self.axes
            .iter()
            .all(|a| (to_f64(a.h()) - h0).abs() <= 1e-12 * h0)
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}

/// Probability density held as cell values on a [`GridNd`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensityNd<T> {
    grid: GridNd<T>,
    values: Vec<T>,
}

fn check<T: Real>(grid: &GridNd<T>, values: &[T]) -> Result<()> {
    if values.len() != grid.len() {
        return Err(Error::InvalidGrid(format!(
            "{} values for {} cells",
            values.len(),
            grid.len()
        )));
    }
    for (index, &v) in values.iter().enumerate() {
        if !(v.is_finite() && v >= T::zero()) {
            return Err(Error::NegativeDensity {
                index,
                value: to_f64(v),
            });
        }
    }
    Ok(())
}

impl<T: Real> GridDensityNd<T> {
    pub fn new(grid: GridNd<T>, values: Vec<T>) -> Result<Self> {
        check(&grid, &values)?;
        let d = Self { grid, values };
        let mass = to_f64(d.mass());
        let tolerance = mass_tolerance::<T>(d.values.len());
        if (mass - 1.0).abs() > tolerance {
            return Err(Error::MassNotNormalized { mass, tolerance });
        }
        Ok(d)
    }

    pub fn normalized(grid: GridNd<T>, mut values: Vec<T>) -> Result<Self> {
        check(&grid, &values)?;
        let mass = grid.cell_volume() * values.iter().copied().sum::<T>();
        if mass <= T::zero() {
            return Err(Error::MassNotNormalized {
                mass: to_f64(mass),
                tolerance: MASS_TOLERANCE,
            });
        }
        for v in &mut values {
            *v /= mass;
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: GridNd<T>, f: impl Fn(&[T]) -> T) -> Result<Self> {
        let values = (0..grid.len()).map(|i| f(&grid.center(i))).collect();
        Self::normalized(grid, values)
    }

    pub fn grid(&self) -> &GridNd<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.grid.dim()
    }

    pub fn mass(&self) -> T {
        self.grid.cell_volume() * self.values.iter().copied().sum::<T>()
    }

    pub fn mean(&self) -> Vec<T> {
        let vol = self.grid.cell_volume();
        let mut m = vec![T::zero(); self.dim()];
        for (i, &f) in self.values.iter().enumerate() {
            for (mk, xk) in m.iter_mut().zip(self.grid.center(i)) {
                *mk += xk * f * vol;
            }
        }
        m
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<T> {
        self.grid.ensure_same(&other.grid)?;
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (*a - *b).abs())
            .fold(T::zero(), T::max))
    }
}

impl<T: Real> From<GridDensity1D<T>> for GridDensityNd<T> {
    fn from(f: GridDensity1D<T>) -> Self {
        let grid = GridNd::cube(*f.grid(), 1);
        Self {
            grid,
            values: f.into_values(),
        }
    }
}
