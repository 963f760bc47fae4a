use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{count, lit, to_f64, Real};

/// Uniform cell grid on `[x_min, x_max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D<T> {
    x_min: T,
    x_max: T,
    n_cells: usize,
}

impl<T: Real> Grid1D<T> {
    pub const MIN_CELLS: usize = 8;

    pub fn new(x_min: T, x_max: T, n_cells: usize) -> Result<Self> {
        if !(x_min.is_finite() && x_max.is_finite()) {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if x_min >= x_max {
            return Err(Error::InvalidGrid(format!(
                "x_min ({x_min}) must be below x_max ({x_max})"
            )));
        }
        if n_cells < Self::MIN_CELLS {
            return Err(Error::InvalidGrid(format!(
                "need at least {} cells, got {n_cells}",
                Self::MIN_CELLS
            )));
        }
        Ok(Self {
            x_min,
            x_max,
            n_cells,
        })
    }

    pub fn x_min(&self) -> T {
        self.x_min
    }

    pub fn x_max(&self) -> T {
        self.x_max
    }

    pub fn n_cells(&self) -> usize {
        self.n_cells
    }

    pub fn h(&self) -> T {
        (self.x_max - self.x_min) / count(self.n_cells)
    }

    /// Left edge of cell `i`; `edge(n_cells)` is `x_max`.
    pub fn edge(&self, i: usize) -> T {
        if i == self.n_cells {
            self.x_max
        } else {
            self.x_min + self.h() * count(i)
        }
    }

    pub fn center(&self, i: usize) -> T {
        self.x_min + self.h() * (count::<T>(i) + lit(0.5))
    }

    pub fn centers(&self) -> Vec<T> {
        (0..self.n_cells).map(|i| self.center(i)).collect()
    }

    /// Index of the cell mirrored about the window midpoint.
    pub fn mirror(&self, i: usize) -> usize {
        self.n_cells - 1 - i
    }

    /// Cell containing `x`, if inside the window.
    pub fn locate(&self, x: T) -> Option<usize> {
        if x < self.x_min || x > self.x_max {
            return None;
        }
        let i = ((x - self.x_min) / self.h()).floor().to_usize().unwrap_or(0);
        Some(i.min(self.n_cells - 1))
    }

    pub fn to_f64(&self) -> Grid1D<f64> {
        Grid1D {
            x_min: to_f64(self.x_min),
            x_max: to_f64(self.x_max),
            n_cells: self.n_cells,
        }
    }

    pub(crate) fn ensure_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }
}
