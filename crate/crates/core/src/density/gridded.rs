use serde::{Deserialize, Serialize};

use super::grid::Grid1D;
use super::samples::SampleCloud;
use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Real};

/// Mass tolerance enforced after construction or normalization.
pub const MASS_TOLERANCE: f64 = 1e-8;

/// Mass tolerance for `n` cells in scalar `T`, widened to the summation rounding bound.
pub fn mass_tolerance<T: Real>(n: usize) -> f64 {
    MASS_TOLERANCE.max(4.0 * n as f64 * to_f64(T::epsilon()))
}

/// Probability density held as cell values on a [`Grid1D`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDensity1D<T> {
    grid: Grid1D<T>,
    values: Vec<T>,
}

fn check_values<T: Real>(grid: &Grid1D<T>, values: &[T]) -> Result<()> {
    if values.len() != grid.n_cells() {
        return Err(Error::InvalidGrid(format!(
            "{} values for {} cells",
            values.len(),
            grid.n_cells()
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

impl<T: Real> GridDensity1D<T> {
    /// Wraps cell values that already integrate to one.
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        check_values(&grid, &values)?;
        let d = Self { grid, values };
        let mass = to_f64(d.mass());
        let tolerance = mass_tolerance::<T>(d.values.len());
        if (mass - 1.0).abs() > tolerance {
            return Err(Error::MassNotNormalized { mass, tolerance });
        }
        Ok(d)
    }

    /// Rescales nonnegative cell values to unit mass.
    pub fn normalized(grid: Grid1D<T>, mut values: Vec<T>) -> Result<Self> {
        check_values(&grid, &values)?;
        let mass = grid.h() * values.iter().copied().sum::<T>();
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

    /// Samples `f` at cell centers and normalizes.
    pub fn from_fn(grid: Grid1D<T>, f: impl Fn(T) -> T) -> Result<Self> {
        let values = grid.centers().into_iter().map(f).collect();
        Self::normalized(grid, values)
    }

    pub(crate) fn from_parts_unchecked(grid: Grid1D<T>, values: Vec<T>) -> Self {
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn mass(&self) -> T {
        self.grid.h() * self.values.iter().copied().sum::<T>()
    }

    /// `h * sum x_i f_i`.
    pub fn mean(&self) -> T {
        let h = self.grid.h();
        self.values
            .iter()
            .enumerate()
            .map(|(i, &f)| self.grid.center(i) * f * h)
            .sum()
    }

    /// Absolute moment `h * sum |x_i|^s f_i`.
    pub fn abs_moment(&self, s: T) -> T {
        let h = self.grid.h();
        self.values
            .iter()
            .enumerate()
            .map(|(i, &f)| self.grid.center(i).abs().powf(s) * f * h)
            .sum()
    }

    pub fn min_value(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
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

    /// Cumulative curve `F_i = h * sum_{j <= i} f_j` at right cell edges.
    pub fn cdf(&self) -> CdfCurve<T> {
        let h = self.grid.h();
        let mut acc = T::zero();
        let values = self
            .values
            .iter()
            .map(|&f| {
                acc += f * h;
                acc.min(T::one())
            })
            .collect();
        CdfCurve {
            grid: self.grid,
            values,
        }
    }

    /// Point masses `h f_i` at the cell centers.
    pub fn to_samples(&self) -> SampleCloud<T> {
        let h = self.grid.h();
        let pts = self.grid.centers().into_iter().map(|x| vec![x]).collect();
        let ws: Vec<T> = self.values.iter().map(|&f| f * h).collect();
        let total: T = ws.iter().copied().sum();
        let ws = ws.into_iter().map(|w| w / total).collect();
        SampleCloud::from_parts_unchecked(1, pts, ws)
    }
}

/// Cumulative distribution function at the right edges of a [`Grid1D`].
///
/// The curve is piecewise linear between edges, starting from 0 at `x_min`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CdfCurve<T> {
    grid: Grid1D<T>,
    values: Vec<T>,
}

impl<T: Real> CdfCurve<T> {
    pub fn new(grid: Grid1D<T>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.n_cells() {
            return Err(Error::InvalidCdf(format!(
                "{} values for {} cells",
                values.len(),
                grid.n_cells()
            )));
        }
        let slack: T = lit(1e-12);
        let mut prev = T::zero();
        for (i, &v) in values.iter().enumerate() {
            if !v.is_finite() || v < -slack || v > T::one() + slack {
                return Err(Error::InvalidCdf(format!("value {v} at edge {i}")));
            }
            if v < prev - slack {
                return Err(Error::InvalidCdf(format!("decreases at edge {i}")));
            }
            prev = v;
        }
        let last = to_f64(prev);
        if last < 1.0 - mass_tolerance::<T>(values.len()) {
            return Err(Error::InvalidCdf(format!("final value {last} below one")));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &Grid1D<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn last(&self) -> T {
        *self.values.last().expect("grid has cells")
    }

    /// `[0, F_0, ..., F_{n-1}]` at the edges `x_min, x_min + h, ..., x_max`.
    pub fn node_values(&self) -> Vec<T> {
        std::iter::once(T::zero())
            .chain(self.values.iter().copied())
            .collect()
    }

    /// Piecewise-linear value; 0 left of the window, `F_last` right of it.
    pub fn value_at(&self, x: T) -> T {
        let g = &self.grid;
        if x <= g.x_min() {
            return T::zero();
        }
        if x >= g.x_max() {
            return self.last();
        }
        let s = (x - g.x_min()) / g.h();
        let k = s.floor().to_usize().unwrap_or(0).min(g.n_cells() - 1);
        let theta = s - crate::scalar::count(k);
        let left = if k == 0 { T::zero() } else { self.values[k - 1] };
        left + theta * (self.values[k] - left)
    }

    /// `int_{x_min}^{x} F` for `x` inside the window (exact for the linear interpolant).
    pub fn integral_to(&self, x: T) -> T {
        let g = &self.grid;
        let h = g.h();
        let half: T = lit(0.5);
        if x <= g.x_min() {
            return T::zero();
        }
        let x = x.min(g.x_max());
        let s = (x - g.x_min()) / h;
        let k = s.floor().to_usize().unwrap_or(0).min(g.n_cells());
        let nodes = self.node_values();
        let mut acc = T::zero();
        for j in 0..k.min(g.n_cells()) {
            acc += half * h * (nodes[j] + nodes[j + 1]);
        }
        if k < g.n_cells() {
            let theta = s - crate::scalar::count(k);
            let fa = nodes[k];
            let fx = fa + theta * (nodes[k + 1] - fa);
            acc += half * h * theta * (fa + fx);
        }
        acc
    }

    /// Mean recovered from the curve: `-int_{-inf}^0 F + int_0^inf (1 - F)`.
    pub fn mean(&self) -> T {
        let lo = self.grid.x_min();
        let hi = self.grid.x_max();
        let zero = T::zero();
        let last = self.last();
        let mut neg = zero;
        if lo < zero {
            let top = hi.min(zero);
            neg = self.integral_to(top);
            if hi < zero {
                neg += (zero - hi) * last;
            }
        }
        let mut pos = zero;
        if hi > zero {
            let bottom = lo.max(zero);
            let len = hi - bottom;
            pos = len - (self.integral_to(hi) - self.integral_to(bottom));
            if lo > zero {
                pos += lo;
            }
        }
        pos - neg
    }

    /// Density recovered by differencing the curve.
    pub fn to_density(&self) -> GridDensity1D<T> {
        let h = self.grid.h();
        let nodes = self.node_values();
        let values = nodes
            .windows(2)
            .map(|w| ((w[1] - w[0]) / h).max(T::zero()))
            .collect();
        GridDensity1D::from_parts_unchecked(self.grid, values)
    }
}

/// Cumulative function of a density on its grid.
pub fn cdf_from_density<T: Real>(f: &GridDensity1D<T>) -> CdfCurve<T> {
    f.cdf()
}

/// Mean of the law described by a cumulative curve.
pub fn mean_from_cdf<T: Real>(cdf: &CdfCurve<T>) -> T {
    cdf.mean()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform01(n: usize) -> GridDensity1D<f64> {
        let g = Grid1D::new(0.0, 1.0, n).unwrap();
        GridDensity1D::new(g, vec![1.0; n]).unwrap()
    }

    #[test]
    fn uniform_cdf_is_half_at_midpoint() {
        let f = uniform01(100);
        let cdf = cdf_from_density(&f);
        assert!((cdf.value_at(0.5) - 0.5).abs() <= f.grid().h());
        assert!((cdf.last() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn concentrated_cell_gives_a_jump() {
        let g = Grid1D::new(-1.0f64, 1.0, 10).unwrap();
        let mut v = vec![0.0; 10];
        let i0 = g.locate(0.0).unwrap();
        v[i0] = 1.0 / g.h();
        let cdf = GridDensity1D::new(g, v).unwrap().cdf();
        for (i, &fv) in cdf.values().iter().enumerate() {
            let expect = if i < i0 { 0.0 } else { 1.0 };
            assert!((fv - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn mean_of_uniform() {
        let f = uniform01(100);
        assert!((mean_from_cdf(&f.cdf()) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn mean_matches_direct_sum_for_all_window_placements() {
        for &(lo, hi) in &[(-3.0, 5.0), (0.5, 4.0), (-6.0, -1.0), (0.0, 2.0)] {
            let g = Grid1D::new(lo, hi, 64).unwrap();
            let f = GridDensity1D::from_fn(g, |x: f64| (1.0 + (x * 1.3).sin()).max(0.0) + 0.1)
                .unwrap();
            let m1 = f.cdf().mean();
            let m2 = f.mean();
            assert!((m1 - m2).abs() < 1e-12, "{lo},{hi}: {m1} vs {m2}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = Grid1D::new(0.0, 1.0, 8).unwrap();
        assert!(matches!(
            GridDensity1D::new(g, vec![1.0; 7]),
            Err(Error::InvalidGrid(_))
        ));
        assert!(matches!(
            GridDensity1D::new(g, vec![2.0; 8]),
            Err(Error::MassNotNormalized { .. })
        ));
        let mut v = vec![1.0; 8];
        v[3] = -0.1;
        assert!(matches!(
            GridDensity1D::normalized(g, v),
            Err(Error::NegativeDensity { index: 3, .. })
        ));
        assert!(Grid1D::new(1.0, 0.0, 8).is_err());
        assert!(Grid1D::new(0.0, 1.0, 7).is_err());
        assert!(CdfCurve::new(g, vec![0.5, 0.4, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).is_err());
        assert!(CdfCurve::new(g, vec![0.1; 8]).is_err());
    }

    #[test]
    fn cdf_round_trip_recovers_density() {
        let g = Grid1D::new(-4.0, 4.0, 256).unwrap();
        let f = GridDensity1D::from_fn(g, |x: f64| (-x * x / 2.0).exp()).unwrap();
        let back = f.cdf().to_density();
        assert!(f.max_abs_diff(&back).unwrap() < 1e-6);
    }

    #[test]
    fn generic_over_f32() {
        let g = Grid1D::<f32>::new(0.0, 1.0, 32).unwrap();
        let f = GridDensity1D::new(g, vec![1.0f32; 32]).unwrap();
        assert!((f.cdf().mean() - 0.5).abs() < 1e-5);
    }
}
