use serde::{Deserialize, Serialize};

use super::energy::cross_sum;
use super::{DistanceValue, Form};
use crate::density::{CdfCurve, SampleCloud};
use crate::error::{Error, Result};
use crate::scalar::{to_f64, Real};
use crate::special::tree_sum;

/// `int (F - G)^2` by the trapezoid rule on the cell edges.
///
/// Equal to the exact Cramér distance between the point masses `F_i - F_{i-1}`
/// placed at the cell centers.
pub fn cramer_cdf<T: Real>(f: &CdfCurve<T>, g: &CdfCurve<T>) -> Result<DistanceValue<T>> {
    f.grid().ensure_same(g.grid())?;
    let h = to_f64(f.grid().h());
    let (a, b) = (f.node_values(), g.node_values());
    let terms: Vec<f64> = a
        .windows(2)
        .zip(b.windows(2))
        .map(|(p, q)| {
            let d0 = to_f64(p[0]) - to_f64(q[0]);
            let d1 = to_f64(p[1]) - to_f64(q[1]);
            0.5 * h * (d0 * d0 + d1 * d1)
        })
        .collect();
    Ok(DistanceValue::exact(tree_sum(&terms), Form::Cdf, terms.len()).cast())
}

/// Expectation form `E|X-Y| - E|X-X'|/2 - E|Y-Y'|/2` with weighted double sums.
pub fn cramer_expectation<T: Real>(x: &SampleCloud<T>, y: &SampleCloud<T>) -> Result<DistanceValue<T>> {
    for c in [x, y] {
        if c.dim() != 1 {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: c.dim(),
            });
        }
    }
    let (x, y) = (x.to_f64(), y.to_f64());
    let k = |d: f64| d;
    let xy = cross_sum(&x, &y, k);
    let xx = cross_sum(&x, &x, k);
    let yy = cross_sum(&y, &y, k);
    let value = xy - 0.5 * (xx + yy);
    let scale = xy.abs() + 0.5 * (xx.abs() + yy.abs());
    let n = x.len() * y.len();
    Ok(DistanceValue {
        value,
        form: Form::Expectation,
        err: 8.0 * f64::EPSILON * (n as f64).sqrt() * scale,
        tail_bound: 0.0,
    }
    .cast())
}

/// `int (F_X - F_Y)^2` for the exact step distribution functions of two 1D clouds.
pub fn cramer_empirical<T: Real>(x: &SampleCloud<T>, y: &SampleCloud<T>) -> Result<DistanceValue<T>> {
    let mut events: Vec<(f64, f64)> = x
        .sorted_atoms()?
        .into_iter()
        .map(|(p, w)| (to_f64(p), to_f64(w)))
        .chain(y.sorted_atoms()?.into_iter().map(|(p, w)| (to_f64(p), -to_f64(w))))
        .collect();
    events.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut diff = 0.0;
    let mut terms = Vec::with_capacity(events.len());
    for pair in events.windows(2) {
        diff += pair[0].1;
        terms.push(diff * diff * (pair[1].0 - pair[0].0));
    }
    Ok(DistanceValue::exact(tree_sum(&terms), Form::Cdf, terms.len()).cast())
}

/// Distribution function of `min(X, Y)` for independent `X ~ F`, `Y ~ G`.
pub fn min_cdf<T: Real>(f: &CdfCurve<T>, g: &CdfCurve<T>) -> Result<CdfCurve<T>> {
    f.grid().ensure_same(g.grid())?;
    let values = f
        .values()
        .iter()
        .zip(g.values())
        .map(|(&a, &b)| (T::one() - (T::one() - a) * (T::one() - b)).min(T::one()))
        .collect();
    CdfCurve::new(*f.grid(), values)
}

/// Gini index in its pairwise and distribution-function forms.
///
/// `pairwise = E|X-X'| / (2 E X)`, `dorfman = 1 - int_0^inf (1-F)^2 / E X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GiniIndex {
    pub pairwise: f64,
    pub dorfman: f64,
    pub discrepancy: f64,
    pub mean: f64,
}

impl GiniIndex {
    fn from_parts(mean: f64, mean_abs_diff: f64, tail_square: f64) -> Result<Self> {
        if !(mean > 0.0) {
            return Err(Error::NonPositiveMean(mean));
        }
        let pairwise = mean_abs_diff / (2.0 * mean);
        let dorfman = 1.0 - tail_square / mean;
        Ok(Self {
            pairwise,
            dorfman,
            discrepancy: (pairwise - dorfman).abs(),
            mean,
        })
    }

    pub fn value(&self) -> f64 {
        self.pairwise
    }
}

/// Laws on `[0, inf)` whose Gini index can be computed.
pub trait GiniSource {
    fn gini_index(&self) -> Result<GiniIndex>;
}

/// `E|X-X'|` and `int_0^inf (1-F)^2` for sorted atoms on `[0, inf)`.
fn atom_gini_parts(atoms: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    if let Some(&(x, _)) = atoms.iter().find(|a| a.0 < 0.0 && a.1 > 0.0) {
        return Err(Error::NegativeSupport(x));
    }
    let total: f64 = tree_sum(&atoms.iter().map(|a| a.1).collect::<Vec<_>>());
    let mean = tree_sum(&atoms.iter().map(|a| a.0 * a.1).collect::<Vec<_>>());
    let mut below = 0.0;
    let mut diff_terms = Vec::with_capacity(atoms.len());
    let mut tail_terms = Vec::with_capacity(atoms.len() + 1);
    let mut prev_x = 0.0;
    for &(x, w) in atoms {
        let above = total - below - w;
        diff_terms.push(2.0 * w * x * (below - above));
        let s = 1.0 - below;
        tail_terms.push(s * s * (x - prev_x));
        below += w;
        prev_x = x;
    }
    Ok((mean, tree_sum(&diff_terms), tree_sum(&tail_terms)))
}

impl<T: Real> GiniSource for SampleCloud<T> {
    fn gini_index(&self) -> Result<GiniIndex> {
        let atoms: Vec<(f64, f64)> = self
            .sorted_atoms()?
            .into_iter()
            .map(|(x, w)| (to_f64(x), to_f64(w)))
            .collect();
        let (mean, mad, tail) = atom_gini_parts(&atoms)?;
        GiniIndex::from_parts(mean, mad, tail)
    }
}

impl<T: Real> GiniSource for CdfCurve<T> {
    /// Atoms `F_i - F_{i-1}` at the cell centers; the distribution-function form
    /// uses the trapezoid rule on `(1-F)^2`, which coincides with the step integral.
    fn gini_index(&self) -> Result<GiniIndex> {
        let g = self.grid().to_f64();
        if g.x_min() < 0.0 {
            return Err(Error::NegativeSupport(g.x_min()));
        }
        let nodes: Vec<f64> = self.node_values().into_iter().map(to_f64).collect();
        let atoms: Vec<(f64, f64)> = nodes
            .windows(2)
            .enumerate()
            .map(|(i, w)| (g.center(i), (w[1] - w[0]).max(0.0)))
            .collect();
        let (mean, mad, _) = atom_gini_parts(&atoms)?;
        let h = g.h();
        let tail_terms: Vec<f64> = nodes
            .windows(2)
            .map(|w| 0.5 * h * ((1.0 - w[0]).powi(2) + (1.0 - w[1]).powi(2)))
            .collect();
        let tail = g.x_min() + tree_sum(&tail_terms);
        GiniIndex::from_parts(mean, mad, tail)
    }
}

pub fn gini<S: GiniSource + ?Sized>(x: &S) -> Result<GiniIndex> {
    x.gini_index()
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{AnalyticDensity, Grid1D, GridDensity1D};

    fn step_cdf(grid: Grid1D<f64>, at: f64) -> CdfCurve<f64> {
        let values = (0..grid.n_cells()).map(|i| if grid.edge(i + 1) >= at { 1.0 } else { 0.0 }).collect();
        CdfCurve::new(grid, values).unwrap()
    }

    #[test]
    fn point_masses() {
        let g = Grid1D::new(-1.0, 3.0, 400).unwrap();
        let d = cramer_cdf(&step_cdf(g, 0.0), &step_cdf(g, 1.5)).unwrap();
        assert!((d.value - 1.5).abs() < 1e-12);
        let x = SampleCloud::from_1d(vec![0.0]).unwrap();
        let y = SampleCloud::from_1d(vec![1.5]).unwrap();
        assert_eq!(cramer_expectation(&x, &y).unwrap().value, 1.5);
        assert_eq!(cramer_expectation(&x, &x).unwrap().value, 0.0);
        assert_eq!(cramer_empirical(&x, &y).unwrap().value, 1.5);
    }

    #[test]
    fn gaussian_shift_against_quadrature() {
        let g = Grid1D::new(-10.0, 11.0, 4096).unwrap();
        let a = AnalyticDensity::gaussian_1d(0.0, 1.0).unwrap();
        let b = AnalyticDensity::gaussian_1d(1.0, 1.0).unwrap();
        let d = cramer_cdf(&a.rasterize(&g).unwrap().cdf(), &b.rasterize(&g).unwrap().cdf()).unwrap();
        let m = 200_000;
        let (lo, hi) = (-12.0, 13.0);
        let step = (hi - lo) / m as f64;
        let oracle: f64 = (0..m)
            .map(|i| {
                let x = lo + (i as f64 + 0.5) * step;
                let e = crate::special::norm_cdf(x) - crate::special::norm_cdf(x - 1.0);
                e * e * step
            })
            .sum();
        assert!((d.value - oracle).abs() < 1e-5, "{} vs {oracle}", d.value);
    }

    #[test]
    fn expectation_matches_exact_step_form() {
        let a = AnalyticDensity::gaussian_1d(0.0, 1.0).unwrap().quantile_cloud(200).unwrap();
        let b = AnalyticDensity::gaussian_1d(1.0, 1.0).unwrap().quantile_cloud(200).unwrap();
        let e = cramer_expectation(&a, &b).unwrap().value;
        let s = cramer_empirical(&a, &b).unwrap().value;
        assert!((e - s).abs() < 1e-10);
    }

    #[test]
    fn gini_examples() {
        let dirac = SampleCloud::from_1d(vec![1.0]).unwrap();
        assert_eq!(gini(&dirac).unwrap().pairwise, 0.0);
        let g = Grid1D::new(0.0, 1.0, 1000).unwrap();
        let u = GridDensity1D::new(g, vec![1.0; 1000]).unwrap();
        let gi = gini(&u.cdf()).unwrap();
        assert!((gi.pairwise - 1.0 / 3.0).abs() < 1e-6);
        assert!(gi.discrepancy < 1e-12);
        let g = Grid1D::new(0.0, 30.0, 4096).unwrap();
        let e = AnalyticDensity::exponential(1.0).unwrap().rasterize(&g).unwrap();
        let gi = gini(&e.cdf()).unwrap();
        assert!((gi.pairwise - 0.5).abs() < 1e-4, "{gi:?}");
        assert!(gi.discrepancy < 1e-10);
        let neg = SampleCloud::from_1d(vec![-1.0, 2.0]).unwrap();
        assert!(matches!(gini(&neg), Err(Error::NegativeSupport(_))));
        let zero = SampleCloud::from_1d(vec![0.0]).unwrap();
        assert!(matches!(gini(&zero), Err(Error::NonPositiveMean(_))));
    }

    #[test]
    fn min_of_uniforms() {
        let g = Grid1D::new(0.0, 1.0, 1000).unwrap();
        let f = GridDensity1D::new(g, vec![1.0; 1000]).unwrap().cdf();
        let h: CdfCurve<f64> = min_cdf(&f, &f).unwrap();
        assert!((h.mean() - 1.0 / 3.0).abs() < 1e-4);
        let one = CdfCurve::new(g, vec![1.0; 1000]).unwrap();
        assert!(min_cdf(&f, &one).unwrap().values().iter().all(|&v| v == 1.0));
    }
}
