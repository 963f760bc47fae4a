use serde::{Deserialize, Serialize};

use super::model::FpModel1D;
use crate::density::{AnalyticDensity, Grid1D, GridDensity1D};
use crate::error::{invalid, Error, Result};
use crate::scalar::{lit, to_f64, Real};
use crate::special::bernoulli;

/// Values below this count as rounding noise and are set to zero.
pub const NEGATIVE_TOLERANCE: f64 = 1e-12;

/// Time stepping of the finite-volume scheme.
///
/// `theta = 1` is backward Euler (unconditionally positive), `theta = 0.5` Crank–Nicolson.
/// For `theta < 1` the explicit part must satisfy `(1 - theta) dt max|L_ii| <= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_final: f64,
    /// Steps between stored snapshots.
    pub stride: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

fn default_theta() -> f64 {
    1.0
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_final: 2.0,
            stride: 100,
            theta: 1.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("must be positive, got {}", self.dt)));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(invalid("t_final", format!("must be nonnegative, got {}", self.t_final)));
        }
        if self.stride == 0 {
            return Err(invalid("stride", "must be at least 1"));
        }
        if !(self.theta >= 0.5 && self.theta <= 1.0) {
            return Err(invalid("theta", format!("must lie in [0.5, 1], got {}", self.theta)));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_final / self.dt - 1e-9).ceil().max(0.0) as usize
    }
}

/// Tridiagonal operator `(L f)_i = lower_i f_{i-1} + diag_i f_i + upper_i f_{i+1}`.
#[derive(Debug, Clone)]
struct Tridiag {
    lower: Vec<f64>,
    diag: Vec<f64>,
    upper: Vec<f64>,
}

impl Tridiag {
    /// Assembles `L f = (J_{i+1/2} - J_{i-1/2}) / h` from face fluxes
    /// `J_{i+1/2} = a_i f_{i+1} - b_i f_i`; boundary faces carry no flux.
    fn from_faces(a: &[f64], b: &[f64], h: f64) -> Self {
        let n = a.len() + 1;
        let mut lower = vec![0.0; n];
        let mut diag = vec![0.0; n];
        let mut upper = vec![0.0; n];
        for i in 0..n {
            if i + 1 < n {
                upper[i] = a[i] / h;
                diag[i] -= b[i] / h;
            }
            if i > 0 {
                lower[i] = b[i - 1] / h;
                diag[i] -= a[i - 1] / h;
            }
        }
        Self { lower, diag, upper }
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        for i in 0..n {
            let mut v = self.diag[i] * f[i];
            if i > 0 {
                v += self.lower[i] * f[i - 1];
            }
            if i + 1 < n {
                v += self.upper[i] * f[i + 1];
            }
            out[i] = v;
        }
    }

    fn max_diag(&self) -> f64 {
        self.diag.iter().fold(0.0, |m, d| m.max(d.abs()))
    }
}

/// LU factors of `I - c L` for repeated Thomas solves.
#[derive(Debug, Clone)]
struct Factored {
    lower: Vec<f64>,
    upper: Vec<f64>,
    pivot: Vec<f64>,
}

impl Factored {
    fn new(op: &Tridiag, c: f64) -> Self {
        let n = op.diag.len();
        let lower: Vec<f64> = op.lower.iter().map(|l| -c * l).collect();
        let upper: Vec<f64> = op.upper.iter().map(|u| -c * u).collect();
        let mut pivot = vec![0.0; n];
        pivot[0] = 1.0 - c * op.diag[0];
        for i in 1..n {
            pivot[i] = 1.0 - c * op.diag[i] - lower[i] * upper[i - 1] / pivot[i - 1];
        }
        Self { lower, upper, pivot }
    }

    fn solve(&self, rhs: &mut [f64]) {
        let n = rhs.len();
        for i in 1..n {
            rhs[i] -= self.lower[i] / self.pivot[i - 1] * rhs[i - 1];
        }
        rhs[n - 1] /= self.pivot[n - 1];
        for i in (0..n - 1).rev() {
            rhs[i] = (rhs[i] - self.upper[i] * rhs[i + 1]) / self.pivot[i];
        }
    }
}

/// Well-balanced data for the porous-medium model: pressure `P(f) = p/(p-1) f^{p-1}`
/// and a discrete confinement potential equal to `C^2/2 - P(f*)` on the support of
/// the rasterized equilibrium `f*` and to `x^2/2` outside it.
#[derive(Debug, Clone)]
struct Porous {
    p: f64,
    potential: Vec<f64>,
}

impl Porous {
    fn pressure(&self, f: f64) -> f64 {
        if f <= 0.0 {
            0.0
        } else {
            self.p / (self.p - 1.0) * f.powf(self.p - 1.0)
        }
    }

    fn operator(&self, f: &[f64], h: f64) -> Tridiag {
        let n = f.len();
        let mut a = vec![0.0; n - 1];
        let mut b = vec![0.0; n - 1];
        for i in 0..n - 1 {
            let (fl, fr) = (f[i].max(0.0), f[i + 1].max(0.0));
            let (pl, pr) = (self.pressure(fl), self.pressure(fr));
            let fitted = if fl > 0.0 && fr > 0.0 {
                let dlog = fr.ln() - fl.ln();
                let d = if dlog.abs() < 1e-10 {
                    self.p * (0.5 * (fl + fr)).powf(self.p - 1.0)
                } else {
                    (pr - pl) / dlog
                };
                let w = (self.potential[i + 1] - self.potential[i]) / d;
                (d > 0.0 && w.is_finite()).then_some((d, w))
            } else {
                None
            };
            if let Some((d, w)) = fitted {
                a[i] = d / h * bernoulli(-w);
                b[i] = d / h * bernoulli(w);
            } else {
                let delta = (pr + self.potential[i + 1]) - (pl + self.potential[i]);
                a[i] = delta.max(0.0) / h;
                b[i] = (-delta).max(0.0) / h;
            }
        }
        Tridiag::from_faces(&a, &b, h)
    }
}

#[derive(Debug, Clone)]
enum Kind {
    Linear { op: Tridiag, factored: Factored },
    Porous(Porous),
}

/// Exponentially fitted finite-volume solver on a fixed grid with no-flux boundaries.
///
/// For the linear models the face weights are fitted to the rasterized equilibrium,
/// `w_{i+1/2} = ln f*_i - ln f*_{i+1}`, so that equilibrium is an exact discrete
/// steady state; the face flux is `(D/h) [Bern(-w) f_{i+1} - Bern(w) f_i]`.
#[derive(Debug, Clone)]
pub struct FpSolver {
    model: FpModel1D,
    grid: Grid1D<f64>,
    cfg: SolverConfig,
    kind: Kind,
}

impl FpSolver {
    pub fn new(model: FpModel1D, grid: Grid1D<f64>, cfg: SolverConfig) -> Result<Self> {
        model.validate()?;
        cfg.validate()?;
        let h = grid.h();
        let n = grid.n_cells();
        let eq = model.steady_state()?;
        let kind = match model {
            FpModel1D::PorousMedium { p } => {
                let star = eq.rasterize_with_tolerance::<f64>(&grid, model.tail_tolerance())?;
                let c = match eq {
                    AnalyticDensity::Barenblatt { c, .. } => c,
                    _ => unreachable!("porous equilibrium is a Barenblatt profile"),
                };
                let mut porous = Porous {
                    p,
                    potential: Vec::with_capacity(n),
                };
                let potential = star
                    .values()
                    .iter()
                    .zip(grid.centers())
                    .map(|(&f, x)| if f > 0.0 { 0.5 * c * c - porous.pressure(f) } else { 0.5 * x * x })
                    .collect();
                porous.potential = potential;
                Kind::Porous(porous)
            }
            _ => {
                let logs = eq.log_cell_averages(&grid)?;
                let mut a = vec![0.0; n - 1];
                let mut b = vec![0.0; n - 1];
                for i in 0..n - 1 {
                    let d = model.diffusion(grid.edge(i + 1)).expect("linear model");
                    let w = logs[i] - logs[i + 1];
                    a[i] = d / h * bernoulli(-w);
                    b[i] = d / h * bernoulli(w);
                }
                let op = Tridiag::from_faces(&a, &b, h);
                check_stability(&op, &cfg)?;
                let factored = Factored::new(&op, cfg.theta * cfg.dt);
                Kind::Linear { op, factored }
            }
        };
        Ok(Self { model, grid, cfg, kind })
    }

    /// Solver on the model's default window.
    pub fn with_default_grid(model: FpModel1D, n_cells: usize, cfg: SolverConfig) -> Result<Self> {
        let grid = model.default_grid(n_cells)?;
        Self::new(model, grid, cfg)
    }

    pub fn model(&self) -> FpModel1D {
        self.model
    }

    pub fn grid(&self) -> &Grid1D<f64> {
        &self.grid
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    /// Equilibrium rasterized on the solver grid.
    pub fn equilibrium<T: Real>(&self) -> Result<GridDensity1D<T>> {
        let g = Grid1D::new(lit(self.grid.x_min()), lit(self.grid.x_max()), self.grid.n_cells())?;
        self.model
            .steady_state()?
            .rasterize_with_tolerance(&g, self.model.tail_tolerance())
    }

    /// Advances cell values by one step in place.
    pub fn step_values(&self, f: &mut [f64]) -> Result<()> {
        let n = f.len();
        if n != self.grid.n_cells() {
            return Err(Error::GridMismatch);
        }
        let theta = self.cfg.theta;
        let dt = self.cfg.dt;
        let mut rhs = f.to_vec();
        match &self.kind {
            Kind::Linear { op, factored } => {
                explicit_part(op, f, &mut rhs, (1.0 - theta) * dt);
                factored.solve(&mut rhs);
            }
            Kind::Porous(porous) => {
                let op = porous.operator(f, self.grid.h());
                check_stability(&op, &self.cfg)?;
                explicit_part(&op, f, &mut rhs, (1.0 - theta) * dt);
                Factored::new(&op, theta * dt).solve(&mut rhs);
            }
        }
        let min = rhs.iter().copied().fold(f64::INFINITY, f64::min);
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NegativeDensityBeyondTolerance { min: f64::NAN });
        }
        if min < -NEGATIVE_TOLERANCE {
            return Err(Error::NegativeDensityBeyondTolerance { min });
        }
        for (fi, r) in f.iter_mut().zip(rhs) {
            *fi = r.max(0.0);
        }
        Ok(())
    }

    /// One step of a grid density living on the solver grid.
    pub fn step<T: Real>(&self, f: &GridDensity1D<T>) -> Result<GridDensity1D<T>> {
        if f.grid().to_f64() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut v: Vec<f64> = f.values().iter().map(|&x| to_f64(x)).collect();
        self.step_values(&mut v)?;
        GridDensity1D::normalized(*f.grid(), v.into_iter().map(lit).collect())
    }

    /// Runs to `t_final`, storing the initial state and every `stride`-th step.
    pub fn evolve<T: Real>(&self, f0: &GridDensity1D<T>) -> Result<Vec<Snapshot<T>>> {
        if f0.grid().to_f64() != self.grid {
            return Err(Error::GridMismatch);
        }
        let mut v: Vec<f64> = f0.values().iter().map(|&x| to_f64(x)).collect();
        let mut out = vec![Snapshot::new(0.0, f0.clone())];
        let steps = self.cfg.steps();
        for k in 1..=steps {
            self.step_values(&mut v)?;
            if k % self.cfg.stride == 0 || k == steps {
                let t = k as f64 * self.cfg.dt;
                let density = GridDensity1D::new(*f0.grid(), v.iter().map(|&x| lit(x)).collect())?;
                out.push(Snapshot::new(t, density));
            }
        }
        Ok(out)
    }
}

fn explicit_part(op: &Tridiag, f: &[f64], rhs: &mut [f64], c: f64) {
    if c == 0.0 {
        return;
    }
    let mut lf = vec![0.0; f.len()];
    op.apply(f, &mut lf);
    for (r, l) in rhs.iter_mut().zip(lf) {
        *r += c * l;
    }
}

fn check_stability(op: &Tridiag, cfg: &SolverConfig) -> Result<()> {
    let explicit = 1.0 - cfg.theta;
    if explicit > 0.0 {
        let limit = 1.0 / (explicit * op.max_diag());
        if cfg.dt > limit {
            return Err(Error::StabilityViolation { dt: cfg.dt, limit });
        }
    }
    Ok(())
}

/// One step of `model` on the grid of `f`.
pub fn step<T: Real>(model: FpModel1D, f: &GridDensity1D<T>, cfg: &SolverConfig) -> Result<GridDensity1D<T>> {
    FpSolver::new(model, f.grid().to_f64(), *cfg)?.step(f)
}

/// Evolution of `f0` under `model` on the grid of `f0`.
pub fn evolve<T: Real>(model: FpModel1D, f0: &GridDensity1D<T>, cfg: &SolverConfig) -> Result<Vec<Snapshot<T>>> {
    FpSolver::new(model, f0.grid().to_f64(), *cfg)?.evolve(f0)
}

/// Solution at time `t` with mass, mean and minimum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot<T> {
    pub t: f64,
    pub density: GridDensity1D<T>,
    pub mass: f64,
    pub mean: f64,
    pub min: f64,
}

impl<T: Real> Snapshot<T> {
    pub fn new(t: f64, density: GridDensity1D<T>) -> Self {
        Self {
            t,
            mass: to_f64(density.mass()),
            mean: to_f64(density.mean()),
            min: to_f64(density.min_value()),
            density,
        }
    }
}
