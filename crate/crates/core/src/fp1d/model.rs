use serde::{Deserialize, Serialize};

use crate::density::{AnalyticDensity, Grid1D};
use crate::error::{invalid, Result};

/// One-dimensional Fokker–Planck equations with linear drift, written in flux form
/// `f_t = (D f_x + B f)_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case", deny_unknown_fields)]
pub enum FpModel1D {
    /// `f_t = (sigma f_x + x f)_x`.
    ConstantDiffusion { sigma: f64 },
    /// `f_t = ((f^p)_x + x f)_x`.
    PorousMedium { p: f64 },
    /// `f_t = (sigma/2)(x^2 f)_xx + lambda ((x-1) f)_x` on `x > 0`.
    Wealth { sigma: f64, lambda: f64 },
    /// `f_t = (lambda/2)((1-x^2) f)_xx + ((x-m) f)_x` on `(-1, 1)`.
    Opinion { lambda: f64, m: f64 },
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(invalid(name, format!("must be positive and finite, got {v}")))
    }
}

impl FpModel1D {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Self::ConstantDiffusion { sigma } => positive("sigma", sigma),
            Self::PorousMedium { p } => {
                if p.is_finite() && p > 1.0 {
                    Ok(())
                } else {
                    Err(invalid("p", format!("porous-medium exponent must exceed 1, got {p}")))
                }
            }
            Self::Wealth { sigma, lambda } => {
                positive("sigma", sigma)?;
                positive("lambda", lambda)
            }
            Self::Opinion { lambda, m } => {
                positive("lambda", lambda)?;
                if m.is_finite() && m.abs() < 1.0 {
                    Ok(())
                } else {
                    Err(invalid("m", format!("mean opinion must lie in (-1, 1), got {m}")))
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::ConstantDiffusion { .. } => "constant_diffusion",
            Self::PorousMedium { .. } => "porous_medium",
            Self::Wealth { .. } => "wealth",
            Self::Opinion { .. } => "opinion",
        }
    }

    /// Equilibrium of unit mass.
    pub fn steady_state(&self) -> Result<AnalyticDensity> {
        self.validate()?;
        match *self {
            Self::ConstantDiffusion { sigma } => AnalyticDensity::gaussian_1d(0.0, sigma),
            Self::PorousMedium { p } => AnalyticDensity::barenblatt(p),
            Self::Wealth { sigma, lambda } => AnalyticDensity::inverse_gamma(1.0 + 2.0 * lambda / sigma),
            Self::Opinion { lambda, m } => AnalyticDensity::beta_opinion(m, lambda),
        }
    }

    /// Linear diffusion coefficient `D(x)`; `None` for the nonlinear model.
    pub fn diffusion(&self, x: f64) -> Option<f64> {
        match *self {
            Self::ConstantDiffusion { sigma } => Some(sigma),
            Self::PorousMedium { .. } => None,
            Self::Wealth { sigma, .. } => Some(0.5 * sigma * x * x),
            Self::Opinion { lambda, .. } => Some(0.5 * lambda * (1.0 - x * x)),
        }
    }

    /// Flux drift `B(x)`, including the part coming from a variable diffusion.
    pub fn flux_drift(&self, x: f64) -> f64 {
        match *self {
            Self::ConstantDiffusion { .. } | Self::PorousMedium { .. } => x,
            Self::Wealth { sigma, lambda } => sigma * x + lambda * (x - 1.0),
            Self::Opinion { lambda, m } => x - lambda * x - m,
        }
    }

    /// `(rate, target)` of the first-moment equation `d<x>/dt = -rate (<x> - target)`.
    pub fn mean_dynamics(&self) -> (f64, f64) {
        match *self {
            Self::ConstantDiffusion { .. } | Self::PorousMedium { .. } => (1.0, 0.0),
            Self::Wealth { lambda, .. } => (lambda, 1.0),
            Self::Opinion { m, .. } => (1.0, m),
        }
    }

    /// Decay rate of the squared Cramér distance guaranteed by the drift term alone.
    pub fn cramer_rate(&self) -> f64 {
        match *self {
            Self::Wealth { lambda, .. } => lambda,
            _ => 1.0,
        }
    }

    /// Default computational window with `n_cells` cells.
    pub fn default_grid(&self, n_cells: usize) -> Result<Grid1D<f64>> {
        self.validate()?;
        match *self {
            Self::ConstantDiffusion { sigma } => {
                let l = 8.0 * sigma.sqrt().max(1.0);
                Grid1D::new(-l, l, n_cells)
            }
            Self::PorousMedium { .. } => {
                let c = match self.steady_state()? {
                    AnalyticDensity::Barenblatt { c, .. } => c,
                    _ => unreachable!("porous equilibrium is a Barenblatt profile"),
                };
                let l = if 1.3 * c <= 2.0 { 2.0 } else { (2.6 * c).ceil() / 2.0 };
                Grid1D::new(-l, l, n_cells)
            }
            Self::Wealth { .. } => Grid1D::new(0.0, 40.0, n_cells),
            Self::Opinion { .. } => Grid1D::new(-1.0, 1.0, n_cells),
        }
    }

    /// Clipped-mass tolerance used when rasterizing the equilibrium on the default window.
    pub fn tail_tolerance(&self) -> f64 {
        match self {
            Self::Wealth { .. } => 1e-3,
            _ => crate::density::DEFAULT_TAIL_TOLERANCE,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn steady_state_parameters() {
        let g = FpModel1D::ConstantDiffusion { sigma: 2.0 }.steady_state().unwrap();
        assert_eq!(g, AnalyticDensity::gaussian_1d(0.0, 2.0).unwrap());
        let w = FpModel1D::Wealth { sigma: 1.0, lambda: 1.0 }.steady_state().unwrap();
        assert_eq!(w, AnalyticDensity::InverseGamma { mu: 3.0 });
        let o = FpModel1D::Opinion { lambda: 0.5, m: 0.2 }.steady_state().unwrap();
        assert_eq!(o, AnalyticDensity::BetaOpinion { m: 0.2, lambda: 0.5 });
        // exponents -1 + (1 -/+ m)/lambda
        let x: f64 = 0.3;
        let ratio = o.pdf(x) / o.pdf(0.0);
        let expect = (1.0 - x).powf(-1.0 + 0.8 / 0.5) * (1.0 + x).powf(-1.0 + 1.2 / 0.5);
        assert!((ratio - expect).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(FpModel1D::Opinion { lambda: 0.0, m: 0.0 }.validate().is_err());
        assert!(FpModel1D::Opinion { lambda: 1.0, m: 1.0 }.validate().is_err());
        assert!(FpModel1D::PorousMedium { p: 1.0 }.validate().is_err());
        let err = FpModel1D::Wealth { sigma: 1.0, lambda: -1.0 }.validate().unwrap_err();
        assert!(err.to_string().contains("lambda"));
    }

    #[test]
    fn equilibria_fit_default_windows() {
        for m in [
            FpModel1D::ConstantDiffusion { sigma: 1.0 },
            FpModel1D::PorousMedium { p: 2.0 },
            FpModel1D::PorousMedium { p: 1.5 },
            FpModel1D::Wealth { sigma: 1.0, lambda: 1.0 },
            FpModel1D::Opinion { lambda: 4.0, m: -0.8 },
        ] {
            let g = m.default_grid(1024).unwrap();
            m.steady_state()
                .unwrap()
                .rasterize_with_tolerance(&g, m.tail_tolerance())
                .unwrap();
        }
    }
}
