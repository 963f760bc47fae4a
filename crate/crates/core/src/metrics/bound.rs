use serde::{Deserialize, Serialize};

use super::constants::{check_negative_order, MetricConstants};
use super::fourier::{d1_metric, energy_alpha_fourier, energy_negative_fourier, FourierGrid, Spectral};
use crate::error::Result;

/// Both sides of `E_alpha <= D d1^{4/(4-alpha)} E_{-(2-alpha)}^{(2-alpha)/(4-alpha)}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InterpolationBound {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub d1: f64,
    pub e_negative: f64,
    pub constants: MetricConstants,
}

impl InterpolationBound {
    /// Bound before optimizing over the frequency split radius `r`.
    pub fn two_term(&self, r: f64) -> f64 {
        self.constants.two_term_bound(self.d1, self.e_negative, r)
    }

    pub fn optimal_radius(&self) -> f64 {
        self.constants.optimal_radius(self.d1, self.e_negative)
    }
}

/// Evaluates the three distances in Fourier form on a common quadrature.
pub fn interpolation_bound<S: Spectral + ?Sized>(
    f: &S,
    g: &S,
    alpha: f64,
    fg: Option<&FourierGrid>,
) -> Result<InterpolationBound> {
    let diff = f.spectral_diff(g)?;
    check_negative_order(diff.dim(), alpha)?;
    let owned;
    let fg = match fg {
        Some(g) => g,
        None => {
            owned = diff.default_grid()?;
            &owned
        }
    };
    let constants = MetricConstants::new(diff.dim(), alpha)?;
    let lhs = energy_alpha_fourier(f, g, alpha, Some(fg))?.value.max(0.0);
    let e_negative = energy_negative_fourier(f, g, alpha, Some(fg))?.value.max(0.0);
    let d1 = d1_metric(f, g, Some(fg))?.value;
    let rhs = constants.optimized_bound(d1, e_negative);
    Ok(InterpolationBound {
        lhs,
        rhs,
        holds: lhs <= rhs * (1.0 + 1e-6),
        d1,
        e_negative,
        constants,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::IsoGaussianMixture;

    #[test]
    fn gaussian_pairs() {
        let cases = [
            (vec![0.0, 0.0], 1.0, vec![1.0, 0.0], 1.0, 1.0),
            (vec![0.0; 3], 1.0, vec![0.0; 3], 1.5, 0.5),
        ];
        for (m0, v0, m1, v1, alpha) in cases {
            let a = IsoGaussianMixture::single(m0, v0).unwrap();
            let b = IsoGaussianMixture::single(m1, v1).unwrap();
            let r = interpolation_bound(&a, &b, alpha, None).unwrap();
            assert!(r.holds, "{r:?}");
            assert!(r.lhs > 0.0);
            let r0 = r.optimal_radius();
            for k in 0..20 {
                let s = 0.1 * 1.3f64.powi(k);
                assert!(r.two_term(r0 * s) >= r.rhs * (1.0 - 1e-9));
            }
        }
        let a = IsoGaussianMixture::single(vec![0.0, 0.0], 1.0).unwrap();
        let r = interpolation_bound(&a, &a, 1.0, None).unwrap();
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }
}
