use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{ln_gamma, sphere_area};

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 2.0 {
        Ok(())
    } else {
        Err(Error::AlphaOutOfRange(alpha))
    }
}

pub(crate) fn check_negative_order(n: usize, alpha: f64) -> Result<()> {
    check_alpha(alpha)?;
    if n as f64 - 2.0 + alpha > 0.0 {
        Ok(())
    } else {
        Err(Error::OrderNotAdmissible { n, alpha })
    }
}

/// Fourier constant of the order-`alpha` energy distance in `R^n`:
/// `E_alpha = c * int |f^ - g^|^2 / |xi|^{n + alpha}`.
pub fn c_const(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    let nf = n as f64;
    let ln = alpha.ln() + alpha * 2f64.ln() + ln_gamma(0.5 * (nf + alpha))
        - 2f64.ln()
        - 0.5 * nf * std::f64::consts::PI.ln()
        - ln_gamma(0.5 * (2.0 - alpha));
    Ok(ln.exp())
}

/// Fourier constant of the negative-order distance:
/// `E_{-(2-alpha)} = d * int |f^ - g^|^2 / |xi|^{n - 2 + alpha}`.
pub fn d_const(n: usize, alpha: f64) -> Result<f64> {
    check_negative_order(n, alpha)?;
    let nf = n as f64;
    let ln = alpha * 2f64.ln() - 4f64.ln() - 0.5 * nf * std::f64::consts::PI.ln()
        + ln_gamma(0.5 * (nf - 2.0 + alpha))
        - ln_gamma(0.5 * (2.0 - alpha));
    Ok(ln.exp())
}

/// Constants of the interpolation inequality
/// `E_alpha <= D d_1^{4/(4-alpha)} E_{-(2-alpha)}^{(2-alpha)/(4-alpha)}`.
///
/// `a` bounds the low-frequency part (`c` times the area of the unit sphere),
/// `b = c/d` the high-frequency part; `big_d` is the minimum over the split radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConstants {
    pub n: usize,
    pub alpha: f64,
    pub c: f64,
    pub d: f64,
    pub a: f64,
    pub b: f64,
    pub big_d: f64,
}

impl MetricConstants {
    pub fn new(n: usize, alpha: f64) -> Result<Self> {
        let c = c_const(n, alpha)?;
        let d = d_const(n, alpha)?;
        let a = c * sphere_area(n);
        let b = c / d;
        let e = 4.0 - alpha;
        let bracket = 2f64.powf((2.0 - alpha) / e) / (2.0 - alpha) + 0.5f64.powf(2.0 / e);
        let big_d = a.powf(2.0 / e) * b.powf((2.0 - alpha) / e) * bracket;
        Ok(Self {
            n,
            alpha,
            c,
            d,
            a,
            b,
            big_d,
        })
    }

    /// Two-term bound `a d1^2 R^{2-alpha}/(2-alpha) + b E_- / R^2` at split radius `r`.
    pub fn two_term_bound(&self, d1: f64, e_neg: f64, r: f64) -> f64 {
        let al = self.alpha;
        self.a * d1 * d1 * r.powf(2.0 - al) / (2.0 - al) + self.b * e_neg / (r * r)
    }

    /// Radius minimizing [`Self::two_term_bound`].
    pub fn optimal_radius(&self, d1: f64, e_neg: f64) -> f64 {
        let al = self.alpha;
        (2.0 * self.b * e_neg / (self.a * d1 * d1)).powf(1.0 / (4.0 - al))
    }

    pub fn optimized_bound(&self, d1: f64, e_neg: f64) -> f64 {
        let e = 4.0 - self.alpha;
        self.big_d * d1.powf(4.0 / e) * e_neg.powf((2.0 - self.alpha) / e)
    }

    /// Rate constant of the heat-flow inequality `dE/dt <= -C E^{(4-alpha)/(2-alpha)}`.
    pub fn heat_rate(&self, d1_initial: f64) -> f64 {
        let al = self.alpha;
        let nf = self.n as f64;
        2.0 * al * (nf - 2.0 + al) * (self.big_d * d1_initial.powf(4.0 / (4.0 - al))).powf(-(4.0 - al) / (2.0 - al))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_form_values() {
        assert!((c_const(1, 1.0).unwrap() - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        let pi2 = std::f64::consts::PI.powi(2);
        assert!((d_const(3, 1.0).unwrap() - 1.0 / (2.0 * pi2)).abs() < 1e-15);
        assert!(matches!(d_const(1, 1.0), Err(Error::OrderNotAdmissible { .. })));
        assert!(matches!(c_const(2, 2.0), Err(Error::AlphaOutOfRange(_))));
    }

    #[test]
    fn optimized_bound_is_the_minimum_of_the_two_term_bound() {
        for (n, alpha) in [(2, 0.5), (2, 1.0), (3, 1.5), (3, 0.3)] {
            let k = MetricConstants::new(n, alpha).unwrap();
            let (d1, e) = (0.7, 0.03);
            let r = k.optimal_radius(d1, e);
            let best = k.two_term_bound(d1, e, r);
            assert!((best - k.optimized_bound(d1, e)).abs() < 1e-12 * best);
            for s in [0.5, 0.9, 1.1, 3.0] {
                assert!(k.two_term_bound(d1, e, r * s) >= best);
            }
        }
    }
}
