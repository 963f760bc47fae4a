//! Special functions and quadrature rules, evaluated in `f64`.

use statrs::function::{erf, gamma};

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1);
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            let p = if order == 1 { x } else { p1 };
            let pm1 = if order == 1 { 1.0 } else { p0 };
            dp = n * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    if order == 1 {
        nodes[0] = 0.0;
        weights[0] = 2.0;
    }
    (nodes, weights)
}

/// Bernoulli function `w / (e^w - 1)`, stable for all `w`.
pub fn bernoulli(w: f64) -> f64 {
    if w.abs() < 1e-8 {
        1.0 - 0.5 * w
    } else if w > 700.0 {
        w * (-w).exp()
    } else {
        w / w.exp_m1()
    }
}

/// Pairwise (tree) summation; the result depends only on the input order.
pub fn tree_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let mid = n / 2;
            tree_sum(&xs[..mid]) + tree_sum(&xs[mid..])
        }
    }
}

pub fn ln_gamma(x: f64) -> f64 {
    gamma::ln_gamma(x)
}

pub fn gamma_fn(x: f64) -> f64 {
    gamma::gamma(x)
}

/// Standard normal CDF.
pub fn norm_cdf(z: f64) -> f64 {
    0.5 * erf::erfc(-z / std::f64::consts::SQRT_2)
}

/// Standard normal survival function.
pub fn norm_sf(z: f64) -> f64 {
    0.5 * erf::erfc(z / std::f64::consts::SQRT_2)
}

/// `E|d + sqrt(s) Z|^p` for `Z ~ N(0, I_n)`, `|d| = dist`, any `p > -n`.
///
/// Uses the Poisson mixture of central chi moments: with `x = dist^2 / (2 s)`,
/// `E = s^{p/2} sum_k Pois(k; x) 2^{p/2} Gamma(n/2 + k + p/2) / Gamma(n/2 + k)`.
pub fn gaussian_abs_moment(n: usize, dist: f64, s: f64, p: f64) -> f64 {
    let nf = n as f64;
    assert!(p > -nf, "moment order must exceed -n");
    if s <= 0.0 {
        return dist.powf(p);
    }
    let x = dist * dist / (2.0 * s);
    let b = 0.5 * nf;
    let q = 0.5 * p;
    if x > 4.0e4 {
        // Large-offset expansion: |d|^p (1 + p(p+n-2) s / (2 d^2) + ...).
        let r = s / (dist * dist);
        let c1 = p * (p + nf - 2.0) / 2.0;
        let c2 = p * (p - 2.0) * (p + nf - 2.0) * (p + nf - 4.0) / 8.0;
        return dist.powf(p) * (1.0 + c1 * r + c2 * r * r);
    }
    let scale = s.powf(q) * 2f64.powf(q);
    if x == 0.0 {
        return scale * (ln_gamma(b + q) - ln_gamma(b)).exp();
    }
    let ln_x = x.ln();
    let spread = 12.0 * x.sqrt() + 40.0;
    let k_lo = (x - spread).max(0.0).floor() as usize;
    let k_hi = (x + spread).ceil() as usize;
    let terms: Vec<f64> = (k_lo..=k_hi)
        .map(|k| {
            let kf = k as f64;
            let ln_pois = -x + kf * ln_x - ln_gamma(kf + 1.0);
            (ln_pois + ln_gamma(b + kf + q) - ln_gamma(b + kf)).exp()
        })
        .collect();
    scale * tree_sum(&terms)
}

/// Average of `cos(z * omega_1)` over the unit sphere in `R^n`.
pub fn sphere_avg_cos(n: usize, z: f64) -> f64 {
    let z = z.abs();
    match n {
        1 => z.cos(),
        2 => bessel_j0(z),
        3 => {
            if z < 1e-4 {
                1.0 - z * z / 6.0
            } else {
                z.sin() / z
            }
        }
        _ => {
            // (1/B) int_0^pi cos(z cos t) sin^{n-2} t dt with GL nodes.
            let order = (z.ceil() as usize + 40).min(400);
            let (xs, ws) = gauss_legendre(order);
            let half_pi = std::f64::consts::FRAC_PI_2;
            let mut num = 0.0;
            let mut den = 0.0;
            for (&u, &w) in xs.iter().zip(&ws) {
                let t = half_pi * (u + 1.0);
                let wt = w * t.sin().powi(n as i32 - 2);
                num += wt * (z * t.cos()).cos();
                den += wt;
            }
            num / den
        }
    }
}

/// `sphere_avg_cos(n, z) - 1` without cancellation for small `z`.
pub fn sphere_avg_cos_m1(n: usize, z: f64) -> f64 {
    let z = z.abs();
    let hav = |x: f64| {
        let s = (0.5 * x).sin();
        -2.0 * s * s
    };
    match n {
        1 => hav(z),
        2 => {
            let m = (z / 2.0).ceil() as usize + 20;
            let step = std::f64::consts::PI / m as f64;
            let terms: Vec<f64> = (0..m).map(|j| hav(z * (j as f64 * step).sin())).collect();
            tree_sum(&terms) / m as f64
        }
        3 => {
            if z < 0.05 {
                let z2 = z * z;
                z2 * (-1.0 / 6.0 + z2 * (1.0 / 120.0 - z2 / 5040.0))
            } else {
                z.sin() / z - 1.0
            }
        }
        _ => {
            let order = (z.ceil() as usize + 40).min(400);
            let (xs, ws) = gauss_legendre(order);
            let half_pi = std::f64::consts::FRAC_PI_2;
            let mut num = 0.0;
            let mut den = 0.0;
            for (&u, &w) in xs.iter().zip(&ws) {
                let t = half_pi * (u + 1.0);
                let wt = w * t.sin().powi(n as i32 - 2);
                num += wt * hav(z * t.cos());
                den += wt;
            }
            num / den
        }
    }
}

/// Bessel `J0` via the periodic trapezoid rule on `(1/pi) int_0^pi cos(z sin t) dt`.
pub fn bessel_j0(z: f64) -> f64 {
    let z = z.abs();
    let m = (z / 2.0).ceil() as usize + 20;
    let step = std::f64::consts::PI / m as f64;
    let terms: Vec<f64> = (0..m).map(|j| (z * (j as f64 * step).sin()).cos()).collect();
    tree_sum(&terms) / m as f64
}

/// Tanh–sinh quadrature on `[a, b]`.
///
/// Integrable singularities are resolved at `a` down to `1e-300` of the interval;
/// at `b` only down to machine precision, so place singular endpoints on the left.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let half = 0.5 * (b - a);
    let pi2 = std::f64::consts::FRAC_PI_2;
    // Evaluate at abscissa given by distance to the nearer endpoint to keep precision.
    let eval = |t: f64| -> f64 {
        let s = pi2 * t.sinh();
        let u = s.tanh();
        let cosh_s = s.cosh();
        let w = pi2 * t.cosh() / (cosh_s * cosh_s);
        // distance from the nearer endpoint: 1 - |u| = 1/(e^{2|s|}+1) * 2
        let comp = 2.0 / ((2.0 * s.abs()).exp() + 1.0);
        let x = if u >= 0.0 { b - half * comp } else { a + half * comp };
        if !(x > a && x < b) {
            return 0.0;
        }
        let v = f(x) * w;
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let t_max = 6.0;
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while (k as f64) * h <= t_max {
        let t = k as f64 * h;
        sum += eval(t) + eval(-t);
        k += 1;
    }
    let mut estimate = sum * h * half;
    for _level in 0..10 {
        h *= 0.5;
        let mut add = 0.0;
        let mut k = 1;
        while (k as f64) * h <= t_max {
            let t = k as f64 * h;
            add += eval(t) + eval(-t);
            k += 2;
        }
        sum += add;
        let next = sum * h * half;
        let done = (next - estimate).abs() <= tol * next.abs().max(1e-300);
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

/// Bisection root of a monotone function on a bracketing interval.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= tol * (1.0 + mid.abs()) {
            return mid;
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Surface area of the unit sphere `S^{n-1}` (2 for `n = 1`).
pub fn sphere_area(n: usize) -> f64 {
    let h = 0.5 * n as f64;
    2.0 * std::f64::consts::PI.powf(h) / gamma_fn(h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_average_minus_one() {
        for n in 1..=4 {
            for z in [1e-6, 1e-3, 0.04, 0.06, 0.7, 3.0, 25.0] {
                let direct = sphere_avg_cos(n, z) - 1.0;
                let stable = sphere_avg_cos_m1(n, z);
                assert!((direct - stable).abs() < 1e-12, "n {n} z {z}");
            }
            let z = 1e-5;
            let lead = -z * z / (2.0 * n as f64);
            assert!((sphere_avg_cos_m1(n, z) - lead).abs() < 1e-6 * lead.abs(), "n {n}");
        }
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for order in [1, 2, 5, 16, 33] {
            let (x, w) = gauss_legendre(order);
            let deg = 2 * order - 1;
            let approx: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(deg as i32 - 1)).sum();
            let exact = if (deg - 1) % 2 == 0 { 2.0 / deg as f64 } else { 0.0 };
            assert!((approx - exact).abs() < 1e-13, "order {order}: {approx} vs {exact}");
        }
    }

    #[test]
    fn bernoulli_limits() {
        assert!((bernoulli(0.0) - 1.0).abs() < 1e-15);
        assert!((bernoulli(1e-9) - (1.0 - 5e-10)).abs() < 1e-15);
        assert!(bernoulli(800.0) >= 0.0);
        assert!((bernoulli(-800.0) - 800.0).abs() < 1e-9);
        let w = 0.3;
        assert!((bernoulli(-w) - bernoulli(w) - w).abs() < 1e-14);
    }

    #[test]
    fn gaussian_abs_moment_matches_folded_normal() {
        // E|N(d, s)| = sqrt(2s/pi) e^{-d^2/2s} + d (1 - 2 Phi(-d/sqrt s))
        for &(d, s) in &[(0.0, 1.0), (1.0, 2.0), (3.0, 0.5), (0.2, 4.0)] {
            let folded = (2.0 * s / std::f64::consts::PI).sqrt() * (-d * d / (2.0 * s)).exp()
                + d * (1.0 - 2.0 * norm_cdf(-d / s.sqrt()));
            let m = gaussian_abs_moment(1, d, s, 1.0);
            assert!((m - folded).abs() < 1e-12, "{m} vs {folded}");
        }
        // second moment in n dims: d^2 + n s
        let m = gaussian_abs_moment(3, 1.5, 0.7, 2.0);
        assert!((m - (2.25 + 2.1)).abs() < 1e-12);
        // large offset branch agrees with the series near the switch
        let a = gaussian_abs_moment(2, 283.0, 1.0, 0.5);
        let b = gaussian_abs_moment(2, 282.0, 1.0, 0.5);
        assert!(a > b && (a / b - (283.0f64 / 282.0).powf(0.5)).abs() < 1e-6);
    }

    #[test]
    fn sphere_average_matches_integral() {
        for &z in &[0.0, 0.5, 3.0, 17.0, 60.0] {
            // n = 2: (1/pi) int_0^pi cos(z cos t) dt by brute force
            let m = 200_000;
            let brute: f64 = (0..m)
                .map(|j| (z * (std::f64::consts::PI * (j as f64 + 0.5) / m as f64).cos()).cos())
                .sum::<f64>()
                / m as f64;
            assert!((bessel_j0(z) - brute).abs() < 1e-9, "z={z}");
        }
        assert!((sphere_avg_cos(4, 0.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let v = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-12);
        assert!((v - 2.0).abs() < 1e-9, "{v}");
        let v = tanh_sinh(|x| x.powf(-0.95), 0.0, 1.0, 1e-12);
        assert!((v - 20.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn sphere_areas() {
        assert!((sphere_area(1) - 2.0).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-13);
    }
}
