//! Translation-invariant kernels `|x - y|^p` integrated against cell pairs.

use std::collections::HashMap;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::par_tree_sum;
use crate::special::{gauss_legendre, tree_sum};

/// How the kernel is weighted between two cells.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelRule {
    /// `h^{2n} |x_i - x_j|^p` at the cell centers, zero on the diagonal. Positive `p` only.
    Midpoint,
    /// Exact `int_{cell i} int_{cell j} |x - y|^p` for piecewise-constant densities.
    CellAverage,
}

/// Offsets with `max |o_k|` up to this are integrated exactly.
const EXACT_RANGE: usize = 8;
const BOX_ORDER: usize = 12;
const DUFFY_ORDER: usize = 16;

/// Piece of the law of `|o + s|` where `s` has the triangle density on `[-1, 1]`:
/// weight `w0 + w1 v` on `[a, b]`.
#[derive(Clone, Copy)]
struct Piece {
    a: f64,
    b: f64,
    w0: f64,
    w1: f64,
}

fn pieces(o: usize) -> Vec<Piece> {
    let of = o as f64;
    match o {
        0 => vec![Piece { a: 0.0, b: 1.0, w0: 2.0, w1: -2.0 }],
        1 => vec![
            Piece { a: 0.0, b: 1.0, w0: 0.0, w1: 1.0 },
            Piece { a: 1.0, b: 2.0, w0: 2.0, w1: -1.0 },
        ],
        _ => vec![
            Piece { a: of - 1.0, b: of, w0: 1.0 - of, w1: 1.0 },
            Piece { a: of, b: of + 1.0, w0: of + 1.0, w1: -1.0 },
        ],
    }
}

/// `omega_o = int_{[-1,1]^n} prod_k (1 - |s_k|) |o + s|^p ds`, so that the double
/// integral of `|x - y|^p` over two cells of side `h` at offset `o` is `h^{2n+p} omega_o`.
///
/// Valid for `p > -n`.
pub fn cell_pair_weight(offset: &[usize], p: f64) -> f64 {
    let n = offset.len();
    let max = offset.iter().copied().max().unwrap_or(0);
    if max > EXACT_RANGE {
        let r2: f64 = offset.iter().map(|&o| (o * o) as f64).sum();
        let r = r2.sqrt();
        return r.powf(p) + p * (p + n as f64 - 2.0) * r.powf(p - 2.0) / 12.0;
    }
    let per_axis: Vec<Vec<Piece>> = offset.iter().map(|&o| pieces(o)).collect();
    let (gx, gw) = gauss_legendre(BOX_ORDER);
    let mut total = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let boxed: Vec<Piece> = choice.iter().enumerate().map(|(k, &c)| per_axis[k][c]).collect();
        if boxed.iter().all(|pc| pc.a == 0.0) {
            total.push(duffy_box(&boxed, p));
        } else {
            total.push(tensor_box(&boxed, p, &gx, &gw));
        }
        let mut k = 0;
        loop {
            if k == n {
                return tree_sum(&total);
            }
            choice[k] += 1;
            if choice[k] < per_axis[k].len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

fn tensor_box(b: &[Piece], p: f64, gx: &[f64], gw: &[f64]) -> f64 {
    let n = b.len();
    let q = gx.len();
    let mut idx = vec![0usize; n];
    let mut sum = 0.0;
    loop {
        let mut w = 1.0;
        let mut r2 = 0.0;
        for (k, pc) in b.iter().enumerate() {
            let half = 0.5 * (pc.b - pc.a);
            let v = pc.a + half * (gx[idx[k]] + 1.0);
            w *= half * gw[idx[k]] * (pc.w0 + pc.w1 * v);
            r2 += v * v;
        }
        sum += w * r2.powf(0.5 * p);
        let mut k = 0;
        loop {
            if k == n {
                return sum;
            }
            idx[k] += 1;
            if idx[k] < q {
                break;
            }
            idx[k] = 0;
            k += 1;
        }
    }
}

/// Box `[0,1]^n` containing the kernel singularity: split into the `n` pyramids
/// where one coordinate is largest, write `v = t (1, r)` and integrate `t` exactly.
fn duffy_box(b: &[Piece], p: f64) -> f64 {
    let n = b.len();
    let nf = n as f64;
    let (gx, gw) = gauss_legendre(DUFFY_ORDER);
    let q = gx.len();
    let mut total = 0.0;
    for j in 0..n {
        let others: Vec<usize> = (0..n).filter(|&k| k != j).collect();
        let mut idx = vec![0usize; others.len()];
        loop {
            // polynomial in t: prod_k (w0_k + w1_k r_k t)
            let mut poly = vec![0.0; n + 1];
            poly[0] = 1.0;
            let mut weight = 1.0;
            let mut r2 = 1.0;
            let mut rs = vec![1.0; n];
            for (slot, &k) in others.iter().enumerate() {
                let r = 0.5 * (gx[idx[slot]] + 1.0);
                weight *= 0.5 * gw[idx[slot]];
                rs[k] = r;
                r2 += r * r;
            }
            for (k, pc) in b.iter().enumerate() {
                let (c0, c1) = (pc.w0, pc.w1 * rs[k]);
                for m in (0..=n).rev() {
                    let lower = if m > 0 { poly[m - 1] } else { 0.0 };
                    poly[m] = poly[m] * c0 + lower * c1;
                }
            }
            let t_int: f64 = poly
                .iter()
                .enumerate()
                .map(|(m, c)| c / (nf + p + m as f64))
                .sum();
            total += weight * r2.powf(0.5 * p) * t_int;
            let mut s = 0;
            loop {
                if s == others.len() {
                    break;
                }
                idx[s] += 1;
                if idx[s] < q {
                    break;
                }
                idx[s] = 0;
                s += 1;
            }
            if s == others.len() {
                break;
            }
        }
    }
    total
}

/// Kernel weights `W_o` for every offset `0 <= o_k < shape_k`, row-major.
pub(crate) fn kernel_table(shape: &[usize], h: f64, p: f64, rule: KernelRule) -> Vec<f64> {
    let n = shape.len();
    let scale = h.powf(2.0 * n as f64 + p);
    let len: usize = shape.iter().product();
    let mut cache: HashMap<Vec<usize>, f64> = HashMap::new();
    let mut out = Vec::with_capacity(len);
    let mut idx = vec![0usize; n];
    for _ in 0..len {
        let w = match rule {
            KernelRule::Midpoint => {
                let r2: f64 = idx.iter().map(|&o| (o * o) as f64).sum();
                if r2 == 0.0 {
                    0.0
                } else {
                    r2.powf(0.5 * p)
                }
            }
            KernelRule::CellAverage => {
                if idx.iter().all(|&o| o <= EXACT_RANGE) {
                    let mut key = idx.clone();
                    key.sort_unstable();
                    *cache.entry(key).or_insert_with_key(|k| cell_pair_weight(k, p))
                } else {
                    cell_pair_weight(&idx, p)
                }
            }
        };
        out.push(scale * w);
        for k in (0..n).rev() {
            idx[k] += 1;
            if idx[k] < shape[k] {
                break;
            }
            idx[k] = 0;
        }
    }
    out
}

/// `sum_{i,j} W_{|i-j|} d_i d_j` with the table from [`kernel_table`].
///
/// Returns the value and a rounding scale `sum_i |d_i| sum_j |W| |d_j|` bound.
pub(crate) fn quadratic_form(shape: &[usize], table: &[f64], d: &[f64]) -> (f64, f64) {
    let len = d.len();
    let wmax = table.iter().fold(0.0f64, |m, w| m.max(w.abs()));
    let l1: f64 = d.iter().map(|x| x.abs()).sum();
    let scale = wmax * l1 * l1;
    if shape.len() == 1 || len <= 4096 {
        let strides = strides(shape);
        let value = par_tree_sum(len, |i| {
            if d[i] == 0.0 {
                return 0.0;
            }
            let ii = unflatten(i, shape);
            let row: Vec<f64> = (0..len)
                .map(|j| {
                    let mut off = 0;
                    let mut rest = j;
                    for k in 0..shape.len() {
                        let jk = rest / strides[k];
                        rest %= strides[k];
                        off += ii[k].abs_diff(jk) * strides[k];
                    }
                    table[off] * d[j]
                })
                .collect();
            d[i] * tree_sum(&row)
        });
        return (value, scale);
    }
    (fft_quadratic_form(shape, table, d), scale)
}

fn strides(shape: &[usize]) -> Vec<usize> {
    let mut s = vec![1; shape.len()];
    for k in (0..shape.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * shape[k + 1];
    }
    s
}

fn unflatten(mut flat: usize, shape: &[usize]) -> Vec<usize> {
    let mut idx = vec![0; shape.len()];
    for k in (0..shape.len()).rev() {
        idx[k] = flat % shape[k];
        flat /= shape[k];
    }
    idx
}

fn fft_quadratic_form(shape: &[usize], table: &[f64], d: &[f64]) -> f64 {
    let n = shape.len();
    let padded: Vec<usize> = shape.iter().map(|&m| 2 * m).collect();
    let plen: usize = padded.iter().product();
    let pstr = strides(&padded);
    let tstr = strides(shape);
    let mut kern = vec![Complex64::new(0.0, 0.0); plen];
    let mut dens = vec![Complex64::new(0.0, 0.0); plen];
    for (flat, slot) in kern.iter_mut().enumerate() {
        let idx = unflatten(flat, &padded);
        let mut off = 0;
        let mut ok = true;
        for k in 0..n {
            let (i, m, p) = (idx[k], shape[k], padded[k]);
            let o = if i < m {
                i
            } else if i > p - m {
                p - i
            } else {
                ok = false;
                0
            };
            off += o * tstr[k];
        }
        if ok {
            *slot = Complex64::new(table[off], 0.0);
        }
    }
    for (flat, &v) in d.iter().enumerate() {
        let idx = unflatten(flat, shape);
        let pf: usize = idx.iter().zip(&pstr).map(|(i, s)| i * s).sum();
        dens[pf] = Complex64::new(v, 0.0);
    }
    let mut planner = FftPlanner::new();
    fft_nd(&mut planner, &mut kern, &padded, false);
    fft_nd(&mut planner, &mut dens, &padded, false);
    for (a, b) in dens.iter_mut().zip(&kern) {
        *a *= b;
    }
    fft_nd(&mut planner, &mut dens, &padded, true);
    let norm = 1.0 / plen as f64;
    let terms: Vec<f64> = d
        .iter()
        .enumerate()
        .map(|(flat, &v)| {
            let idx = unflatten(flat, shape);
            let pf: usize = idx.iter().zip(&pstr).map(|(i, s)| i * s).sum();
            v * dens[pf].re * norm
        })
        .collect();
    tree_sum(&terms)
}

fn fft_nd(planner: &mut FftPlanner<f64>, data: &mut [Complex64], shape: &[usize], inverse: bool) {
    let st = strides(shape);
    let total = data.len();
    for k in 0..shape.len() {
        let m = shape[k];
        let fft = if inverse {
            planner.plan_fft_inverse(m)
        } else {
            planner.plan_fft_forward(m)
        };
        let mut line = vec![Complex64::new(0.0, 0.0); m];
        let outer = total / (m * st[k]);
        for a in 0..outer {
            for b in 0..st[k] {
                let base = a * m * st[k] + b;
                for (j, x) in line.iter_mut().enumerate() {
                    *x = data[base + j * st[k]];
                }
                fft.process(&mut line);
                for (j, x) in line.iter().enumerate() {
                    data[base + j * st[k]] = *x;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_power_gives_unit_weight() {
        for o in [vec![0], vec![1], vec![3], vec![0, 0], vec![1, 2], vec![0, 1, 5]] {
            assert!((cell_pair_weight(&o, 0.0) - 1.0).abs() < 1e-12, "{o:?}");
        }
    }

    #[test]
    fn one_dimensional_self_term() {
        for p in [-0.5, 0.3, 1.0, 1.7] {
            let exact = 2.0 * (1.0 / (1.0 + p) - 1.0 / (2.0 + p));
            assert!((cell_pair_weight(&[0], p) - exact).abs() < 1e-13);
        }
    }

    #[test]
    fn two_dimensional_weights_against_brute_force() {
        // midpoint rule on the four-dimensional cell pair integral, avoiding the singularity by offset
        let p = 1.0;
        let m = 60;
        for o in [[1usize, 0], [2, 1], [0, 0]] {
            let mut s = 0.0;
            let step = 1.0 / m as f64;
            for a in 0..m {
                for b in 0..m {
                    for c in 0..m {
                        for d in 0..m {
                            let dx = o[0] as f64 + (a as f64 - c as f64) * step;
                            let dy = o[1] as f64 + (b as f64 - d as f64) * step;
                            s += (dx * dx + dy * dy).sqrt();
                        }
                    }
                }
            }
            s *= step.powi(4);
            assert!((cell_pair_weight(&o, p) - s).abs() < 2e-4, "{o:?}: {} vs {s}", cell_pair_weight(&o, p));
        }
    }

    #[test]
    fn far_field_matches_exact_at_the_switch() {
        for (o, p) in [(vec![9usize], -0.5), (vec![9, 0], 1.0), (vec![9, 3, 0], -1.0)] {
            let mut near = o.clone();
            near[0] = 8;
            let exact = cell_pair_weight(&near, p);
            let r: f64 = near.iter().map(|&x| (x * x) as f64).sum::<f64>().sqrt();
            let approx = r.powf(p) + p * (p + o.len() as f64 - 2.0) * r.powf(p - 2.0) / 12.0;
            assert!((exact - approx).abs() < 1e-5 * exact.abs(), "{exact} vs {approx}");
        }
    }

    #[test]
    fn fft_and_direct_forms_agree() {
        let shape = [10usize, 12, 9];
        let table = kernel_table(&shape, 0.2, -1.0, KernelRule::CellAverage);
        let d: Vec<f64> = (0..shape.iter().product::<usize>())
            .map(|i| ((i * 37 % 101) as f64 / 101.0) - 0.5)
            .collect();
        let direct = quadratic_form(&shape, &table, &d).0;
        let fft = fft_quadratic_form(&shape, &table, &d);
        assert!((direct - fft).abs() < 1e-10 * direct.abs().max(1.0), "{direct} vs {fft}");
    }
}
