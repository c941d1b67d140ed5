//! Riemann–Liouville integrals of sampled functions by product integration.
//!
//! The integrand is taken piecewise linear between samples and the kernel
//! `(t - η)^{β-1}` is integrated exactly against each linear piece.

use rayon::prelude::*;

use super::gamma::FracOrder;
use crate::error::{FifError, Result};
use crate::fif::{locate, GraphSample};

const SERIES_TERMS: usize = 24;
const SERIES_BELOW: f64 = 0.1;
const UNIFORM_TOL: f64 = 1e-10;

/// How `a^{β-1}` is evaluated.
#[derive(Debug, Clone, Copy)]
enum Power {
    One,
    InvSqrt,
    General,
}

/// Kernel moments over one cell.
#[derive(Debug, Clone)]
pub(crate) struct Kernel {
    beta: f64,
    power: Power,
    s0: [f64; SERIES_TERMS],
    s1: [f64; SERIES_TERMS],
}

impl Kernel {
    pub(crate) fn new(beta: f64) -> Self {
        let mut s0 = [0.0; SERIES_TERMS];
        let mut s1 = [0.0; SERIES_TERMS];
        // binom(β-1, k)·(-1)^k
        let mut c = 1.0;
        for k in 0..SERIES_TERMS {
            s0[k] = c / (k + 1) as f64;
            s1[k] = c / (k + 2) as f64;
            c *= -(beta - 1.0 - k as f64) / (k + 1) as f64;
        }
        let power = if beta == 1.0 {
            Power::One
        } else if beta == 0.5 {
            Power::InvSqrt
        } else {
            Power::General
        };
        Self { beta, power, s0, s1 }
    }

    /// `(∫_0^1 (1-ru)^{β-1} du, ∫_0^1 u (1-ru)^{β-1} du)` for `r ∈ (0, 1]`.
    fn shape(&self, r: f64) -> (f64, f64) {
        if r < SERIES_BELOW {
            let mut g0 = 0.0;
            let mut g1 = 0.0;
            let terms = if r < 1e-3 {
                6
            } else if r < 1e-2 {
                9
            } else {
                SERIES_TERMS
            };
            for k in (0..terms).rev() {
                g0 = g0 * r + self.s0[k];
                g1 = g1 * r + self.s1[k];
            }
            (g0, g1)
        } else {
            let b = self.beta;
            let l = (-r).ln_1p();
            // 1 - (1-r)^β and 1 - (1-r)^{β+1}
            let d0 = -(b * l).exp_m1();
            let d1 = -((b + 1.0) * l).exp_m1();
            (d0 / (b * r), (d0 / b - d1 / (b + 1.0)) / (r * r))
        }
    }

    /// Moments of `(τ - η)^{β-1}` against `1` and `(η - s)/w` over the cell
    /// `[s, s + w]`, where `a = τ - s ≥ w > 0`.
    pub(crate) fn moments(&self, a: f64, w: f64) -> (f64, f64) {
        let (g0, g1) = self.shape((w / a).min(1.0));
        let p = match self.power {
            Power::One => 1.0,
            Power::InvSqrt => 1.0 / a.sqrt(),
            Power::General => a.powf(self.beta - 1.0),
        };
        let scale = w * p;
        (scale * g0, scale * g1)
    }
}

/// `Σ` over full cells `[t_j, t_{j+1}] ⊂ [t_0, t_end]` of the product
/// integral of the linear interpolant of `values` against
/// `(τ - η)^{β-1}`, accumulated into `out`.
pub(crate) fn accumulate_cells(
    kernel: &Kernel,
    grid: &[f64],
    values: &[f64],
    dim: usize,
    end: usize,
    tau: f64,
    out: &mut [f64],
) {
    for j in 0..end {
        let (m0, m1) = kernel.moments(tau - grid[j], grid[j + 1] - grid[j]);
        let w0 = m0 - m1;
        let (f0, f1) = (&values[j * dim..(j + 1) * dim], &values[(j + 1) * dim..(j + 2) * dim]);
        for i in 0..dim {
            out[i] += w0 * f0[i] + m1 * f1[i];
        }
    }
}

fn is_uniform(grid: &[f64]) -> Option<f64> {
    let n = grid.len() - 1;
    let h = (grid[n] - grid[0]) / n as f64;
    grid.windows(2)
        .all(|w| ((w[1] - w[0]) - h).abs() <= UNIFORM_TOL * h)
        .then_some(h)
}

/// `ₐI^β f` on the grid of `f`, componentwise, with `a` the left end.
pub fn rl_integral(f: &GraphSample, beta: FracOrder) -> Result<GraphSample> {
    let grid = f.grid();
    let dim = f.dim();
    let n = grid.len();
    let values = f.values();
    let inv_gamma = 1.0 / beta.gamma();
    let kernel = Kernel::new(beta.value());
    let rows: Vec<Vec<f64>> = match is_uniform(grid) {
        Some(h) if beta.value() != 1.0 => {
            let hb = h.powf(beta.value());
            // offset d = n - j: moments over a cell ending d - 1 cells before t_n
            let weights: Vec<(f64, f64)> = (0..n)
                .map(|d| {
                    if d == 0 {
                        (0.0, 0.0)
                    } else {
                        let (m0, m1) = kernel.moments(d as f64, 1.0);
                        (hb * (m0 - m1), hb * m1)
                    }
                })
                .collect();
            (0..n)
                .into_par_iter()
                .map(|m| {
                    let mut acc = vec![0.0; dim];
                    for j in 0..m {
                        let (w0, w1) = weights[m - j];
                        for i in 0..dim {
                            acc[i] += w0 * values[j * dim + i] + w1 * values[(j + 1) * dim + i];
                        }
                    }
                    acc.iter_mut().for_each(|v| *v *= inv_gamma);
                    acc
                })
                .collect()
        }
        _ => (0..n)
            .into_par_iter()
            .map(|m| {
                let mut acc = vec![0.0; dim];
                accumulate_cells(&kernel, grid, values, dim, m, grid[m], &mut acc);
                acc.iter_mut().for_each(|v| *v *= inv_gamma);
                acc
            })
            .collect(),
    };
    GraphSample::new(grid.to_vec(), rows.concat(), dim)
}

/// `ₐI^β f(τ)` for a single `τ` in the sampled interval.
pub fn rl_integral_at(f: &GraphSample, beta: FracOrder, tau: f64) -> Result<Vec<f64>> {
    let kernel = Kernel::new(beta.value());
    rl_at_with(&kernel, f, beta, tau)
}

pub(crate) fn rl_at_with(kernel: &Kernel, f: &GraphSample, beta: FracOrder, tau: f64) -> Result<Vec<f64>> {
    let (lo, hi) = f.interval();
    if !(tau >= lo && tau <= hi) {
        return Err(FifError::Domain(format!(
            "point {tau} outside the sampled interval [{lo}, {hi}]"
        )));
    }
    let grid = f.grid();
    let dim = f.dim();
    let mut acc = vec![0.0; dim];
    let (cell, _) = locate(grid, tau);
    // cells strictly before the one containing τ
    let full = if tau >= grid[cell + 1] { cell + 1 } else { cell };
    accumulate_cells(kernel, grid, f.values(), dim, full, tau, &mut acc);
    let w = tau - grid[full];
    if full < grid.len() - 1 && w > 0.0 {
        let (m0, m1) = kernel.moments(w, w);
        let f0 = f.value(full);
        let ft = f.eval(tau);
        for i in 0..dim {
            acc[i] += (m0 - m1) * f0[i] + m1 * ft[i];
        }
    }
    let inv_gamma = 1.0 / beta.gamma();
    acc.iter_mut().for_each(|v| *v *= inv_gamma);
    Ok(acc)
}
