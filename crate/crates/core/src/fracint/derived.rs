//! The fractal system satisfied by the fractional integral of a FIF.

use rayon::prelude::*;

use super::gamma::FracOrder;
use super::rl::{accumulate_cells, rl_at_with, rl_integral, Kernel};
use crate::error::{FifError, Result};
use crate::fif::{
    corrected_sampled_forcing, locate, FifSystem, ForcingFunction, GraphSample, InterpolationData,
    SampledGrid,
};

/// `ₓ₁I^β h` as the attractor of `H_k(t, z) = (P_k(t), a_k^β α_k z + Q_k(t))`.
#[derive(Debug, Clone, PartialEq)]
pub struct FracIntSystem {
    base: FifSystem,
    beta: FracOrder,
    derived_alphas: Vec<f64>,
    q: Vec<SampledGrid>,
    data: InterpolationData,
    source: GraphSample,
    integral: GraphSample,
}

impl FracIntSystem {
    pub fn base(&self) -> &FifSystem {
        &self.base
    }

    pub fn beta(&self) -> FracOrder {
        self.beta
    }

    /// `a_k^β α_k`.
    pub fn derived_alphas(&self) -> &[f64] {
        &self.derived_alphas
    }

    /// `Q_k` sampled on the grid of `h`.
    pub fn forcing(&self, k: usize) -> &SampledGrid {
        &self.q[k]
    }

    pub fn forcings(&self) -> &[SampledGrid] {
        &self.q
    }

    /// `(x_i, ₓ₁I^β h(x_i))`.
    pub fn data(&self) -> &InterpolationData {
        &self.data
    }

    /// The sampled `h` the system was derived from.
    pub fn source(&self) -> &GraphSample {
        &self.source
    }

    /// `ₓ₁I^β h` by direct quadrature on the grid of `h`.
    pub fn integral(&self) -> &GraphSample {
        &self.integral
    }

    /// Defects `‖Q_k(x_1) - (z_k - γ_k z_1)‖` and `‖Q_k(x_N) - (z_{k+1} - γ_k z_N)‖`
    /// of the endpoint conditions, per branch.
    pub fn endpoint_defects(&self) -> Vec<(f64, f64)> {
        let (x1, xn) = self.data.interval();
        let z1 = self.data.first_value();
        let zn = self.data.last_value();
        (0..self.q.len())
            .map(|k| {
                let g = self.derived_alphas[k];
                let mut buf = vec![0.0; self.data.dim()];
                self.q[k].eval_into(x1, &mut buf);
                let d0 = norm_diff(&buf, self.data.value(k), z1, g);
                self.q[k].eval_into(xn, &mut buf);
                let d1 = norm_diff(&buf, self.data.value(k + 1), zn, g);
                (d0, d1)
            })
            .collect()
    }

    /// The derived system as a [`FifSystem`], with each `Q_k` shifted by the
    /// affine correction that makes its endpoint conditions exact.
    pub fn to_fif_system(&self) -> Result<FifSystem> {
        let nodes = self.source.grid();
        let forcings = self
            .q
            .iter()
            .enumerate()
            .map(|(k, q)| {
                corrected_sampled_forcing(&self.data, self.derived_alphas[k], k, nodes, |t| {
                    let mut v = vec![0.0; q.dim()];
                    q.eval_into(t, &mut v);
                    v
                })
            })
            .collect::<Result<Vec<ForcingFunction>>>()?;
        FifSystem::new(self.data.clone(), self.derived_alphas.clone(), forcings)
    }
}

fn norm_diff(q: &[f64], zk: &[f64], zend: &[f64], g: f64) -> f64 {
    q.iter()
        .zip(zk.iter().zip(zend))
        .map(|(qi, (a, b))| {
            let d = qi - (a - g * b);
            d * d
        })
        .sum::<f64>()
        .sqrt()
}

fn knot_indices(sys: &FifSystem, h: &GraphSample) -> Result<Vec<usize>> {
    let grid = h.grid();
    sys.data()
        .knots()
        .iter()
        .map(|&x| {
            grid.binary_search_by(|t| t.total_cmp(&x)).map_err(|_| {
                FifError::GridMismatch(format!("knot {x} is not a node of the sample grid"))
            })
        })
        .collect()
}

/// Build `{H_k}` for `ₓ₁I^β h` from a rendered `h`, with `β ∈ (0, 1]`.
pub fn derive_fractional_ifs(sys: &FifSystem, beta: FracOrder, h: &GraphSample) -> Result<FracIntSystem> {
    let b = beta.value();
    if b > 1.0 {
        return Err(FifError::Domain(format!(
            "the derived system is built for orders in (0, 1], got {b}"
        )));
    }
    if h.dim() != sys.dim() {
        return Err(FifError::DimensionMismatch {
            expected: sys.dim(),
            got: h.dim(),
        });
    }
    if h.interval() != sys.interval() {
        return Err(FifError::GridMismatch("sample does not span the knot interval".into()));
    }
    let idx = knot_indices(sys, h)?;
    let integral = rl_integral(h, beta)?;
    let values: Vec<Vec<f64>> = idx.iter().map(|&j| integral.value(j).to_vec()).collect();
    let data = InterpolationData::new(sys.data().knots().to_vec(), values)?;

    let grid = h.grid();
    let dim = h.dim();
    let kernel = Kernel::new(b);
    let inv_gamma = 1.0 / beta.gamma();
    let mut derived_alphas = Vec::with_capacity(sys.branch_count());
    let mut q = Vec::with_capacity(sys.branch_count());
    for (k, branch) in sys.branches().iter().enumerate() {
        let ak = branch.base.slope;
        let akb = ak.powf(b);
        derived_alphas.push(akb * branch.alpha);
        let qk = GraphSample::from_fn(grid.to_vec(), dim, |t| branch.forcing.eval(t))?;
        let iq = rl_integral(&qk, beta)?;
        let rows: Vec<Vec<f64>> = (0..grid.len())
            .into_par_iter()
            .map(|n| {
                let tau = branch.base.apply(grid[n]);
                let mut acc = vec![0.0; dim];
                accumulate_cells(&kernel, grid, h.values(), dim, idx[k], tau, &mut acc);
                let iqn = iq.value(n);
                for i in 0..dim {
                    acc[i] = acc[i] * inv_gamma + akb * iqn[i];
                }
                acc
            })
            .collect();
        q.push(SampledGrid::new(grid.to_vec(), rows.concat(), dim)?);
    }
    Ok(FracIntSystem {
        base: sys.clone(),
        beta,
        derived_alphas,
        q,
        data,
        source: h.clone(),
        integral,
    })
}

/// Outcome of checking `ₓ₁I^β h(P_k t) = a_k^β α_k ₓ₁I^β h(t) + Q_k(t)` on
/// the grid.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct IdentityCheck {
    pub residual: f64,
    /// Bound implied by the sampled data; the residual cannot exceed it
    /// beyond roundoff.
    pub budget: f64,
    pub branch_residuals: Vec<f64>,
    pub branch_budgets: Vec<f64>,
    /// `max |ĥ - ĝ_k|` on `J_k`, where `ĝ_k = α_k ĥ∘P_k^{-1} + q̂_k∘P_k^{-1}`.
    pub interpolant_mismatch: Vec<f64>,
    pub within_budget: bool,
}

fn sup_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Largest gap on `J_k` between the interpolant of `h` and the pullback
/// interpolant `α_k ĥ(P_k^{-1}·) + q̂_k(P_k^{-1}·)`; both are piecewise
/// linear, so the gap peaks at a breakpoint of either.
fn interpolant_mismatch(sys: &FifSystem, k: usize, h: &GraphSample) -> f64 {
    let b = sys.branch(k);
    let grid = h.grid();
    let dim = h.dim();
    let qs: Vec<Vec<f64>> = grid.iter().map(|&t| b.forcing.eval(t)).collect();
    let mut worst = 0.0f64;
    let mut g = vec![0.0; dim];
    for (j, &t) in grid.iter().enumerate() {
        let eta = b.base.apply(t);
        for i in 0..dim {
            g[i] = b.alpha * h.value(j)[i] + qs[j][i];
        }
        worst = worst.max(sup_norm(&g, &h.eval(eta)));
    }
    let (lo, hi) = b.base.image();
    let start = grid.partition_point(|&s| s < lo);
    let end = grid.partition_point(|&s| s <= hi);
    for j in start..end {
        let u = b.base.inverse(grid[j]);
        let (c, w) = locate(grid, u);
        let hu = h.eval(u);
        for i in 0..dim {
            let qu = (1.0 - w) * qs[c][i] + w * qs[(c + 1).min(grid.len() - 1)][i];
            g[i] = b.alpha * hu[i] + qu;
        }
        worst = worst.max(sup_norm(&g, h.value(j)));
    }
    worst
}

/// Maximum over branches and grid points of
/// `‖Ih(P_k t) - a_k^β α_k Ih(t) - Q_k(t)‖`, with `Ih(P_k t)` integrated
/// directly, together with the data-driven error budget.
pub fn verify_fractional_identity(fsys: &FracIntSystem, ih: &GraphSample) -> Result<IdentityCheck> {
    let h = fsys.source();
    if ih.grid() != h.grid() || ih.dim() != h.dim() {
        return Err(FifError::GridMismatch(
            "fractional integral is not sampled on the grid of h".into(),
        ));
    }
    let beta = fsys.beta();
    let b = beta.value();
    let kernel = Kernel::new(b);
    let sys = fsys.base();
    let grid = h.grid();
    let dim = h.dim();
    let (x1, xn) = sys.interval();
    let gamma1 = beta.gamma() * b;
    let mut branch_residuals = Vec::new();
    let mut branch_budgets = Vec::new();
    let mut mismatch = Vec::new();
    let mut scale = 0.0f64;
    for (k, branch) in sys.branches().iter().enumerate() {
        let g = fsys.derived_alphas()[k];
        let qk = fsys.forcing(k);
        let res: Vec<(f64, f64)> = (0..grid.len())
            .into_par_iter()
            .map(|n| {
                let lhs = rl_at_with(&kernel, h, beta, branch.base.apply(grid[n]))
                    .expect("P_k maps J into J");
                let q = qk.row(n);
                let ihn = ih.value(n);
                let mut r2 = 0.0;
                let mut s = 0.0f64;
                for i in 0..dim {
                    let d = lhs[i] - g * ihn[i] - q[i];
                    r2 += d * d;
                    s = s.max(lhs[i].abs()).max(q[i].abs());
                }
                (r2.sqrt(), s)
            })
            .collect();
        let r = res.iter().map(|p| p.0).fold(0.0, f64::max);
        scale = res.iter().map(|p| p.1).fold(scale, f64::max);
        let d = interpolant_mismatch(sys, k, h);
        mismatch.push(d);
        branch_residuals.push(r);
        branch_budgets.push(d * (branch.base.slope * (xn - x1)).powf(b) / gamma1);
    }
    let roundoff = 64.0 * f64::EPSILON * grid.len() as f64 * scale.max(f64::MIN_POSITIVE);
    let budget = branch_budgets.iter().copied().fold(0.0, f64::max) + roundoff;
    let residual = branch_residuals.iter().copied().fold(0.0, f64::max);
    Ok(IdentityCheck {
        residual,
        budget,
        branch_residuals,
        branch_budgets,
        interpolant_mismatch: mismatch,
        within_budget: residual <= budget,
    })
}
