//! Rendering the FIF: the Read–Bajraktarević iteration on a grid and the
//! exact forward recursion along code-space addresses.

use rayon::prelude::*;

use super::forcing::locate;
use super::graph::{dist, sup_distance, ConvergenceWarning, GraphSample};
use super::system::{Endpoint, FifSystem};
use crate::error::{FifError, Result};

/// A finite word over the branch indices `0..N-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Address(Vec<usize>);

impl Address {
    pub fn new(word: Vec<usize>, branch_count: usize) -> Result<Self> {
        if let Some(&k) = word.iter().find(|&&k| k >= branch_count) {
            return Err(FifError::Domain(format!(
                "address letter {k} out of range for {branch_count} branches"
            )));
        }
        Ok(Self(word))
    }

    pub fn word(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// All words of length `len` in lexicographic order.
    pub fn all(branch_count: usize, len: usize) -> impl Iterator<Item = Address> {
        let total = branch_count.pow(len as u32);
        (0..total).map(move |mut code| {
            let mut word = vec![0; len];
            for slot in word.iter_mut().rev() {
                *slot = code % branch_count;
                code /= branch_count;
            }
            Address(word)
        })
    }
}

/// Uniform grid of `grid_size` points on `J`, merged with the knots and
/// their first-level images `P_k(x_i)`.
pub fn evaluation_grid(sys: &FifSystem, grid_size: usize) -> Result<Vec<f64>> {
    let n = sys.data().len();
    if grid_size < 2 * n {
        return Err(FifError::Domain(format!(
            "grid size {grid_size} below 2N = {}",
            2 * n
        )));
    }
    let (x1, xn) = sys.interval();
    let width = xn - x1;
    // (value, priority): exact knots beat knot images beat uniform points
    let mut pts: Vec<(f64, u8)> = Vec::with_capacity(grid_size + n * n);
    pts.extend(sys.data().knots().iter().map(|&x| (x, 0)));
    for b in sys.branches() {
        pts.extend(sys.data().knots().iter().map(|&x| (b.base.apply(x), 1)));
    }
    pts.extend((0..grid_size).map(|i| {
        let s = i as f64 / (grid_size - 1) as f64;
        ((1.0 - s) * x1 + s * xn, 2)
    }));
    pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
    let eps = 1e-12 * width;
    let mut grid: Vec<(f64, u8)> = Vec::with_capacity(pts.len());
    for p in pts {
        match grid.last_mut() {
            Some(last) if p.0 - last.0 <= eps => {
                if p.1 < last.1 {
                    *last = p;
                }
            }
            _ => grid.push(p),
        }
    }
    Ok(grid.into_iter().map(|p| p.0).collect())
}

/// The piecewise-linear interpolant of the data, sampled on `grid`.
pub fn data_interpolant(sys: &FifSystem, grid: Vec<f64>) -> Result<GraphSample> {
    let data = sys.data();
    let m = data.dim();
    GraphSample::from_fn(grid, m, |t| {
        let (j, w) = locate(data.knots(), t);
        let a = data.value(j);
        let b = data.value(j + 1);
        (0..m).map(|i| a[i] + w * (b[i] - a[i])).collect()
    })
}

struct PlanEntry {
    alpha: f64,
    cell: usize,
    weight: f64,
}

/// Precomputed preimages for the RB operator on a fixed grid: for every grid
/// point `s ∈ J_k` the location of `P_k^{-1}(s)` and `q_k(P_k^{-1}(s))`.
struct RbPlan {
    entries: Vec<PlanEntry>,
    forcing: Vec<f64>,
    dim: usize,
}

impl RbPlan {
    fn new(sys: &FifSystem, grid: &[f64]) -> Self {
        let dim = sys.dim();
        let mut entries = Vec::with_capacity(grid.len());
        let mut forcing = vec![0.0; grid.len() * dim];
        for (s, out) in grid.iter().zip(forcing.chunks_exact_mut(dim)) {
            let k = sys.branch_of(*s);
            let b = sys.branch(k);
            let u = b.base.inverse(*s);
            let (cell, weight) = locate(grid, u);
            b.forcing.eval_into(u, out);
            entries.push(PlanEntry {
                alpha: b.alpha,
                cell,
                weight,
            });
        }
        Self {
            entries,
            forcing,
            dim,
        }
    }

    fn apply(&self, f: &[f64], out: &mut [f64]) {
        let dim = self.dim;
        out.par_chunks_mut(dim)
            .zip(self.entries.par_iter())
            .zip(self.forcing.par_chunks(dim))
            .for_each(|((o, e), q)| {
                let a = &f[e.cell * dim..(e.cell + 1) * dim];
                let b = &f[(e.cell + 1) * dim..(e.cell + 2) * dim];
                for i in 0..dim {
                    let fu = a[i] + e.weight * (b[i] - a[i]);
                    o[i] = e.alpha * fu + q[i];
                }
            });
    }
}

fn ensure_covers(sys: &FifSystem, f: &GraphSample) -> Result<()> {
    let (x1, xn) = sys.interval();
    let (lo, hi) = f.interval();
    let eps = 1e-12 * (xn - x1);
    if lo > x1 + eps || hi < xn - eps {
        return Err(FifError::Domain(format!(
            "sample covers [{lo}, {hi}] but J = [{x1}, {xn}]"
        )));
    }
    if f.dim() != sys.dim() {
        return Err(FifError::DimensionMismatch {
            expected: sys.dim(),
            got: f.dim(),
        });
    }
    Ok(())
}

/// One application of the RB operator
/// `(Sf)(t) = α_k f(P_k^{-1}(t)) + q_k(P_k^{-1}(t))` for `t ∈ J_k`,
/// with `f` read by linear interpolation.
pub fn rb_apply(sys: &FifSystem, f: &GraphSample) -> Result<GraphSample> {
    ensure_covers(sys, f)?;
    let plan = RbPlan::new(sys, f.grid());
    let mut out = f.clone();
    out.iterations = 0;
    out.residual = 0.0;
    out.step_history.clear();
    out.warning = None;
    plan.apply(f.values(), out.values_mut());
    Ok(out)
}

/// Iterate the RB operator from the data interpolant until the Banach
/// a-posteriori bound `α_max/(1-α_max)·‖f_{n+1}-f_n‖∞` drops to `tol`.
///
/// Exhausting `max_iter` is not an error: the sample carries a
/// [`ConvergenceWarning`] with the bound that was reached.
pub fn evaluate_fif(
    sys: &FifSystem,
    grid_size: usize,
    tol: f64,
    max_iter: usize,
) -> Result<GraphSample> {
    sys.ensure_contractive()?;
    if !(tol > 0.0) {
        return Err(FifError::Domain(format!("tolerance must be positive, got {tol}")));
    }
    let grid = evaluation_grid(sys, grid_size)?;
    let mut f = data_interpolant(sys, grid)?;
    let plan = RbPlan::new(sys, f.grid());
    let alpha_max = sys.alpha_max();
    let factor = alpha_max / (1.0 - alpha_max);
    let dim = sys.dim();

    let mut next = f.values().to_vec();
    let mut steps = Vec::new();
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iter.max(1) {
        plan.apply(f.values(), &mut next);
        let step = sup_distance(f.values(), &next, dim);
        f.values_mut().copy_from_slice(&next);
        iterations += 1;
        steps.push(step);
        residual = factor * step;
        if residual <= tol {
            break;
        }
    }
    f.iterations = iterations;
    f.residual = residual;
    f.step_history = steps;
    if residual > tol {
        log::warn!("RB iteration stopped after {iterations} steps with residual {residual:e}");
        f.warning = Some(ConvergenceWarning {
            iterations,
            residual,
            tol,
        });
    }
    Ok(f)
}

/// `W_{i_1} ∘ … ∘ W_{i_n}(x_j, y_j)` for `j` the first or last knot.
/// The result lies on the graph of the FIF up to roundoff.
pub fn evaluate_at_address(sys: &FifSystem, addr: &Address, from: Endpoint) -> (f64, Vec<f64>) {
    let data = sys.data();
    let (mut t, mut z) = match from {
        Endpoint::First => (data.knot(0), data.first_value().to_vec()),
        Endpoint::Last => (data.knot(data.len() - 1), data.last_value().to_vec()),
    };
    let mut buf = vec![0.0; z.len()];
    for &k in addr.word().iter().rev() {
        t = sys.branch(k).apply_into(t, &z, &mut buf);
        std::mem::swap(&mut z, &mut buf);
    }
    (t, z)
}

/// Max over branches `k` and grid points `s ∈ J_k` of
/// `‖h(s) - α_k h(P_k^{-1}(s)) - q_k(P_k^{-1}(s))‖`, with `h` read by linear
/// interpolation off the grid.
pub fn self_referential_residual(sys: &FifSystem, h: &GraphSample) -> Result<f64> {
    ensure_covers(sys, h)?;
    let dim = sys.dim();
    let mut hu = vec![0.0; dim];
    let mut q = vec![0.0; dim];
    let mut worst: f64 = 0.0;
    for (j, &s) in h.grid().iter().enumerate() {
        for (k, b) in sys.branches().iter().enumerate() {
            let (lo, hi) = b.base.image();
            if s < lo || s > hi {
                continue;
            }
            let u = b.base.inverse(s);
            h.eval_into(u, &mut hu);
            sys.branch(k).forcing.eval_into(u, &mut q);
            let r: Vec<f64> = (0..dim).map(|i| b.alpha * hu[i] + q[i]).collect();
            worst = worst.max(dist(h.value(j), &r));
        }
    }
    Ok(worst)
}

/// Largest deviation of the sample from the data at the knots.
pub fn knot_error(sys: &FifSystem, h: &GraphSample) -> f64 {
    let data = sys.data();
    data.knots()
        .iter()
        .zip(data.values())
        .map(|(&x, y)| dist(&h.eval(x), y))
        .fold(0.0, f64::max)
}
