//! Window oscillations: oscillation box counting, Hölder exponents,
//! total variation and dyadic V_α seminorms.

use serde::{Deserialize, Serialize};

use super::boxcount::{check_scales, DimensionReport, Method};
use crate::error::{FifError, Result};
use crate::fif::{dist, GraphSample};
use crate::regression::least_squares;

/// Range `sup - inf` of the piecewise-linear interpolant of `g` on each
/// window `[edges[j], edges[j+1]]`. With `component = None` the full vector
/// is used and the range is the diagonal of the per-component bounding box.
pub(crate) fn window_ranges(g: &GraphSample, component: Option<usize>, edges: &[f64]) -> Vec<f64> {
    let grid = g.grid();
    let comps: Vec<usize> = match component {
        Some(i) => vec![i],
        None => (0..g.dim()).collect(),
    };
    let d = comps.len();
    let mut buf = vec![0.0; g.dim()];
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    let mut out = Vec::with_capacity(edges.len().saturating_sub(1));
    for w in edges.windows(2) {
        let (l, r) = (w[0], w[1]);
        g.eval_into(l, &mut buf);
        for (c, &i) in comps.iter().enumerate() {
            lo[c] = buf[i];
            hi[c] = buf[i];
        }
        g.eval_into(r, &mut buf);
        for (c, &i) in comps.iter().enumerate() {
            lo[c] = lo[c].min(buf[i]);
            hi[c] = hi[c].max(buf[i]);
        }
        let start = grid.partition_point(|&t| t <= l);
        let end = grid.partition_point(|&t| t < r);
        for j in start..end {
            let v = g.value(j);
            for (c, &i) in comps.iter().enumerate() {
                lo[c] = lo[c].min(v[i]);
                hi[c] = hi[c].max(v[i]);
            }
        }
        let r2: f64 = lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum();
        out.push(r2.sqrt());
    }
    out
}

/// Edges of consecutive width-`delta` windows starting at the left end of
/// `J`; the last window is clipped at the right end.
fn window_edges(lo: f64, hi: f64, delta: f64) -> Vec<f64> {
    let m = (((hi - lo) / delta) - 1e-9).ceil().max(1.0) as usize;
    let mut edges: Vec<f64> = (0..m).map(|j| lo + j as f64 * delta).collect();
    edges.push(hi);
    edges
}

/// Edges of the `2^n` equal windows partitioning `[lo, hi]`.
fn dyadic_edges(lo: f64, hi: f64, n: u32) -> Vec<f64> {
    let m = 1usize << n;
    (0..=m)
        .map(|j| {
            let s = j as f64 / m as f64;
            (1.0 - s) * lo + s * hi
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationSum {
    pub delta: f64,
    /// Number of windows `m`.
    pub windows: usize,
    pub total: f64,
    /// Set when `delta` is below three grid spacings.
    pub unreliable: bool,
}

/// `Σ_j R_f[x_1 + jδ, x_1 + (j+1)δ]` for component `component` of `f`.
pub fn oscillation_sum(f: &GraphSample, component: usize, delta: f64) -> Result<OscillationSum> {
    if component >= f.dim() {
        return Err(FifError::Domain(format!(
            "component {component} out of range for dimension {}",
            f.dim()
        )));
    }
    let (lo, hi) = f.interval();
    if !(delta > 0.0 && delta < hi - lo) {
        return Err(FifError::Domain(format!(
            "window width {delta} must lie in (0, {})",
            hi - lo
        )));
    }
    let edges = window_edges(lo, hi, delta);
    let total = window_ranges(f, Some(component), &edges).iter().sum();
    Ok(OscillationSum {
        delta,
        windows: edges.len() - 1,
        total,
        unreliable: delta < 3.0 * f.max_spacing(),
    })
}

/// Oscillation box counting: the primary counts are the covering bound
/// `2m + δ^{-1} Σ R`, the lower counts are `δ^{-1} Σ R`.
pub fn box_count_oscillation(
    f: &GraphSample,
    component: usize,
    deltas: &[f64],
) -> Result<DimensionReport> {
    let scales = check_scales(deltas)?;
    let sums = scales
        .iter()
        .map(|&d| oscillation_sum(f, component, d))
        .collect::<Result<Vec<_>>>()?;
    let counts: Vec<f64> = sums
        .iter()
        .map(|s| 2.0 * s.windows as f64 + s.total / s.delta)
        .collect();
    let lower: Vec<f64> = sums.iter().map(|s| s.total / s.delta).collect();
    let mut report = DimensionReport::fit(Method::Oscillation, scales, counts)?;
    if lower.iter().all(|&c| c > 0.0) {
        report.lower_slope = Some(super::boxcount::fit_log_log(&report.scales, &lower)?.0);
    }
    report.lower_counts = Some(lower);
    let unreliable: Vec<String> = sums
        .iter()
        .filter(|s| s.unreliable)
        .map(|s| format!("{:.3e}", s.delta))
        .collect();
    if !unreliable.is_empty() {
        report.notes.push(format!(
            "scales below three grid spacings: {}",
            unreliable.join(", ")
        ));
    }
    let spacing = f.max_spacing();
    let slope_bound = f.max_jump() / spacing;
    report.notes.push(format!(
        "grid Lipschitz estimate {slope_bound:.3e} over spacing {spacing:.3e}"
    ));
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolderEstimate {
    /// Estimated exponent, clamped to `(0, 1]`.
    pub sigma: f64,
    pub r2: f64,
    /// Dyadic window widths, largest first.
    pub widths: Vec<f64>,
    /// Largest window oscillation at each width.
    pub max_oscillation: Vec<f64>,
    /// `max_n R_n / w_n^σ̂`.
    pub constant: f64,
    /// Poor fit or non-monotone oscillation scaling.
    pub low_quality: bool,
}

const MIN_HOLDER_LEVELS: usize = 4;

fn holder_ladder(f: &GraphSample) -> Result<(Vec<f64>, Vec<f64>)> {
    let (lo, hi) = f.interval();
    let floor = 4.0 * f.max_spacing();
    let mut widths = Vec::new();
    let mut osc = Vec::new();
    let mut n = 1u32;
    loop {
        let w = (hi - lo) / (1u64 << n) as f64;
        if w < floor || n > 40 {
            break;
        }
        let ranges = window_ranges(f, None, &dyadic_edges(lo, hi, n));
        widths.push(w);
        osc.push(ranges.into_iter().fold(0.0, f64::max));
        n += 1;
    }
    if widths.len() < MIN_HOLDER_LEVELS {
        return Err(FifError::Domain(format!(
            "sample too coarse: {} dyadic levels above four grid spacings, need {MIN_HOLDER_LEVELS}",
            widths.len()
        )));
    }
    Ok((widths, osc))
}

/// Slope of `log max R(O)` against `log |O|` over dyadic windows down to
/// four grid spacings.
pub fn holder_estimate(f: &GraphSample) -> Result<HolderEstimate> {
    let (widths, osc) = holder_ladder(f)?;
    let monotone = osc.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    if osc.iter().all(|&o| o == 0.0) {
        return Ok(HolderEstimate {
            sigma: 1.0,
            r2: 1.0,
            widths,
            max_oscillation: osc,
            constant: 0.0,
            low_quality: false,
        });
    }
    let (x, y): (Vec<f64>, Vec<f64>) = widths
        .iter()
        .zip(&osc)
        .filter(|(_, &o)| o > 0.0)
        .map(|(w, o)| (w.ln(), o.ln()))
        .unzip();
    let fit = least_squares(&x, &y);
    let (slope, r2) = fit.map_or((1.0, 0.0), |f| (f.slope, f.r2));
    let sigma = slope.clamp(f64::MIN_POSITIVE, 1.0);
    let constant = holder_constant_from(&widths, &osc, sigma);
    Ok(HolderEstimate {
        sigma,
        r2,
        widths,
        max_oscillation: osc,
        constant,
        low_quality: !monotone || r2 < 0.9 || x.len() < MIN_HOLDER_LEVELS,
    })
}

fn holder_constant_from(widths: &[f64], osc: &[f64], sigma: f64) -> f64 {
    widths
        .iter()
        .zip(osc)
        .map(|(w, o)| o / w.powf(sigma))
        .fold(0.0, f64::max)
}

/// Ladder estimate of the Hölder seminorm `sup R(O) / |O|^σ`.
pub fn holder_constant(f: &GraphSample, sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(FifError::Domain(format!("exponent {sigma} outside (0, 1]")));
    }
    let (widths, osc) = holder_ladder(f)?;
    Ok(holder_constant_from(&widths, &osc, sigma))
}

/// Length of the sampled polyline in value space.
pub fn total_variation(f: &GraphSample) -> f64 {
    (1..f.len()).map(|j| dist(f.value(j - 1), f.value(j))).sum()
}

/// `Σ R_f(O)` over the `2^n` dyadic windows of `J`, for `n = 1..=n_max`.
pub(crate) fn dyadic_level_sums(f: &GraphSample, n_max: u32) -> Vec<f64> {
    let (lo, hi) = f.interval();
    (1..=n_max)
        .map(|n| window_ranges(f, None, &dyadic_edges(lo, hi, n)).iter().sum())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VAlphaSeminorm {
    pub alpha: f64,
    pub value: f64,
    /// Level attaining the maximum.
    pub level: u32,
    /// `2^{-n(α-1)} Σ R` for `n = 1..=n_used`.
    pub weighted: Vec<f64>,
    pub n_used: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// `max_{1≤n≤n_max} 2^{-n(α-1)} Σ_{|O| = 2^{-n}} R_f(O)` with `J` rescaled
/// to unit length.
pub fn v_alpha_seminorm(f: &GraphSample, alpha: f64, n_max: u32) -> Result<VAlphaSeminorm> {
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(FifError::Domain(format!("exponent {alpha} must be at least 1")));
    }
    if n_max == 0 {
        return Err(FifError::Domain("at least one dyadic level is required".into()));
    }
    let (lo, hi) = f.interval();
    let spacing = f.max_spacing();
    let mut n_used = n_max;
    while n_used > 1 && (hi - lo) / ((1u64 << n_used.min(62)) as f64) < spacing {
        n_used -= 1;
    }
    let note = (n_used < n_max).then(|| {
        format!("levels above {n_used} are finer than the sample grid and were dropped")
    });
    let weighted: Vec<f64> = dyadic_level_sums(f, n_used)
        .into_iter()
        .zip(1..)
        .map(|(s, n): (f64, i32)| s * 2f64.powf(-(n as f64) * (alpha - 1.0)))
        .collect();
    let (idx, value) = weighted
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, v)| if v > acc.1 { (i, v) } else { acc });
    Ok(VAlphaSeminorm {
        alpha,
        value,
        level: idx as u32 + 1,
        weighted,
        n_used,
        note,
    })
}
