//! Mesh box counting on point clouds in `R^{1+M}`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{FifError, Result};
use crate::fif::GraphSample;
use crate::regression::least_squares;

/// Minimum point count accepted by [`box_count_mesh`].
pub const MIN_MESH_POINTS: usize = 1_000;
/// Minimum point count for [`projection_monotonicity`] with mesh counting.
pub const MIN_PROJECTION_POINTS: usize = 10_000;
/// Largest ambient dimension handled by [`box_count_polyline`].
pub const MAX_TRAVERSAL_DIM: usize = 16;
/// Allowed shortfall of the full-graph estimate below the best projection.
pub const PROJECTION_SLACK: f64 = 0.1;

/// Points in `R^dim`, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    coords: Vec<f64>,
    dim: usize,
}

impl PointCloud {
    pub fn new(coords: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 || !coords.len().is_multiple_of(dim) {
            return Err(FifError::DimensionMismatch {
                expected: dim,
                got: coords.len(),
            });
        }
        Ok(Self { coords, dim })
    }

    /// `(t_j, h(t_j))` for every grid point.
    pub fn from_graph(g: &GraphSample) -> Self {
        let dim = 1 + g.dim();
        let mut coords = Vec::with_capacity(g.len() * dim);
        for (j, &t) in g.grid().iter().enumerate() {
            coords.push(t);
            coords.extend_from_slice(g.value(j));
        }
        Self { coords, dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn iter(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Keep only the listed axes.
    pub fn project(&self, axes: &[usize]) -> Result<PointCloud> {
        if let Some(&a) = axes.iter().find(|&&a| a >= self.dim) {
            return Err(FifError::Domain(format!("axis {a} out of range")));
        }
        let coords = self
            .iter()
            .flat_map(|p| axes.iter().map(move |&a| p[a]))
            .collect();
        PointCloud::new(coords, axes.len())
    }

    /// Map every coordinate affinely onto `[0, 1]`; constant coordinates
    /// become 0. Box dimension is invariant under this map, and a common
    /// scale ladder then spans every axis alike.
    pub fn normalized(&self) -> PointCloud {
        let (lo, hi) = self.bounding_box();
        let span: Vec<f64> = lo.iter().zip(&hi).map(|(l, h)| h - l).collect();
        let coords = self
            .coords
            .chunks_exact(self.dim)
            .flat_map(|p| {
                p.iter()
                    .zip(&lo)
                    .zip(&span)
                    .map(|((x, l), s)| if *s > 0.0 { (x - l) / s } else { 0.0 })
            })
            .collect();
        PointCloud {
            coords,
            dim: self.dim,
        }
    }

    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.iter() {
            for i in 0..self.dim {
                lo[i] = lo[i].min(p[i]);
                hi[i] = hi[i].max(p[i]);
            }
        }
        (lo, hi)
    }

    /// Length of the bounding-box diagonal.
    pub fn diameter(&self) -> f64 {
        let (lo, hi) = self.bounding_box();
        lo.iter().zip(&hi).map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Mesh,
    Polyline,
    Oscillation,
}

/// Theoretical values attached to an empirical estimate.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub moran_lower: Option<f64>,
    pub moran_upper: Option<f64>,
    pub two_minus_sigma: Option<f64>,
    pub cap: Option<f64>,
}

/// Log-log regression of box counts against scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionReport {
    pub method: Method,
    /// Scales, largest first.
    pub scales: Vec<f64>,
    pub counts: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
    pub bounds: Bounds,
    /// Lower oscillation estimate `δ^{-1} Σ R`, when every count is positive.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_counts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lower_slope: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl DimensionReport {
    pub(crate) fn fit(method: Method, scales: Vec<f64>, counts: Vec<f64>) -> Result<Self> {
        let (slope, intercept, r2) = fit_log_log(&scales, &counts)?;
        Ok(Self {
            method,
            scales,
            counts,
            slope,
            intercept,
            r2,
            bounds: Bounds::default(),
            lower_counts: None,
            lower_slope: None,
            notes: Vec::new(),
        })
    }

    pub fn with_bounds(mut self, bounds: Bounds) -> Self {
        self.bounds = bounds;
        self
    }
}

/// Slope, intercept and R² of `log N` against `-log δ`.
pub(crate) fn fit_log_log(scales: &[f64], counts: &[f64]) -> Result<(f64, f64, f64)> {
    if counts.iter().any(|c| !(*c > 0.0)) {
        return Err(FifError::Domain("box counts must be positive".into()));
    }
    let x: Vec<f64> = scales.iter().map(|d| -d.ln()).collect();
    let y: Vec<f64> = counts.iter().map(|c| c.ln()).collect();
    let fit = least_squares(&x, &y)
        .ok_or_else(|| FifError::TooFewScales("degenerate scale ladder".into()))?;
    Ok((fit.slope, fit.intercept, fit.r2))
}

/// Validate and sort a scale ladder: at least 5 distinct positive scales
/// spanning at least 1.5 decades. Returned largest first.
pub fn check_scales(deltas: &[f64]) -> Result<Vec<f64>> {
    let mut s: Vec<f64> = deltas.to_vec();
    if s.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
        return Err(FifError::Domain("scales must be positive and finite".into()));
    }
    s.sort_by(|a, b| b.total_cmp(a));
    s.dedup();
    if s.len() < 5 {
        return Err(FifError::TooFewScales(format!(
            "{} distinct scales, need at least 5",
            s.len()
        )));
    }
    let span = (s[0] / s[s.len() - 1]).log10();
    if span < 1.5 - 1e-12 {
        return Err(FifError::TooFewScales(format!(
            "scales span {span:.2} decades, need at least 1.5"
        )));
    }
    Ok(s)
}

/// `width · 2^{-j}` for `j = j0..=j1`.
pub fn dyadic_scales(width: f64, j0: u32, j1: u32) -> Vec<f64> {
    (j0..=j1).map(|j| width * 0.5f64.powi(j as i32)).collect()
}

fn count_distinct(keys: Vec<i64>, d: usize) -> usize {
    let n = keys.len() / d;
    let max_key = keys.iter().copied().max().unwrap_or(0).max(0) as u128;
    let bits = 128 - max_key.leading_zeros().min(127);
    if (bits as usize) * d <= 128 {
        let mut packed: Vec<u128> = keys
            .chunks_exact(d)
            .map(|c| c.iter().fold(0u128, |acc, &k| (acc << bits) | k as u128))
            .collect();
        packed.sort_unstable();
        packed.dedup();
        packed.len()
    } else {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_unstable_by(|&a, &b| keys[a * d..(a + 1) * d].cmp(&keys[b * d..(b + 1) * d]));
        idx.dedup_by(|a, b| keys[*a * d..(*a + 1) * d] == keys[*b * d..(*b + 1) * d]);
        idx.len()
    }
}

fn mesh_count(points: &PointCloud, origin: &[f64], delta: f64) -> usize {
    let d = points.dim();
    let mut keys: Vec<i64> = Vec::with_capacity(points.len() * d);
    for p in points.iter() {
        for i in 0..d {
            keys.push(((p[i] - origin[i]) / delta).floor() as i64);
        }
    }
    count_distinct(keys, d)
}

/// Append the cells crossed by the segment `p -> q`, excluding the cell of
/// `p`, by stepping through cell faces in order of crossing.
fn push_segment_cells(p: &[f64], q: &[f64], origin: &[f64], delta: f64, keys: &mut Vec<i64>) {
    let d = p.len();
    let mut cell = [0i64; MAX_TRAVERSAL_DIM];
    let mut remaining = [0i64; MAX_TRAVERSAL_DIM];
    let mut step = [0i64; MAX_TRAVERSAL_DIM];
    let mut t_max = [f64::INFINITY; MAX_TRAVERSAL_DIM];
    let mut t_delta = [f64::INFINITY; MAX_TRAVERSAL_DIM];
    let mut total = 0;
    for i in 0..d {
        let a = (p[i] - origin[i]) / delta;
        let b = (q[i] - origin[i]) / delta;
        cell[i] = a.floor() as i64;
        let end = b.floor() as i64;
        remaining[i] = (end - cell[i]).abs();
        total += remaining[i];
        step[i] = (end - cell[i]).signum();
        let span = b - a;
        if step[i] != 0 {
            let face = if step[i] > 0 { cell[i] as f64 + 1.0 } else { cell[i] as f64 };
            t_max[i] = (face - a) / span;
            t_delta[i] = 1.0 / span.abs();
        }
    }
    for _ in 0..total {
        let mut axis = usize::MAX;
        for i in 0..d {
            if remaining[i] > 0 && (axis == usize::MAX || t_max[i] < t_max[axis]) {
                axis = i;
            }
        }
        cell[axis] += step[axis];
        remaining[axis] -= 1;
        t_max[axis] += t_delta[axis];
        keys.extend_from_slice(&cell[..d]);
    }
}

fn polyline_count(points: &PointCloud, origin: &[f64], delta: f64) -> usize {
    let d = points.dim();
    let mut keys: Vec<i64> = Vec::with_capacity(points.len() * d);
    if let Some(first) = points.iter().next() {
        keys.extend(first.iter().zip(origin).map(|(x, o)| ((x - o) / delta).floor() as i64));
    }
    for j in 1..points.len() {
        push_segment_cells(points.point(j - 1), points.point(j), origin, delta, &mut keys);
    }
    count_distinct(keys, d)
}

/// Count occupied cells of the axis-aligned `δ`-mesh anchored at the
/// bounding-box corner, for every scale, and regress `log N` on `-log δ`.
pub fn box_count_mesh(points: &PointCloud, deltas: &[f64]) -> Result<DimensionReport> {
    if points.len() < MIN_MESH_POINTS {
        return Err(FifError::Domain(format!(
            "mesh counting needs at least {MIN_MESH_POINTS} points, got {}",
            points.len()
        )));
    }
    let scales = check_scales(deltas)?;
    let (origin, _) = points.bounding_box();
    let counts: Vec<f64> = scales
        .par_iter()
        .map(|&d| mesh_count(points, &origin, d) as f64)
        .collect();
    DimensionReport::fit(Method::Mesh, scales, counts)
}

/// Count cells of the `δ`-mesh met by the polyline through consecutive
/// points. For a rendered graph this is the mesh count of its piecewise
/// linear interpolant, which does not saturate when `δ` drops below the
/// vertical jumps between samples.
pub fn box_count_polyline(points: &PointCloud, deltas: &[f64]) -> Result<DimensionReport> {
    if points.len() < 2 {
        return Err(FifError::Domain("a polyline needs at least 2 points".into()));
    }
    if points.dim() > MAX_TRAVERSAL_DIM {
        return Err(FifError::Unsupported(format!(
            "polyline counting supports at most {MAX_TRAVERSAL_DIM} coordinates, got {}",
            points.dim()
        )));
    }
    let scales = check_scales(deltas)?;
    let (origin, _) = points.bounding_box();
    let counts: Vec<f64> = scales
        .par_iter()
        .map(|&d| polyline_count(points, &origin, d) as f64)
        .collect();
    DimensionReport::fit(Method::Polyline, scales, counts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    pub full: f64,
    /// Estimate for each coordinate graph `(t, z_i)`.
    pub components: Vec<f64>,
    pub max_component: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Compare the box-counting dimension of the full graph with those of the
/// coordinate graphs `(t, z_i)`; the full graph may not fall more than
/// [`PROJECTION_SLACK`] below the largest of them. `method` selects point
/// or polyline counting. The cloud is normalized first, so `deltas` are
/// fractions of the unit cube.
pub fn projection_monotonicity(
    points: &PointCloud,
    deltas: &[f64],
    method: Method,
) -> Result<ProjectionReport> {
    let count = |cloud: &PointCloud| match method {
        Method::Mesh => box_count_mesh(cloud, deltas),
        Method::Polyline => box_count_polyline(cloud, deltas),
        Method::Oscillation => Err(FifError::Unsupported(
            "projection check counts point clouds, not oscillations".into(),
        )),
    };
    if method == Method::Mesh && points.len() < MIN_PROJECTION_POINTS {
        return Err(FifError::Domain(format!(
            "projection check needs at least {MIN_PROJECTION_POINTS} points, got {}",
            points.len()
        )));
    }
    if points.dim() < 2 {
        return Err(FifError::Domain("points must live in R^{1+M}, M >= 1".into()));
    }
    let unit = points.normalized();
    let full = count(&unit)?.slope;
    let components = (1..unit.dim())
        .map(|i| Ok(count(&unit.project(&[0, i])?)?.slope))
        .collect::<Result<Vec<f64>>>()?;
    let max_component = components.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(ProjectionReport {
        full,
        components,
        max_component,
        slack: PROJECTION_SLACK,
        holds: full >= max_component - PROJECTION_SLACK,
    })
}
