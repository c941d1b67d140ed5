//! The invariant measure carried by the graph of a FIF: chaos-game
//! sampling, cylinder masses, ball masses, local dimensions and the
//! entropy bound.

use std::io::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dimension::{moran_solve, PointCloud, DEFAULT_MORAN_TOL};
use crate::error::{FifError, Result};
use crate::fif::{contraction_ratios, Address, FifSystem};
use crate::regression::{least_squares, median};

/// Default number of discarded chaos-game steps.
pub const DEFAULT_BURN_IN: usize = 64;
/// Tolerance on `Σ p_k = 1`.
pub const PROBABILITY_TOL: f64 = 1e-12;
/// Smallest ball population used in a local-dimension fit.
pub const MIN_BALL_COUNT: usize = 30;
const MIN_RADII: usize = 4;
const MIN_DECADES: f64 = 1.5;

/// Strictly positive weights summing to one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbabilityVector {
    p: Vec<f64>,
    cdf: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(p: Vec<f64>) -> Result<Self> {
        if p.is_empty() {
            return Err(FifError::InvalidProbability("empty probability vector".into()));
        }
        if let Some((k, v)) = p.iter().enumerate().find(|(_, v)| !(**v > 0.0) || !v.is_finite()) {
            return Err(FifError::InvalidProbability(format!(
                "p_{} = {v} is not a positive number",
                k + 1
            )));
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > PROBABILITY_TOL {
            return Err(FifError::InvalidProbability(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        let mut acc = 0.0;
        let cdf = p
            .iter()
            .map(|v| {
                acc += v;
                acc
            })
            .collect();
        Ok(Self { p, cdf })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// `p_k = |a_k|`, the relative lengths of the branch intervals.
    pub fn from_lengths(sys: &FifSystem) -> Result<Self> {
        let a: Vec<f64> = sys.slopes().iter().map(|a| a.abs()).collect();
        let s: f64 = a.iter().sum();
        Self::new(a.into_iter().map(|v| v / s).collect())
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }

    /// Inverse-CDF draw for a uniform variate `u ∈ [0, 1)`.
    pub fn draw(&self, u: f64) -> usize {
        self.cdf
            .partition_point(|&c| c <= u)
            .min(self.p.len() - 1)
    }
}

impl TryFrom<Vec<f64>> for ProbabilityVector {
    type Error = FifError;
    fn try_from(p: Vec<f64>) -> Result<Self> {
        Self::new(p)
    }
}

impl From<ProbabilityVector> for Vec<f64> {
    fn from(p: ProbabilityVector) -> Self {
        p.p
    }
}

fn check_probabilities(sys: &FifSystem, p: &ProbabilityVector) -> Result<()> {
    if p.len() != sys.branch_count() {
        return Err(FifError::InvalidProbability(format!(
            "{} probabilities for {} branches",
            p.len(),
            sys.branch_count()
        )));
    }
    Ok(())
}

/// Chaos-game orbit standing in for the invariant measure; every point
/// carries weight `1/n`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalMeasure {
    /// Rows `(t, z_1, …, z_M)`.
    points: Vec<f64>,
    dim: usize,
    pub seed: u64,
    pub burn_in: usize,
    /// Branch drawn to produce each recorded point.
    indices: Vec<u32>,
}

impl EmpiricalMeasure {
    /// Number of recorded points.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Value dimension `M`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        let w = self.dim + 1;
        &self.points[i * w..(i + 1) * w]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.points.chunks_exact(self.dim + 1)
    }

    pub fn indices(&self) -> &[u32] {
        &self.indices
    }

    pub fn to_point_cloud(&self) -> PointCloud {
        PointCloud::new(self.points.clone(), self.dim + 1).expect("rows have width 1 + M")
    }

    /// Fraction of draws that used each branch.
    pub fn branch_frequencies(&self, branch_count: usize) -> Vec<f64> {
        let mut c = vec![0usize; branch_count];
        for &k in &self.indices {
            c[k as usize] += 1;
        }
        c.into_iter().map(|v| v as f64 / self.len() as f64).collect()
    }

    /// Fraction of the `n - L + 1` consecutive length-`L` windows of the
    /// drawn sequence that spell `word`.
    pub fn word_frequency(&self, word: &Address) -> f64 {
        let w = word.word();
        if w.is_empty() || w.len() > self.len() {
            return 0.0;
        }
        let hits = self
            .indices
            .windows(w.len())
            .filter(|s| s.iter().zip(w).all(|(&a, &b)| a as usize == b))
            .count();
        hits as f64 / (self.len() - w.len() + 1) as f64
    }

    /// CSV with header `t,z_1,…,z_M`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        let mut header = String::from("t");
        for i in 1..=self.dim {
            header.push_str(&format!(",z_{i}"));
        }
        writeln!(w, "{header}")?;
        for p in self.points() {
            let row: Vec<String> = p.iter().map(|v| format!("{}", v + 0.0)).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Iterate `W_k` from `(x_1, y_1)` with `k` drawn from `p`, discard the
/// first `burn_in` points and record the next `n`.
pub fn chaos_game(
    sys: &FifSystem,
    p: &ProbabilityVector,
    n: usize,
    burn_in: usize,
    seed: u64,
) -> Result<EmpiricalMeasure> {
    check_probabilities(sys, p)?;
    if n == 0 {
        return Err(FifError::Domain("sample count must be at least 1".into()));
    }
    let m = sys.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = sys.data().knot(0);
    let mut z = sys.data().first_value().to_vec();
    let mut next = vec![0.0; m];
    let mut points = Vec::with_capacity(n * (m + 1));
    let mut indices = Vec::with_capacity(n);
    for step in 0..burn_in + n {
        let k = p.draw(rng.gen::<f64>());
        t = sys.branch(k).apply_into(t, &z, &mut next);
        std::mem::swap(&mut z, &mut next);
        if step >= burn_in {
            points.push(t);
            points.extend_from_slice(&z);
            indices.push(k as u32);
        }
    }
    Ok(EmpiricalMeasure {
        points,
        dim: m,
        seed,
        burn_in,
        indices,
    })
}

/// Independent chaos games, one per seed.
pub fn chaos_game_ensemble(
    sys: &FifSystem,
    p: &ProbabilityVector,
    n: usize,
    burn_in: usize,
    seeds: &[u64],
) -> Result<Vec<EmpiricalMeasure>> {
    seeds
        .par_iter()
        .map(|&s| chaos_game(sys, p, n, burn_in, s))
        .collect()
}

/// `μ([w]) = Π_j p_{w_j}`.
pub fn cylinder_mass(word: &Address, p: &ProbabilityVector) -> Result<f64> {
    if word.is_empty() {
        return Err(FifError::Domain("cylinder word must be nonempty".into()));
    }
    word.word()
        .iter()
        .map(|&k| {
            p.as_slice().get(k).copied().ok_or_else(|| {
                FifError::Domain(format!("letter {k} out of range for {} branches", p.len()))
            })
        })
        .product()
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Fraction of sample points within Euclidean distance `r` of `center`.
pub fn ball_mass(mu: &EmpiricalMeasure, center: &[f64], r: f64) -> f64 {
    let r2 = r * r;
    let hits = mu.points().filter(|p| sq_dist(p, center) <= r2).count();
    hits as f64 / mu.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CenterFit {
    pub center: Vec<f64>,
    /// Radii kept for this center, largest first.
    pub radii: Vec<f64>,
    pub masses: Vec<f64>,
    pub slope: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalDimReport {
    /// Requested radii, largest first.
    pub radii: Vec<f64>,
    pub fits: Vec<CenterFit>,
    /// Centers skipped for lack of populated radii.
    pub skipped: usize,
    pub median_slope: Option<f64>,
    pub median_r2: Option<f64>,
    pub notes: Vec<String>,
}

/// `diam · 2^{-j}` for `j = 3..=10`, with `diam` the bounding-box diagonal.
pub fn default_radii(mu: &EmpiricalMeasure) -> Vec<f64> {
    let diam = mu.to_point_cloud().diameter();
    (3..=10).map(|j| diam * 0.5f64.powi(j)).collect()
}

/// `count` sample points spread evenly through the orbit.
pub fn default_centers(mu: &EmpiricalMeasure, count: usize) -> Vec<Vec<f64>> {
    let n = mu.len();
    let count = count.min(n).max(1);
    (0..count)
        .map(|i| mu.point(i * n / count).to_vec())
        .collect()
}

/// Per-center least-squares slope of `log μ(B(x, r))` against `log r`.
pub fn local_dimension(
    mu: &EmpiricalMeasure,
    centers: &[Vec<f64>],
    radii: &[f64],
) -> Result<LocalDimReport> {
    let mut radii: Vec<f64> = radii.to_vec();
    if radii.iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
        return Err(FifError::Domain("radii must be positive and finite".into()));
    }
    radii.sort_by(|a, b| b.total_cmp(a));
    radii.dedup();
    if radii.len() < MIN_RADII {
        return Err(FifError::Domain(format!(
            "{} distinct radii, need at least {MIN_RADII}",
            radii.len()
        )));
    }
    let span = (radii[0] / radii[radii.len() - 1]).log10();
    if span < MIN_DECADES - 1e-12 {
        return Err(FifError::Domain(format!(
            "radii span {span:.2} decades, need at least {MIN_DECADES}"
        )));
    }
    if let Some(c) = centers.iter().find(|c| c.len() != mu.dim() + 1) {
        return Err(FifError::DimensionMismatch {
            expected: mu.dim() + 1,
            got: c.len(),
        });
    }
    let sq: Vec<f64> = radii.iter().map(|r| r * r).collect();
    let n = mu.len() as f64;
    let per_center: Vec<(Option<CenterFit>, usize)> = centers
        .par_iter()
        .map(|c| {
            let mut counts = vec![0usize; radii.len()];
            for p in mu.points() {
                let d = sq_dist(p, c);
                // radii are decreasing: every radius up to the first miss contains p
                let k = sq.partition_point(|&r2| d <= r2);
                if k > 0 {
                    counts[k - 1] += 1;
                }
            }
            for i in (0..counts.len().saturating_sub(1)).rev() {
                counts[i] += counts[i + 1];
            }
            let kept: Vec<usize> = (0..radii.len()).filter(|&i| counts[i] >= MIN_BALL_COUNT).collect();
            let dropped = radii.len() - kept.len();
            if kept.len() < MIN_RADII {
                return (None, dropped);
            }
            let x: Vec<f64> = kept.iter().map(|&i| radii[i].ln()).collect();
            let masses: Vec<f64> = kept.iter().map(|&i| counts[i] as f64 / n).collect();
            let y: Vec<f64> = masses.iter().map(|m| m.ln()).collect();
            let fit = least_squares(&x, &y).expect("distinct radii");
            (
                Some(CenterFit {
                    center: c.clone(),
                    radii: kept.iter().map(|&i| radii[i]).collect(),
                    masses,
                    slope: fit.slope,
                    r2: fit.r2,
                }),
                dropped,
            )
        })
        .collect();
    let dropped: usize = per_center.iter().map(|(_, d)| d).sum();
    let fits: Vec<CenterFit> = per_center.into_iter().filter_map(|(f, _)| f).collect();
    let skipped = centers.len() - fits.len();
    let mut notes = Vec::new();
    if dropped > 0 {
        notes.push(format!(
            "{dropped} center/radius pairs held fewer than {MIN_BALL_COUNT} points and were dropped"
        ));
    }
    if skipped > 0 {
        notes.push(format!(
            "{skipped} centers kept fewer than {MIN_RADII} radii and were skipped"
        ));
    }
    notes.push("balls use the Euclidean metric on J x R^M".into());
    let mut slopes: Vec<f64> = fits.iter().map(|f| f.slope).collect();
    let mut r2s: Vec<f64> = fits.iter().map(|f| f.r2).collect();
    Ok(LocalDimReport {
        radii,
        median_slope: median(&mut slopes),
        median_r2: median(&mut r2s),
        fits,
        skipped,
        notes,
    })
}

/// `Σ p_k log p_k / Σ p_k log C_k`.
pub fn entropy_dimension_bound(p: &ProbabilityVector, c: &[f64]) -> Result<f64> {
    if c.len() != p.len() {
        return Err(FifError::DimensionMismatch {
            expected: p.len(),
            got: c.len(),
        });
    }
    if let Some(v) = c.iter().find(|v| !(**v > 0.0 && **v < 1.0)) {
        return Err(FifError::Domain(format!("contraction ratio {v} outside (0, 1)")));
    }
    let num: f64 = p.as_slice().iter().map(|&q| q * q.ln()).sum();
    let den: f64 = p.as_slice().iter().zip(c).map(|(&q, &ck)| q * ck.ln()).sum();
    Ok(num / den)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureDimBounds {
    /// Root of `Σ c_k^r = 1`; absent when some `c_k = 0`.
    pub lower: Option<f64>,
    /// Root of `Σ C_k^R = 1`.
    pub upper: f64,
    pub entropy_bound: f64,
    /// `min(R, entropy bound)`.
    pub operative_upper: f64,
    pub lower_degenerate: bool,
}

/// Moran bounds and the entropy bound for the invariant measure.
pub fn measure_dim_bounds(sys: &FifSystem, p: &ProbabilityVector) -> Result<MeasureDimBounds> {
    check_probabilities(sys, p)?;
    sys.ensure_contractive()?;
    let ratios = contraction_ratios(sys);
    let lower_degenerate = ratios.iter().any(|r| r.degenerate);
    let lower = if lower_degenerate {
        None
    } else {
        let c: Vec<f64> = ratios.iter().map(|r| r.lower).collect();
        Some(moran_solve(&c, DEFAULT_MORAN_TOL)?.s)
    };
    let big: Vec<f64> = ratios.iter().map(|r| r.upper).collect();
    let upper = moran_solve(&big, DEFAULT_MORAN_TOL)?.s;
    let entropy_bound = entropy_dimension_bound(p, &big)?;
    Ok(MeasureDimBounds {
        lower,
        upper,
        entropy_bound,
        operative_upper: upper.min(entropy_bound),
        lower_degenerate,
    })
}

/// Summary emitted as `measure.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeasureSummary {
    pub r: Option<f64>,
    #[serde(rename = "R")]
    pub big_r: f64,
    pub entropy_bound: f64,
    pub local_dim_median: Option<f64>,
    pub fit_r2: Option<f64>,
}

impl MeasureSummary {
    pub fn new(bounds: &MeasureDimBounds, local: &LocalDimReport) -> Self {
        Self {
            r: bounds.lower,
            big_r: bounds.upper,
            entropy_bound: bounds.entropy_bound,
            local_dim_median: local.median_slope,
            fit_r2: local.median_r2,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fif::InterpolationData;
    use proptest::prelude::*;

    fn tent(alphas: Vec<f64>) -> FifSystem {
        let d = InterpolationData::scalar(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        FifSystem::affine(d, alphas).unwrap()
    }

    #[test]
    fn probability_validation() {
        assert!(ProbabilityVector::new(vec![0.5, 0.5]).is_ok());
        assert!(ProbabilityVector::new(vec![0.5, 0.6]).is_err());
        assert!(ProbabilityVector::new(vec![1.0, 0.0]).is_err());
        assert!(ProbabilityVector::new(vec![]).is_err());
        let p = ProbabilityVector::new(vec![0.25, 0.75]).unwrap();
        assert_eq!(p.draw(0.0), 0);
        assert_eq!(p.draw(0.2499), 0);
        assert_eq!(p.draw(0.25), 1);
        assert_eq!(p.draw(0.999_999), 1);
    }

    #[test]
    fn single_step_is_the_first_map() {
        let sys = tent(vec![0.4, -0.3]);
        let p = ProbabilityVector::uniform(2).unwrap();
        let mu = chaos_game(&sys, &p, 1, 0, 11).unwrap();
        let k = mu.indices()[0] as usize;
        let mut z = vec![0.0];
        let t = sys.branch(k).apply_into(0.0, &[0.0], &mut z);
        assert_eq!(mu.point(0), &[t, z[0]][..]);
        assert_eq!(t, sys.data().knot(k));
    }

    #[test]
    fn chaos_game_is_deterministic() {
        let sys = tent(vec![0.4, -0.3]);
        let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let a = chaos_game(&sys, &p, 1000, 64, 5).unwrap();
        let b = chaos_game(&sys, &p, 1000, 64, 5).unwrap();
        let c = chaos_game(&sys, &p, 1000, 64, 6).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(chaos_game(&sys, &ProbabilityVector::uniform(3).unwrap(), 10, 0, 1).is_err());
        assert!(chaos_game(&sys, &p, 0, 0, 1).is_err());
    }

    #[test]
    fn cylinder_examples() {
        let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
        let w = Address::new(vec![0, 1], 2).unwrap();
        assert!((cylinder_mass(&w, &p).unwrap() - 0.21).abs() < 1e-15);
        assert_eq!(cylinder_mass(&Address::new(vec![1], 2).unwrap(), &p).unwrap(), 0.7);
        for len in 1..5 {
            let total: f64 = Address::all(2, len).map(|w| cylinder_mass(&w, &p).unwrap()).sum();
            assert!((total - 1.0).abs() < 1e-12);
        }
        let three = ProbabilityVector::uniform(3).unwrap();
        assert!(cylinder_mass(&Address::new(vec![2], 3).unwrap(), &p).is_err());
        assert!(cylinder_mass(&Address::new(vec![], 3).unwrap(), &three).is_err());
    }

    #[test]
    fn ball_mass_examples() {
        let sys = tent(vec![0.4, -0.3]);
        let p = ProbabilityVector::uniform(2).unwrap();
        let mu = chaos_game(&sys, &p, 2000, 64, 3).unwrap();
        let c = mu.point(17).to_vec();
        assert_eq!(ball_mass(&mu, &c, 10.0), 1.0);
        assert_eq!(ball_mass(&mu, &c, 1e-300), 1.0 / 2000.0);
    }

    #[test]
    fn segment_measure_has_local_dimension_one() {
        let sys = tent(vec![0.0, 0.0]);
        let p = ProbabilityVector::from_lengths(&sys).unwrap();
        let mu = chaos_game(&sys, &p, 100_000, 64, 9).unwrap();
        let centers = default_centers(&mu, 20);
        let r = local_dimension(&mu, &centers, &default_radii(&mu)).unwrap();
        let s = r.median_slope.unwrap();
        assert!((s - 1.0).abs() < 0.1, "slope {s}");
    }

    #[test]
    fn point_mass_has_local_dimension_zero() {
        let mu = EmpiricalMeasure {
            points: [0.2, 0.3].repeat(500),
            dim: 1,
            seed: 0,
            burn_in: 0,
            indices: vec![0; 500],
        };
        let r = local_dimension(&mu, &[vec![0.2, 0.3]], &[0.1, 0.03, 0.01, 0.003, 0.001]).unwrap();
        assert_eq!(r.median_slope, Some(0.0));
    }

    #[test]
    fn local_dimension_rejects_short_ladders() {
        let sys = tent(vec![0.2, 0.2]);
        let p = ProbabilityVector::uniform(2).unwrap();
        let mu = chaos_game(&sys, &p, 1000, 10, 1).unwrap();
        let c = default_centers(&mu, 2);
        assert!(local_dimension(&mu, &c, &[0.1, 0.05, 0.02]).is_err());
        assert!(local_dimension(&mu, &c, &[0.1, 0.08, 0.06, 0.04]).is_err());
    }

    #[test]
    fn entropy_examples() {
        let half = ProbabilityVector::uniform(2).unwrap();
        assert_eq!(entropy_dimension_bound(&half, &[0.5, 0.5]).unwrap(), 1.0);
        let e = entropy_dimension_bound(&half, &[0.75, 0.75]).unwrap();
        assert!((e - 2f64.ln() / (4.0f64 / 3.0).ln()).abs() < 1e-12);
        assert!((e - 2.4094).abs() < 1e-4);
        let skew = ProbabilityVector::new(vec![0.9, 0.1]).unwrap();
        let e = entropy_dimension_bound(&skew, &[0.5, 0.5]).unwrap();
        let oracle = -(0.9 * 0.9f64.log2() + 0.1 * 0.1f64.log2());
        assert!((e - oracle).abs() < 1e-12);
        assert!((e - 0.4690).abs() < 1e-4);
        assert!(entropy_dimension_bound(&half, &[0.5, 1.0]).is_err());
        assert!(entropy_dimension_bound(&half, &[0.0, 0.5]).is_err());
    }

    #[test]
    fn measure_bounds_examples() {
        let sys = tent(vec![0.5, 0.5]);
        let b = measure_dim_bounds(&sys, &ProbabilityVector::uniform(2).unwrap()).unwrap();
        assert!((b.lower.unwrap() - 1.0).abs() < 1e-10);
        assert!((b.upper - 1.0).abs() < 1e-10);
        assert_eq!(b.entropy_bound, 1.0);
        let b = measure_dim_bounds(&sys, &ProbabilityVector::new(vec![0.2, 0.8]).unwrap()).unwrap();
        assert!(b.entropy_bound < 1.0);
        let heavy = tent(vec![0.75, 0.75]);
        let b = measure_dim_bounds(&heavy, &ProbabilityVector::uniform(2).unwrap()).unwrap();
        assert!((b.upper - b.entropy_bound).abs() < 1e-10);
        assert!((b.upper - 2.4094).abs() < 1e-4);
        let flat = tent(vec![0.0, 0.5]);
        let b = measure_dim_bounds(&flat, &ProbabilityVector::uniform(2).unwrap()).unwrap();
        assert!(b.lower.is_none() && b.lower_degenerate);
    }

    #[test]
    fn summary_json_keys() {
        let sys = tent(vec![0.3, 0.3]);
        let p = ProbabilityVector::uniform(2).unwrap();
        let b = measure_dim_bounds(&sys, &p).unwrap();
        let mu = chaos_game(&sys, &p, 5000, 64, 2).unwrap();
        let l = local_dimension(&mu, &default_centers(&mu, 5), &default_radii(&mu)).unwrap();
        let v = serde_json::to_value(MeasureSummary::new(&b, &l)).unwrap();
        for key in ["r", "R", "entropy_bound", "local_dim_median", "fit_r2"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
    }

    proptest! {
        #[test]
        fn entropy_bound_below_moran_for_equal_ratios(
            raw in proptest::collection::vec(0.01f64..1.0, 2..6),
            c in 0.05f64..0.95,
        ) {
            let s: f64 = raw.iter().sum();
            let p = ProbabilityVector::new(raw.iter().map(|v| v / s).collect());
            prop_assume!(p.is_ok());
            let p = p.unwrap();
            let ratios = vec![c; p.len()];
            let e = entropy_dimension_bound(&p, &ratios).unwrap();
            let r = moran_solve(&ratios, 1e-12).unwrap().s;
            prop_assert!(e > 0.0);
            prop_assert!(e <= r + 1e-9);
        }

        #[test]
        fn entropy_bound_permutation_invariant(
            raw in proptest::collection::vec(0.01f64..1.0, 3..6),
            cs in proptest::collection::vec(0.05f64..0.95, 6),
        ) {
            let s: f64 = raw.iter().sum();
            let p: Vec<f64> = raw.iter().map(|v| v / s).collect();
            let c = &cs[..p.len()];
            let pv = ProbabilityVector::new(p.clone());
            prop_assume!(pv.is_ok());
            let e = entropy_dimension_bound(&pv.unwrap(), c).unwrap();
            let mut pr = p.clone();
            pr.reverse();
            let mut cr = c.to_vec();
            cr.reverse();
            let pr = ProbabilityVector::new(pr);
            prop_assume!(pr.is_ok());
            let er = entropy_dimension_bound(&pr.unwrap(), &cr).unwrap();
            prop_assert!((e - er).abs() < 1e-12 * e.abs().max(1.0));
        }
    }
}
