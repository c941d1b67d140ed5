//! Function-space membership predicates for FIF systems.

use serde::{Deserialize, Serialize};

use super::oscillation::{dyadic_level_sums, holder_constant};
use crate::error::{FifError, Result};
use crate::fif::{evaluate_fif, FifSystem, GraphSample};

/// Tolerance for the dyadic-length check.
pub const DYADIC_TOL: f64 = 1e-12;
/// Grid used to render `h` when estimating its Hölder constant.
pub const PREDICATE_GRID: usize = 4096;

const PROBES: usize = 512;
const PROBE_LEVELS: u32 = 7;
const PROBE_OFFSETS: u32 = 4;
const CAP_LEVELS: u32 = 12;
const CAP_FIT_FROM: u32 = 6;
const CAP_GROWTH_TOL: f64 = 0.05;
const CAP_LADDER: u32 = 8;

/// Quantities entering the inequalities, as computed from the system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witnesses {
    pub alpha_max: f64,
    pub a_min: f64,
    pub a_max: f64,
    pub sigma: f64,
    /// Number of knots `N`.
    pub n: usize,
    pub sum_abs_alpha: f64,
    /// Exponent of the `V_α` space under test.
    pub alpha: f64,
}

/// `lhs < rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl Inequality {
    pub fn less(lhs: f64, rhs: f64) -> Self {
        Self {
            lhs,
            rhs,
            holds: lhs < rhs,
        }
    }
}

/// Every `|a_k| = 2^{-r_k}` with `Σ 2^{-r_k} = 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DyadicCheck {
    pub holds: bool,
    /// `r_k` where `|a_k|` is a dyadic fraction.
    pub exponents: Vec<Option<u32>>,
    pub sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VAlphaCondition {
    pub holds: bool,
    /// `Σ|α_k| < 1`.
    pub scaling: Inequality,
    pub dyadic: DyadicCheck,
}

/// Hypotheses of the `2 - σ` box-dimension statement. The reverse-Hölder
/// constants are sampled, so the verdict is heuristic.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OscillationHypotheses {
    pub holds: bool,
    pub heuristic: bool,
    /// `α_max / a_min^σ < 1`.
    pub holder: Inequality,
    /// `α_max a_max^σ h_q < C_0 a_min^σ`.
    pub constant: Inequality,
    /// Sampled `C_{k,i}`, indexed by branch then component.
    pub reverse_holder: Vec<Vec<f64>>,
    pub c0: f64,
    pub delta0: f64,
    pub h_q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacePredicateReport {
    pub witnesses: Witnesses,
    /// `α_max / a_min^σ < 1`.
    pub holder: Inequality,
    /// `α_max < 1/(N-1)`.
    pub bv: Inequality,
    /// `α_max < a_min/(N-1)`.
    pub ac: Inequality,
    pub v_alpha: VAlphaCondition,
    pub oscillation: OscillationHypotheses,
}

fn dyadic_check(sys: &FifSystem) -> DyadicCheck {
    let exponents: Vec<Option<u32>> = sys
        .slopes()
        .iter()
        .map(|a| {
            let r = (-a.abs().log2()).round();
            ((1.0..64.0).contains(&r) && (a.abs() - 0.5f64.powi(r as i32)).abs() <= DYADIC_TOL)
                .then_some(r as u32)
        })
        .collect();
    let sum: f64 = sys.slopes().iter().map(|a| a.abs()).sum();
    let holds = exponents.iter().all(Option::is_some) && (sum - 1.0).abs() <= DYADIC_TOL;
    DyadicCheck {
        holds,
        exponents,
        sum,
    }
}

/// Sampled reverse-Hölder constant of the scalar function `q` on `[lo, hi]`:
/// for each scale `δ`, the worst probe `t_1` of the best nearby
/// `|q(t_1) - q(t_2)| / |t_1 - t_2|^σ`; then the minimum over scales.
fn reverse_holder_constant<F: Fn(f64) -> f64>(q: F, lo: f64, hi: f64, sigma: f64) -> f64 {
    let len = hi - lo;
    let probes: Vec<(f64, f64)> = (0..PROBES)
        .map(|j| {
            let t = lo + len * j as f64 / (PROBES - 1) as f64;
            (t, q(t))
        })
        .collect();
    let mut c = f64::INFINITY;
    for l in 0..PROBE_LEVELS {
        let delta = len / 8.0 * 0.5f64.powi(l as i32);
        let mut worst = f64::INFINITY;
        for &(t1, q1) in &probes {
            let mut best = 0.0f64;
            for j in 0..PROBE_OFFSETS {
                let off = delta * 0.5f64.powi(j as i32);
                for t2 in [t1 - off, t1 + off] {
                    if t2 >= lo && t2 <= hi {
                        best = best.max((q1 - q(t2)).abs() / off.powf(sigma));
                    }
                }
            }
            worst = worst.min(best);
        }
        c = c.min(worst);
    }
    c
}

fn oscillation_hypotheses(sys: &FifSystem, sigma: f64, h: Option<&GraphSample>) -> OscillationHypotheses {
    let (lo, hi) = sys.interval();
    let a_min = sys.a_min();
    let a_max = sys.a_max();
    let alpha_max = sys.alpha_max();
    let reverse_holder: Vec<Vec<f64>> = sys
        .branches()
        .iter()
        .map(|b| {
            (0..sys.dim())
                .map(|i| reverse_holder_constant(|t| b.forcing.eval(t)[i], lo, hi, sigma))
                .collect()
        })
        .collect();
    let c0 = reverse_holder
        .iter()
        .flatten()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mut note = None;
    let h_q = match h {
        Some(h) => match holder_constant(h, sigma) {
            Ok(v) => Some(v),
            Err(e) => {
                note = Some(format!("Hölder constant unavailable: {e}"));
                None
            }
        },
        None => {
            note = Some("graph not available; Hölder constant not estimated".into());
            None
        }
    };
    let holder = Inequality::less(alpha_max / a_min.powf(sigma), 1.0);
    let constant = match h_q {
        Some(hq) => Inequality::less(alpha_max * a_max.powf(sigma) * hq, c0 * a_min.powf(sigma)),
        None => Inequality {
            lhs: f64::NAN,
            rhs: c0 * a_min.powf(sigma),
            holds: false,
        },
    };
    OscillationHypotheses {
        holds: holder.holds && constant.holds && c0 > 0.0,
        heuristic: true,
        holder,
        constant,
        reverse_holder,
        c0,
        delta0: (hi - lo) / 8.0,
        h_q,
        note,
    }
}

/// Evaluate every membership predicate, rendering `h` on a
/// [`PREDICATE_GRID`] grid for the Hölder-constant estimate.
pub fn space_predicates(sys: &FifSystem, sigma: f64, alpha: f64) -> Result<SpacePredicateReport> {
    let h = evaluate_fif(sys, PREDICATE_GRID, 1e-10, 500).ok();
    build_report(sys, sigma, alpha, h.as_ref())
}

/// As [`space_predicates`] with an already rendered `h`.
pub fn space_predicates_with_graph(
    sys: &FifSystem,
    sigma: f64,
    alpha: f64,
    h: &GraphSample,
) -> Result<SpacePredicateReport> {
    build_report(sys, sigma, alpha, Some(h))
}

fn build_report(
    sys: &FifSystem,
    sigma: f64,
    alpha: f64,
    h: Option<&GraphSample>,
) -> Result<SpacePredicateReport> {
    if !(sigma > 0.0 && sigma <= 1.0) {
        return Err(FifError::Domain(format!("exponent {sigma} outside (0, 1]")));
    }
    let n = sys.data().len();
    let witnesses = Witnesses {
        alpha_max: sys.alpha_max(),
        a_min: sys.a_min(),
        a_max: sys.a_max(),
        sigma,
        n,
        sum_abs_alpha: sys.sum_abs_alpha(),
        alpha,
    };
    let w = &witnesses;
    let branches = (n - 1) as f64;
    let dyadic = dyadic_check(sys);
    let scaling = Inequality::less(w.sum_abs_alpha, 1.0);
    Ok(SpacePredicateReport {
        holder: Inequality::less(w.alpha_max / w.a_min.powf(sigma), 1.0),
        bv: Inequality::less(w.alpha_max, 1.0 / branches),
        ac: Inequality::less(w.alpha_max, w.a_min / branches),
        v_alpha: VAlphaCondition {
            holds: scaling.holds && dyadic.holds,
            scaling,
            dyadic,
        },
        oscillation: oscillation_hypotheses(sys, sigma, h),
        witnesses,
    })
}

/// Upper box-dimension cap `α` for real-valued systems: returned when
/// `Σ|α_k| < 1`, the base intervals are dyadic, and each sampled `q_k` has
/// bounded `V_{α+1/n}` level sums for `n = 1..=8`.
pub fn upper_box_cap(sys: &FifSystem, alpha: f64) -> Result<Option<f64>> {
    if sys.dim() != 1 {
        return Err(FifError::Unsupported(format!(
            "box-dimension cap needs a real-valued system, got {} components; the \
             bound fails for vector-valued graphs (two coordinates of a Peano \
             space-filling curve each have upper box dimension 1.5 while the \
             pair has 2)",
            sys.dim()
        )));
    }
    if !(alpha >= 1.0) || !alpha.is_finite() {
        return Err(FifError::Domain(format!("exponent {alpha} must be at least 1")));
    }
    if sys.sum_abs_alpha() >= 1.0 || !dyadic_check(sys).holds {
        return Ok(None);
    }
    let (lo, hi) = sys.interval();
    let m = 1usize << CAP_LEVELS;
    let grid: Vec<f64> = (0..=m)
        .map(|j| {
            let s = j as f64 / m as f64;
            (1.0 - s) * lo + s * hi
        })
        .collect();
    for b in sys.branches() {
        let q = GraphSample::from_fn(grid.clone(), 1, |t| b.forcing.eval(t))?;
        let sums = dyadic_level_sums(&q, CAP_LEVELS);
        for n in 1..=CAP_LADDER {
            let gamma = alpha + 1.0 / n as f64;
            if !bounded_levels(&sums, gamma) {
                return Ok(None);
            }
        }
    }
    Ok(Some(alpha))
}

/// Growth rate of `log2(2^{-n(γ-1)} S_n)` over the finest levels.
fn bounded_levels(sums: &[f64], gamma: f64) -> bool {
    let pts: Vec<(f64, f64)> = sums
        .iter()
        .enumerate()
        .map(|(i, &s)| ((i + 1) as f64, s))
        .filter(|&(n, s)| n >= CAP_FIT_FROM as f64 && s > 0.0)
        .map(|(n, s)| (n, s.log2() - n * (gamma - 1.0)))
        .collect();
    if pts.len() < 2 {
        return true;
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    crate::regression::least_squares(&x, &y).is_none_or(|f| f.slope <= CAP_GROWTH_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fif::InterpolationData;

    fn system(knots: Vec<f64>, values: Vec<f64>, alphas: Vec<f64>) -> FifSystem {
        FifSystem::affine(InterpolationData::scalar(knots, values).unwrap(), alphas).unwrap()
    }

    fn consistent(r: &SpacePredicateReport) {
        let w = &r.witnesses;
        let b = (w.n - 1) as f64;
        assert_eq!(r.holder.holds, w.alpha_max / w.a_min.powf(w.sigma) < 1.0);
        assert_eq!(r.bv.holds, w.alpha_max < 1.0 / b);
        assert_eq!(r.ac.holds, w.alpha_max < w.a_min / b);
        assert_eq!(r.v_alpha.scaling.holds, w.sum_abs_alpha < 1.0);
    }

    #[test]
    fn bv_predicate_example() {
        let sys = system(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0], vec![0.3, 0.3]);
        let r = space_predicates(&sys, 0.5, 1.0).unwrap();
        assert!(r.bv.holds);
        assert_eq!(r.bv.rhs, 0.5);
        consistent(&r);
    }

    #[test]
    fn holder_predicate_fails_example() {
        let sys = system(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0], vec![0.8, 0.8]);
        let r = space_predicates(&sys, 0.5, 1.0).unwrap();
        assert!(!r.holder.holds);
        assert!((r.holder.lhs - 0.8 / 0.5f64.sqrt()).abs() < 1e-12);
        assert!((r.holder.lhs - 1.131).abs() < 1e-3);
        consistent(&r);
    }

    #[test]
    fn dyadic_lengths() {
        let sys = system(vec![0.0, 0.5, 0.75, 1.0], vec![0.0, 1.0, 0.0, 1.0], vec![0.2; 3]);
        let d = dyadic_check(&sys);
        assert!(d.holds);
        assert_eq!(d.exponents, vec![Some(1), Some(2), Some(2)]);
        let thirds = system(vec![0.0, 1.0, 2.0, 3.0], vec![0.0, 1.0, 0.0, 1.0], vec![0.2; 3]);
        assert!(!dyadic_check(&thirds).holds);
    }

    #[test]
    fn affine_forcing_is_not_reverse_holder() {
        let sys = system(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0], vec![0.3, 0.3]);
        let r = space_predicates(&sys, 0.5, 1.0).unwrap();
        assert!(r.oscillation.heuristic);
        assert!(r.oscillation.c0 < 0.1);
        assert!(r.oscillation.h_q.is_some());
    }

    #[test]
    fn reverse_holder_separates_rough_from_smooth() {
        let w = |t: f64| -> f64 {
            (0..16)
                .map(|n| 2f64.powf(-0.5 * n as f64) * (2f64.powi(n) * std::f64::consts::TAU * t).cos())
                .sum()
        };
        let c = reverse_holder_constant(w, 0.0, 1.0, 0.5);
        assert!(c > 0.1, "constant {c}");
        let lin = reverse_holder_constant(|t| t, 0.0, 1.0, 0.5);
        assert!(lin < 0.05, "constant {lin}");
    }

    #[test]
    fn box_cap_examples() {
        let sys = system(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0], vec![0.3, 0.3]);
        assert_eq!(upper_box_cap(&sys, 1.2).unwrap(), Some(1.2));
        let heavy = system(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0], vec![0.55, 0.55]);
        assert_eq!(upper_box_cap(&heavy, 1.2).unwrap(), None);
        let data = InterpolationData::new(
            vec![0.0, 0.5, 1.0],
            vec![vec![0.0, 0.0], vec![1.0, 0.5], vec![0.0, 1.0]],
        )
        .unwrap();
        let vector = FifSystem::affine(data, vec![0.3, 0.3]).unwrap();
        assert!(matches!(
            upper_box_cap(&vector, 1.2),
            Err(FifError::Unsupported(_))
        ));
    }

    #[test]
    fn rough_forcing_has_no_small_cap() {
        let data = InterpolationData::scalar(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let nodes: Vec<f64> = (0..=4096).map(|j| j as f64 / 4096.0).collect();
        let alphas = [0.2, 0.2];
        let forcings = (0..2)
            .map(|k| {
                crate::fif::corrected_sampled_forcing(&data, alphas[k], k, &nodes, |t| {
                    vec![(0..10).map(|n| 2f64.powf(-0.5 * n as f64) * (2f64.powi(n) * 7.0 * t).cos()).sum()]
                })
            })
            .collect::<Result<Vec<_>>>()
            .unwrap();
        let sys = FifSystem::new(data, alphas.to_vec(), forcings).unwrap();
        assert_eq!(upper_box_cap(&sys, 1.0).unwrap(), None);
        assert_eq!(upper_box_cap(&sys, 1.6).unwrap(), Some(1.6));
    }
}
