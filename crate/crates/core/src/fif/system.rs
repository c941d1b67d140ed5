//! The iterated function system `W_k(t, z) = (P_k(t), α_k z + q_k(t))`.

use serde::{Deserialize, Serialize};

use super::data::InterpolationData;
use super::forcing::{ForcingFunction, SampledGrid};
use crate::error::{FifError, Result};

/// Default tolerance on the endpoint conditions of `q_k`.
pub const DEFAULT_TAU_END: f64 = 1e-9;

/// Affine base map `P_k(t) = a_k t + d_k` taking `[x_1, x_N]` onto `[x_k, x_{k+1}]`.
///
/// Evaluation goes through the normalised coordinate so that the knots map
/// to knots bit-exactly.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BaseMap {
    pub slope: f64,
    pub offset: f64,
    domain: (f64, f64),
    image: (f64, f64),
}

impl BaseMap {
    fn new(domain: (f64, f64), image: (f64, f64)) -> Self {
        let (x1, xn) = domain;
        let (xk, xk1) = image;
        let width = xn - x1;
        Self {
            slope: (xk1 - xk) / width,
            offset: (xn * xk - x1 * xk1) / width,
            domain,
            image,
        }
    }

    pub fn apply(&self, t: f64) -> f64 {
        let s = (t - self.domain.0) / (self.domain.1 - self.domain.0);
        (1.0 - s) * self.image.0 + s * self.image.1
    }

    pub fn inverse(&self, x: f64) -> f64 {
        let u = (x - self.image.0) / (self.image.1 - self.image.0);
        (1.0 - u) * self.domain.0 + u * self.domain.1
    }

    pub fn image(&self) -> (f64, f64) {
        self.image
    }
}

/// `(a_k, d_k)` for every branch, fixed by `P_k(x_1) = x_k`, `P_k(x_N) = x_{k+1}`.
pub fn derive_base_maps(data: &InterpolationData) -> Vec<BaseMap> {
    let domain = data.interval();
    data.knots()
        .windows(2)
        .map(|w| BaseMap::new(domain, (w[0], w[1])))
        .collect()
}

fn check_alphas(data: &InterpolationData, alphas: &[f64]) -> Result<()> {
    if alphas.len() != data.branch_count() {
        return Err(FifError::DimensionMismatch {
            expected: data.branch_count(),
            got: alphas.len(),
        });
    }
    Ok(())
}

fn affine_forcing_unchecked(data: &InterpolationData, alphas: &[f64]) -> Vec<ForcingFunction> {
    let (x1, xn) = data.interval();
    let y1 = data.first_value();
    let yn = data.last_value();
    alphas
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            let start = data.value(k).iter().zip(y1).map(|(yk, y)| yk - alpha * y).collect();
            let end = data
                .value(k + 1)
                .iter()
                .zip(yn)
                .map(|(yk, y)| yk - alpha * y)
                .collect();
            ForcingFunction::AffineEndpoints {
                x_start: x1,
                x_end: xn,
                start,
                end,
            }
        })
        .collect()
}

/// The affine `q_k` through `(x_1, y_k - α_k y_1)` and `(x_N, y_{k+1} - α_k y_N)`.
pub fn affine_forcing(data: &InterpolationData, alphas: &[f64]) -> Result<Vec<ForcingFunction>> {
    check_alphas(data, alphas)?;
    if let Some((branch, &alpha)) = alphas.iter().enumerate().find(|(_, a)| !(a.abs() < 1.0)) {
        return Err(FifError::InvalidScaling { branch, alpha });
    }
    Ok(affine_forcing_unchecked(data, alphas))
}

/// Sample `shape` on `nodes` and add the affine correction that makes the
/// result satisfy the endpoint conditions of branch `branch` exactly.
///
/// Any continuous `shape` becomes an admissible forcing this way.
pub fn corrected_sampled_forcing<F>(
    data: &InterpolationData,
    alpha: f64,
    branch: usize,
    nodes: &[f64],
    shape: F,
) -> Result<ForcingFunction>
where
    F: Fn(f64) -> Vec<f64>,
{
    let (x1, xn) = data.interval();
    if nodes.first() != Some(&x1) || nodes.last() != Some(&xn) {
        return Err(FifError::InvalidData(
            "forcing nodes must start at x_1 and end at x_N".into(),
        ));
    }
    if branch >= data.branch_count() {
        return Err(FifError::Domain(format!("branch {branch} out of range")));
    }
    let m = data.dim();
    let s0 = shape(x1);
    let s1 = shape(xn);
    if s0.len() != m || s1.len() != m {
        return Err(FifError::DimensionMismatch {
            expected: m,
            got: s0.len(),
        });
    }
    let want0: Vec<f64> = (0..m)
        .map(|i| data.value(branch)[i] - alpha * data.first_value()[i])
        .collect();
    let want1: Vec<f64> = (0..m)
        .map(|i| data.value(branch + 1)[i] - alpha * data.last_value()[i])
        .collect();
    let mut values = Vec::with_capacity(nodes.len() * m);
    let last = nodes.len() - 1;
    for (j, &t) in nodes.iter().enumerate() {
        let w = (t - x1) / (xn - x1);
        let s = shape(t);
        for i in 0..m {
            let v = if j == 0 {
                want0[i]
            } else if j == last {
                want1[i]
            } else {
                s[i] + (1.0 - w) * (want0[i] - s0[i]) + w * (want1[i] - s1[i])
            };
            values.push(v);
        }
    }
    Ok(ForcingFunction::SampledGrid(SampledGrid::new(
        nodes.to_vec(),
        values,
        m,
    )?))
}

/// Lacunary cosine series `A Σ_{n<terms} b^{-σn} cos(2π b^n s + φ)` in the
/// normalised coordinate `s = (t - x_1)/(x_N - x_1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeierstrassShape {
    pub amplitude: f64,
    pub sigma: f64,
    pub base: f64,
    pub terms: u32,
    /// Number of sampling cells on `[x_1, x_N]`.
    pub samples: usize,
}

impl WeierstrassShape {
    pub fn eval(&self, s: f64, phase: f64) -> f64 {
        let mut freq = 1.0;
        let mut amp = self.amplitude;
        let decay = self.base.powf(-self.sigma);
        let mut acc = 0.0;
        for _ in 0..self.terms {
            acc += amp * (std::f64::consts::TAU * freq * s + phase).cos();
            freq *= self.base;
            amp *= decay;
        }
        acc
    }

    fn check(&self) -> Result<()> {
        let ok = self.amplitude.is_finite()
            && self.sigma > 0.0
            && self.sigma <= 1.0
            && self.base > 1.0
            && self.base.is_finite()
            && self.terms >= 1
            && self.samples >= 2;
        if ok {
            Ok(())
        } else {
            Err(FifError::InvalidData(format!("invalid Weierstrass shape {self:?}")))
        }
    }
}

/// Endpoint-corrected [`WeierstrassShape`] forcing for every branch;
/// component `i` of branch `k` uses phase `k + 2i`.
pub fn weierstrass_forcings(
    data: &InterpolationData,
    alphas: &[f64],
    shape: &WeierstrassShape,
) -> Result<Vec<ForcingFunction>> {
    check_alphas(data, alphas)?;
    shape.check()?;
    let (x1, xn) = data.interval();
    let n = shape.samples;
    let nodes: Vec<f64> = (0..=n)
        .map(|j| {
            let s = j as f64 / n as f64;
            (1.0 - s) * x1 + s * xn
        })
        .collect();
    alphas
        .iter()
        .enumerate()
        .map(|(k, &alpha)| {
            corrected_sampled_forcing(data, alpha, k, &nodes, |t| {
                let s = (t - x1) / (xn - x1);
                (0..data.dim())
                    .map(|i| shape.eval(s, (k + 2 * i) as f64))
                    .collect()
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FifBranch {
    pub base: BaseMap,
    pub alpha: f64,
    pub forcing: ForcingFunction,
}

impl FifBranch {
    /// `W_k(t, z)`; writes the vertical part into `out` and returns `P_k(t)`.
    pub fn apply_into(&self, t: f64, z: &[f64], out: &mut [f64]) -> f64 {
        self.forcing.eval_into(t, out);
        for (o, &zi) in out.iter_mut().zip(z) {
            *o += self.alpha * zi;
        }
        self.base.apply(t)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FifSystem {
    data: InterpolationData,
    branches: Vec<FifBranch>,
    tau_end: f64,
}

impl FifSystem {
    /// Assemble a system. Only structural consistency is checked here; the
    /// analytic conditions are reported by [`FifSystem::validate`].
    pub fn new(
        data: InterpolationData,
        alphas: Vec<f64>,
        forcings: Vec<ForcingFunction>,
    ) -> Result<Self> {
        check_alphas(&data, &alphas)?;
        if forcings.len() != alphas.len() {
            return Err(FifError::DimensionMismatch {
                expected: alphas.len(),
                got: forcings.len(),
            });
        }
        if let Some(q) = forcings.iter().find(|q| q.dim() != data.dim()) {
            return Err(FifError::DimensionMismatch {
                expected: data.dim(),
                got: q.dim(),
            });
        }
        if alphas.iter().any(|a| !a.is_finite()) {
            return Err(FifError::InvalidData("non-finite scaling factor".into()));
        }
        let branches = derive_base_maps(&data)
            .into_iter()
            .zip(alphas)
            .zip(forcings)
            .map(|((base, alpha), forcing)| FifBranch {
                base,
                alpha,
                forcing,
            })
            .collect();
        Ok(Self {
            data,
            branches,
            tau_end: DEFAULT_TAU_END,
        })
    }

    /// Classical affine FIF.
    pub fn affine(data: InterpolationData, alphas: Vec<f64>) -> Result<Self> {
        let forcings = affine_forcing(&data, &alphas)?;
        Self::new(data, alphas, forcings)
    }

    /// Like [`FifSystem::affine`] but accepts any `α` so that invalid
    /// systems can be built and reported on.
    pub fn affine_unchecked(data: InterpolationData, alphas: Vec<f64>) -> Result<Self> {
        check_alphas(&data, &alphas)?;
        let forcings = affine_forcing_unchecked(&data, &alphas);
        Self::new(data, alphas, forcings)
    }

    pub fn with_tau_end(mut self, tau_end: f64) -> Self {
        self.tau_end = tau_end;
        self
    }

    pub fn data(&self) -> &InterpolationData {
        &self.data
    }

    pub fn branches(&self) -> &[FifBranch] {
        &self.branches
    }

    pub fn branch(&self, k: usize) -> &FifBranch {
        &self.branches[k]
    }

    pub fn tau_end(&self) -> f64 {
        self.tau_end
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn branch_count(&self) -> usize {
        self.branches.len()
    }

    pub fn interval(&self) -> (f64, f64) {
        self.data.interval()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.alpha).collect()
    }

    pub fn slopes(&self) -> Vec<f64> {
        self.branches.iter().map(|b| b.base.slope).collect()
    }

    pub fn a_min(&self) -> f64 {
        self.branches.iter().map(|b| b.base.slope.abs()).fold(f64::INFINITY, f64::min)
    }

    pub fn a_max(&self) -> f64 {
        self.branches.iter().map(|b| b.base.slope.abs()).fold(0.0, f64::max)
    }

    pub fn alpha_max(&self) -> f64 {
        self.branches.iter().map(|b| b.alpha.abs()).fold(0.0, f64::max)
    }

    pub fn sum_abs_alpha(&self) -> f64 {
        self.branches.iter().map(|b| b.alpha.abs()).sum()
    }

    /// Error unless every `|α_k| < 1`.
    pub fn ensure_contractive(&self) -> Result<()> {
        match self.branches.iter().enumerate().find(|(_, b)| !(b.alpha.abs() < 1.0)) {
            Some((branch, b)) => Err(FifError::InvalidScaling {
                branch,
                alpha: b.alpha,
            }),
            None => Ok(()),
        }
    }

    /// Branch whose image `[x_k, x_{k+1}]` contains `t` (lowest index at shared knots).
    pub fn branch_of(&self, t: f64) -> usize {
        let knots = self.data.knots();
        let j = knots.partition_point(|&x| x < t);
        j.saturating_sub(1).min(self.branches.len() - 1)
    }

    pub fn validate(&self) -> ValidationReport {
        validate_system(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EndpointMismatch {
        branch: usize,
        endpoint: Endpoint,
        residual: f64,
        tolerance: f64,
    },
    ScalingOutOfRange {
        branch: usize,
        alpha: f64,
    },
    BranchOverlap {
        first: usize,
        second: usize,
        overlap: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Endpoint {
    First,
    Last,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub violations: Vec<Violation>,
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Collect every violated condition: endpoint (join-up) conditions of
/// `q_k`, `|α_k| < 1` and disjointness of the branch images.
pub fn validate_system(sys: &FifSystem) -> ValidationReport {
    let data = &sys.data;
    let (x1, xn) = data.interval();
    let mut violations = Vec::new();
    for (k, b) in sys.branches.iter().enumerate() {
        if !(b.alpha.abs() < 1.0) {
            violations.push(Violation::ScalingOutOfRange {
                branch: k,
                alpha: b.alpha,
            });
        }
        let checks = [
            (Endpoint::First, x1, data.value(k), data.first_value()),
            (Endpoint::Last, xn, data.value(k + 1), data.last_value()),
        ];
        for (endpoint, x, yk, yend) in checks {
            let want: Vec<f64> = yk.iter().zip(yend).map(|(a, e)| a - b.alpha * e).collect();
            let got = b.forcing.eval(x);
            let residual = distance(&want, &got);
            if !(residual <= sys.tau_end) {
                violations.push(Violation::EndpointMismatch {
                    branch: k,
                    endpoint,
                    residual,
                    tolerance: sys.tau_end,
                });
            }
        }
    }
    for (k, pair) in sys.branches.windows(2).enumerate() {
        let (lo0, hi0) = (pair[0].base.apply(x1), pair[0].base.apply(xn));
        let (lo1, _) = (pair[1].base.apply(x1), pair[1].base.apply(xn));
        let overlap = hi0.max(lo0) - lo1;
        if overlap > 1e-12 * (xn - x1) {
            violations.push(Violation::BranchOverlap {
                first: k,
                second: k + 1,
                overlap,
            });
        }
    }
    ValidationReport {
        valid: violations.is_empty(),
        violations,
    }
}

/// Lipschitz bounds `c_k ≤ Lip(W_k) ≤ C_k` in the graph-adapted metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionRatio {
    pub lower: f64,
    pub upper: f64,
    /// Set when `c_k = 0`, i.e. the lower Moran bound is not available.
    pub degenerate: bool,
}

/// `c_k = min(|a_k|, |α_k|)`, `C_k = max(|a_k|, |α_k|)`.
pub fn contraction_ratios(sys: &FifSystem) -> Vec<ContractionRatio> {
    sys.branches
        .iter()
        .map(|b| {
            let a = b.base.slope.abs();
            let alpha = b.alpha.abs();
            let lower = a.min(alpha);
            ContractionRatio {
                lower,
                upper: a.max(alpha),
                degenerate: lower == 0.0,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> InterpolationData {
        InterpolationData::scalar(vec![0.0, 0.5, 1.0], vec![0.0, 1.0, 0.0]).unwrap()
    }

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() < 1e-15
    }

    #[test]
    fn base_maps_half_half() {
        let maps = derive_base_maps(&tent());
        assert!(close(maps[0].slope, 0.5) && close(maps[0].offset, 0.0));
        assert!(close(maps[1].slope, 0.5) && close(maps[1].offset, 0.5));
    }

    #[test]
    fn base_maps_quarter() {
        let d = InterpolationData::scalar(vec![0.0, 0.25, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let maps = derive_base_maps(&d);
        assert!(close(maps[0].slope, 0.25) && close(maps[0].offset, 0.0));
        assert!(close(maps[1].slope, 0.75) && close(maps[1].offset, 0.25));
    }

    #[test]
    fn base_maps_thirds() {
        let d = InterpolationData::scalar(
            vec![0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0],
            vec![0.0, 1.0, 0.0, 1.0],
        )
        .unwrap();
        let maps = derive_base_maps(&d);
        for (k, m) in maps.iter().enumerate() {
            assert!((m.slope - 1.0 / 3.0).abs() < 1e-15);
            assert!((m.offset - k as f64 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn base_maps_hit_knots_exactly() {
        let d = InterpolationData::scalar(
            vec![-1.3, 0.17, 0.9, 2.71],
            vec![0.0, 1.0, 0.0, 1.0],
        )
        .unwrap();
        let maps = derive_base_maps(&d);
        let (x1, xn) = d.interval();
        let total: f64 = maps.iter().map(|m| m.slope.abs()).sum();
        assert!((total - 1.0).abs() < 1e-15);
        for (k, m) in maps.iter().enumerate() {
            assert_eq!(m.apply(x1), d.knot(k));
            assert_eq!(m.apply(xn), d.knot(k + 1));
            assert_eq!(m.inverse(d.knot(k)), x1);
            assert_eq!(m.inverse(d.knot(k + 1)), xn);
            assert!(m.slope.abs() < 1.0);
        }
    }

    #[test]
    fn affine_forcing_zero_alpha() {
        let q = affine_forcing(&tent(), &[0.0, 0.0]).unwrap();
        assert_eq!(q[0].eval(0.0), vec![0.0]);
        assert_eq!(q[0].eval(1.0), vec![1.0]);
        assert_eq!(q[1].eval(0.0), vec![1.0]);
        assert_eq!(q[1].eval(1.0), vec![0.0]);
    }

    #[test]
    fn affine_forcing_alpha_cancels_when_ends_vanish() {
        let q0 = affine_forcing(&tent(), &[0.0, 0.0]).unwrap();
        let q = affine_forcing(&tent(), &[0.5, 0.5]).unwrap();
        assert_eq!(q, q0);
    }

    #[test]
    fn affine_forcing_vector_componentwise() {
        let d = InterpolationData::new(
            vec![0.0, 0.5, 1.0],
            vec![vec![1.0, 2.0], vec![3.0, -1.0], vec![0.0, 4.0]],
        )
        .unwrap();
        let q = affine_forcing(&d, &[0.5, -0.25]).unwrap();
        assert_eq!(q[0].eval(0.0), vec![1.0 - 0.5, 2.0 - 1.0]);
        assert_eq!(q[0].eval(1.0), vec![3.0, -1.0 - 2.0]);
        assert_eq!(q[1].eval(0.0), vec![3.0 + 0.25, -1.0 + 0.5]);
        assert_eq!(q[1].eval(1.0), vec![0.0, 4.0 + 1.0]);
    }

    #[test]
    fn affine_forcing_rejects_alpha_one() {
        let err = affine_forcing(&tent(), &[1.0, 0.0]).unwrap_err();
        assert!(matches!(err, FifError::InvalidScaling { branch: 0, .. }));
    }

    #[test]
    fn valid_system_has_no_violations() {
        let sys = FifSystem::affine(tent(), vec![0.3, -0.4]).unwrap();
        let report = sys.validate();
        assert!(report.valid);
        assert!(report.violations.is_empty());
    }

    #[test]
    fn perturbed_endpoint_is_reported() {
        let data = tent();
        let mut q = affine_forcing(&data, &[0.3, 0.3]).unwrap();
        if let ForcingFunction::AffineEndpoints { start, .. } = &mut q[0] {
            start[0] += 1e-3;
        }
        let sys = FifSystem::new(data, vec![0.3, 0.3], q).unwrap().with_tau_end(1e-9);
        let report = sys.validate();
        assert_eq!(report.violations.len(), 1);
        match &report.violations[0] {
            Violation::EndpointMismatch {
                branch,
                endpoint,
                residual,
                ..
            } => {
                assert_eq!(*branch, 0);
                assert_eq!(*endpoint, Endpoint::First);
                assert!((residual - 1e-3).abs() < 1e-12);
            }
            v => panic!("unexpected violation {v:?}"),
        }
    }

    #[test]
    fn scaling_out_of_range_is_reported() {
        let sys = FifSystem::affine_unchecked(tent(), vec![1.2, 0.3]).unwrap();
        let report = sys.validate();
        assert!(!report.valid);
        assert_eq!(
            report.violations,
            vec![Violation::ScalingOutOfRange {
                branch: 0,
                alpha: 1.2
            }]
        );
        assert!(sys.ensure_contractive().is_err());
    }

    #[test]
    fn contraction_ratio_examples() {
        let sys = FifSystem::affine(tent(), vec![0.75, 0.75]).unwrap();
        let r = contraction_ratios(&sys);
        assert_eq!((r[0].lower, r[0].upper), (0.5, 0.75));
        assert_eq!((r[1].lower, r[1].upper), (0.5, 0.75));

        let d = InterpolationData::scalar(vec![0.0, 0.25, 1.0], vec![0.0, 1.0, 0.0]).unwrap();
        let r = contraction_ratios(&FifSystem::affine(d, vec![0.3, 0.3]).unwrap());
        assert_eq!((r[0].lower, r[0].upper), (0.25, 0.3));
        assert_eq!((r[1].lower, r[1].upper), (0.3, 0.75));

        let r = contraction_ratios(&FifSystem::affine(tent(), vec![0.0, 0.0]).unwrap());
        assert!(r.iter().all(|c| c.lower == 0.0 && c.degenerate));
    }

    #[test]
    fn corrected_forcing_meets_endpoints() {
        let data = tent();
        let nodes: Vec<f64> = (0..=64).map(|i| i as f64 / 64.0).collect();
        let q = corrected_sampled_forcing(&data, 0.4, 1, &nodes, |t| vec![(7.0 * t).sin()]).unwrap();
        let sys = FifSystem::new(
            data.clone(),
            vec![0.4, 0.4],
            vec![affine_forcing(&data, &[0.4, 0.4]).unwrap()[0].clone(), q],
        )
        .unwrap();
        assert!(sys.validate().valid);
    }

    #[test]
    fn branch_lookup() {
        let sys = FifSystem::affine(tent(), vec![0.1, 0.1]).unwrap();
        assert_eq!(sys.branch_of(0.0), 0);
        assert_eq!(sys.branch_of(0.3), 0);
        assert_eq!(sys.branch_of(0.5), 0);
        assert_eq!(sys.branch_of(0.7), 1);
        assert_eq!(sys.branch_of(1.0), 1);
    }

    #[test]
    fn weierstrass_forcing_meets_endpoints() {
        let data = InterpolationData::new(
            vec![0.0, 0.3, 1.0],
            vec![vec![0.0, 1.0], vec![1.0, 0.0], vec![0.5, 0.5]],
        )
        .unwrap();
        let shape = WeierstrassShape {
            amplitude: 0.3,
            sigma: 0.5,
            base: 2.0,
            terms: 8,
            samples: 1024,
        };
        let alphas = vec![0.2, -0.1];
        let q = weierstrass_forcings(&data, &alphas, &shape).unwrap();
        let sys = FifSystem::new(data, alphas, q).unwrap();
        assert!(sys.validate().valid);
        let bad = WeierstrassShape { base: 1.0, ..shape };
        assert!(weierstrass_forcings(sys.data(), &[0.2, 0.1], &bad).is_err());
    }
}
