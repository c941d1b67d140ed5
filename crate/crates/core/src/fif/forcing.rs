//! Forcing functions `q_k : J -> R^M`.

use crate::error::{FifError, Result};

/// Piecewise-linear samples of a vector function on sorted nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledGrid {
    nodes: Vec<f64>,
    values: Vec<f64>,
    dim: usize,
}

impl SampledGrid {
    /// `values` is row-major: one `dim`-vector per node.
    pub fn new(nodes: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if nodes.len() < 2 {
            return Err(FifError::InvalidData("sampled forcing needs at least 2 nodes".into()));
        }
        if dim == 0 || values.len() != nodes.len() * dim {
            return Err(FifError::DimensionMismatch {
                expected: nodes.len() * dim.max(1),
                got: values.len(),
            });
        }
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(FifError::InvalidData(
                "sampled forcing nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self { nodes, values, dim })
    }

    /// Uniform nodes on `[lo, hi]`, one row of `samples` per node.
    pub fn uniform(lo: f64, hi: f64, samples: Vec<Vec<f64>>) -> Result<Self> {
        let n = samples.len();
        if n < 2 {
            return Err(FifError::InvalidData("sampled forcing needs at least 2 nodes".into()));
        }
        let dim = samples[0].len();
        if samples.iter().any(|s| s.len() != dim) {
            return Err(FifError::InvalidData("ragged forcing samples".into()));
        }
        let nodes = (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect();
        Self::new(nodes, samples.concat(), dim)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let (j, w) = locate(&self.nodes, t);
        let a = self.row(j);
        let b = self.row(j + 1);
        for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
            *o = x + w * (y - x);
        }
    }
}

/// Cell index `j` and weight `w` so that `t ≈ (1-w)·nodes[j] + w·nodes[j+1]`.
/// Points outside the node range are clamped.
pub(crate) fn locate(nodes: &[f64], t: f64) -> (usize, f64) {
    let n = nodes.len();
    debug_assert!(n >= 2);
    if t <= nodes[0] {
        return (0, 0.0);
    }
    if t >= nodes[n - 1] {
        return (n - 2, 1.0);
    }
    let j = nodes.partition_point(|&x| x <= t) - 1;
    let j = j.min(n - 2);
    let w = (t - nodes[j]) / (nodes[j + 1] - nodes[j]);
    (j, w)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ForcingFunction {
    /// The vector-affine map through `(x_start, start)` and `(x_end, end)`.
    AffineEndpoints {
        x_start: f64,
        x_end: f64,
        start: Vec<f64>,
        end: Vec<f64>,
    },
    /// One polynomial per component, coefficients in ascending powers of `t`.
    Polynomial { coefficients: Vec<Vec<f64>> },
    SampledGrid(SampledGrid),
}

impl ForcingFunction {
    pub fn affine(x_start: f64, x_end: f64, start: Vec<f64>, end: Vec<f64>) -> Result<Self> {
        if start.len() != end.len() {
            return Err(FifError::DimensionMismatch {
                expected: start.len(),
                got: end.len(),
            });
        }
        if x_end <= x_start {
            return Err(FifError::InvalidData("affine forcing needs x_start < x_end".into()));
        }
        Ok(Self::AffineEndpoints {
            x_start,
            x_end,
            start,
            end,
        })
    }

    pub fn polynomial(coefficients: Vec<Vec<f64>>) -> Result<Self> {
        if coefficients.is_empty() || coefficients.iter().any(|c| c.is_empty()) {
            return Err(FifError::InvalidData(
                "polynomial forcing needs a non-empty coefficient list per component".into(),
            ));
        }
        Ok(Self::Polynomial { coefficients })
    }

    pub fn dim(&self) -> usize {
        match self {
            Self::AffineEndpoints { start, .. } => start.len(),
            Self::Polynomial { coefficients } => coefficients.len(),
            Self::SampledGrid(g) => g.dim(),
        }
    }

    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        match self {
            Self::AffineEndpoints {
                x_start,
                x_end,
                start,
                end,
            } => {
                let w = (t - x_start) / (x_end - x_start);
                for ((o, &a), &b) in out.iter_mut().zip(start).zip(end) {
                    *o = a + w * (b - a);
                }
            }
            Self::Polynomial { coefficients } => {
                for (o, c) in out.iter_mut().zip(coefficients) {
                    *o = c.iter().rev().fold(0.0, |acc, &ci| acc * t + ci);
                }
            }
            Self::SampledGrid(g) => g.eval_into(t, out),
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim()];
        self.eval_into(t, &mut out);
        out
    }
}
