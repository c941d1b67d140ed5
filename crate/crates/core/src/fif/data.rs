use crate::error::{FifError, Result};

/// Interpolation knots `x_1 < … < x_N` with an `M`-vector attached to each.
#[derive(Debug, Clone, PartialEq)]
pub struct InterpolationData {
    knots: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl InterpolationData {
    pub fn new(knots: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if knots.len() < 3 {
            return Err(FifError::InvalidData(format!(
                "need at least 3 knots, got {}",
                knots.len()
            )));
        }
        if values.len() != knots.len() {
            return Err(FifError::InvalidData(format!(
                "{} knots but {} value vectors",
                knots.len(),
                values.len()
            )));
        }
        if knots.iter().any(|x| !x.is_finite()) {
            return Err(FifError::InvalidData("non-finite knot".into()));
        }
        if let Some(i) = knots.windows(2).position(|w| w[1] <= w[0]) {
            return Err(FifError::InvalidData(format!(
                "knots must be strictly increasing (x[{}] = {} >= x[{}] = {})",
                i,
                knots[i],
                i + 1,
                knots[i + 1]
            )));
        }
        let m = values[0].len();
        if m == 0 {
            return Err(FifError::InvalidData("value vectors must be non-empty".into()));
        }
        for (i, v) in values.iter().enumerate() {
            if v.len() != m {
                return Err(FifError::InvalidData(format!(
                    "value {} has length {}, expected {}",
                    i,
                    v.len(),
                    m
                )));
            }
            if v.iter().any(|y| !y.is_finite()) {
                return Err(FifError::InvalidData(format!("value {i} is not finite")));
            }
        }
        Ok(Self { knots, values })
    }

    /// Scalar data, `M = 1`.
    pub fn scalar(knots: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::new(knots, values.into_iter().map(|y| vec![y]).collect())
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn knot(&self, i: usize) -> f64 {
        self.knots[i]
    }

    pub fn value(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    /// Number of knots `N`.
    pub fn len(&self) -> usize {
        self.knots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.knots.is_empty()
    }

    /// Codomain dimension `M`.
    pub fn dim(&self) -> usize {
        self.values[0].len()
    }

    pub fn branch_count(&self) -> usize {
        self.knots.len() - 1
    }

    /// `J = [x_1, x_N]`.
    pub fn interval(&self) -> (f64, f64) {
        (self.knots[0], self.knots[self.knots.len() - 1])
    }

    pub fn width(&self) -> f64 {
        let (lo, hi) = self.interval();
        hi - lo
    }

    pub fn first_value(&self) -> &[f64] {
        &self.values[0]
    }

    pub fn last_value(&self) -> &[f64] {
        &self.values[self.values.len() - 1]
    }
}
