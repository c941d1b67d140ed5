use std::io::Write;

use serde::{Deserialize, Serialize};

use super::forcing::locate;
use crate::error::{FifError, Result};

/// Raised when the fixed-point iteration stops at `max_iter` with the
/// a-posteriori bound still above the requested tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceWarning {
    pub iterations: usize,
    pub residual: f64,
    pub tol: f64,
}

/// A vector function sampled on a sorted grid, read as its piecewise-linear
/// interpolant between samples.
#[derive(Debug, Clone, PartialEq)]
pub struct GraphSample {
    grid: Vec<f64>,
    values: Vec<f64>,
    dim: usize,
    /// Fixed-point iterations spent producing the sample (0 when not rendered).
    pub iterations: usize,
    /// A-posteriori sup-norm bound on the distance to the fixed point.
    pub residual: f64,
    /// Sup-norm size of every iteration step, in order.
    pub step_history: Vec<f64>,
    pub warning: Option<ConvergenceWarning>,
}

impl GraphSample {
    /// `values` is row-major, `dim` entries per grid point.
    pub fn new(grid: Vec<f64>, values: Vec<f64>, dim: usize) -> Result<Self> {
        if grid.len() < 2 {
            return Err(FifError::InvalidData("a sample needs at least two grid points".into()));
        }
        if dim == 0 || values.len() != grid.len() * dim {
            return Err(FifError::DimensionMismatch {
                expected: grid.len() * dim.max(1),
                got: values.len(),
            });
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(FifError::InvalidData("grid must be strictly increasing".into()));
        }
        Ok(Self {
            grid,
            values,
            dim,
            iterations: 0,
            residual: 0.0,
            step_history: Vec::new(),
            warning: None,
        })
    }

    pub fn from_fn<F>(grid: Vec<f64>, dim: usize, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Vec<f64>,
    {
        let mut values = Vec::with_capacity(grid.len() * dim);
        for &t in &grid {
            let v = f(t);
            if v.len() != dim {
                return Err(FifError::DimensionMismatch {
                    expected: dim,
                    got: v.len(),
                });
            }
            values.extend(v);
        }
        Self::new(grid, values, dim)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn value(&self, j: usize) -> &[f64] {
        &self.values[j * self.dim..(j + 1) * self.dim]
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.grid[0], self.grid[self.grid.len() - 1])
    }

    pub fn max_spacing(&self) -> f64 {
        self.grid.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn component(&self, i: usize) -> Vec<f64> {
        self.values.iter().skip(i).step_by(self.dim).copied().collect()
    }

    /// The `i`-th coordinate as a scalar sample on the same grid.
    pub fn component_sample(&self, i: usize) -> GraphSample {
        GraphSample {
            grid: self.grid.clone(),
            values: self.component(i),
            dim: 1,
            iterations: self.iterations,
            residual: self.residual,
            step_history: Vec::new(),
            warning: self.warning,
        }
    }

    /// Piecewise-linear evaluation; clamped outside the grid.
    pub fn eval_into(&self, t: f64, out: &mut [f64]) {
        let (j, w) = locate(&self.grid, t);
        let a = self.value(j);
        let b = self.value(j + 1);
        for ((o, &x), &y) in out.iter_mut().zip(a).zip(b) {
            *o = x + w * (y - x);
        }
    }

    pub fn eval(&self, t: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(t, &mut out);
        out
    }

    /// Sup over grid points of the Euclidean distance between two samples
    /// on the same grid.
    pub fn sup_distance(&self, other: &GraphSample) -> Result<f64> {
        if self.grid != other.grid || self.dim != other.dim {
            return Err(FifError::GridMismatch("samples live on different grids".into()));
        }
        Ok(sup_distance(&self.values, &other.values, self.dim))
    }

    /// Largest Euclidean jump between neighbouring samples.
    pub fn max_jump(&self) -> f64 {
        (0..self.len() - 1)
            .map(|j| dist(self.value(j), self.value(j + 1)))
            .fold(0.0, f64::max)
    }

    /// CSV with header `t,<prefix>_1,...,<prefix>_M`.
    pub fn write_csv<W: Write>(&self, mut w: W, prefix: &str) -> std::io::Result<()> {
        let mut header = String::from("t");
        for i in 1..=self.dim {
            header.push_str(&format!(",{prefix}_{i}"));
        }
        writeln!(w, "{header}")?;
        for (j, t) in self.grid.iter().enumerate() {
            write!(w, "{}", t + 0.0)?;
            for v in self.value(j) {
                write!(w, ",{}", v + 0.0)?;
            }
            writeln!(w)?;
        }
        Ok(())
    }

    pub fn to_csv(&self, prefix: &str) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf, prefix).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("CSV output is ASCII")
    }
}

pub(crate) fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub(crate) fn sup_distance(a: &[f64], b: &[f64], dim: usize) -> f64 {
    a.chunks_exact(dim)
        .zip(b.chunks_exact(dim))
        .map(|(x, y)| dist(x, y))
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_linearly() {
        let g = GraphSample::from_fn(vec![0.0, 0.5, 1.0], 2, |t| vec![t, 2.0 * t * t]).unwrap();
        assert_eq!(g.eval(0.25), vec![0.25, 0.25]);
        assert_eq!(g.eval(0.5), vec![0.5, 0.5]);
        assert_eq!(g.component(1), vec![0.0, 0.5, 2.0]);
    }

    #[test]
    fn csv_layout() {
        let g = GraphSample::from_fn(vec![0.0, 1.0], 2, |t| vec![t, -t]).unwrap();
        assert_eq!(g.to_csv("h"), "t,h_1,h_2\n0,0,0\n1,1,-1\n");
    }

    #[test]
    fn rejects_unsorted_grid() {
        assert!(GraphSample::new(vec![0.0, 0.0], vec![0.0, 0.0], 1).is_err());
        assert!(GraphSample::new(vec![0.0, 1.0], vec![0.0], 1).is_err());
    }

    #[test]
    fn grid_mismatch_is_an_error() {
        let a = GraphSample::from_fn(vec![0.0, 1.0], 1, |t| vec![t]).unwrap();
        let b = GraphSample::from_fn(vec![0.0, 0.5, 1.0], 1, |t| vec![t]).unwrap();
        assert!(a.sup_distance(&b).is_err());
        assert_eq!(a.sup_distance(&a).unwrap(), 0.0);
    }
}
