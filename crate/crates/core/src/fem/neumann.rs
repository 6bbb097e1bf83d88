use crate::error::{Error, Result};
use crate::sparse::{LuFactor, SparseMatrix};

/// Solver for singular systems `S x = b` whose kernel is the constants
/// (connected mesh, Neumann conditions). Solutions are normalized to
/// `Σ w_i x_i = 0`.
pub struct NeumannSolver {
    lu: LuFactor,
    weights: Vec<f64>,
}

impl NeumannSolver {
    pub fn new(s: &SparseMatrix, weights: &[f64]) -> Result<Self> {
        let n = s.dim();
        assert_eq!(weights.len(), n);
        let mut t: Vec<(usize, usize, f64)> = s.triplets().into_iter().filter(|&(i, j, _)| i != 0 && j != 0).collect();
        t.push((0, 0, 1.0));
        Ok(Self { lu: SparseMatrix::from_triplets(n, t).lu()?, weights: weights.to_vec() })
    }

    /// Solves with `b` that must already sum to zero (relative to `Σ|b|`).
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let scale: f64 = b.iter().map(|v| v.abs()).sum();
        self.solve_checked(b, scale)
    }

    fn solve_checked(&self, b: &[f64], scale: f64) -> Result<Vec<f64>> {
        let sum: f64 = b.iter().sum();
        if sum.abs() > 1e-9 * scale.max(1e-300) {
            return Err(Error::Precondition(format!("incompatible Neumann data (sum {sum:.3e})")));
        }
        let mut rhs = b.to_vec();
        rhs[0] = 0.0;
        let mut x = self.lu.solve(&rhs)?;
        let wsum: f64 = self.weights.iter().sum();
        let mean = x.iter().zip(&self.weights).map(|(x, w)| x * w).sum::<f64>() / wsum;
        x.iter_mut().for_each(|v| *v -= mean);
        Ok(x)
    }

    /// Removes the component of `b` along `proj` (so that it sums to zero)
    /// and solves.
    pub fn solve_projected(&self, b: &[f64], proj: &[f64]) -> Result<Vec<f64>> {
        let sb: f64 = b.iter().sum();
        let sp: f64 = proj.iter().sum();
        let bb: Vec<f64> = b.iter().zip(proj).map(|(b, p)| b - sb * p / sp).collect();
        let scale: f64 = b.iter().map(|v| v.abs()).sum();
        self.solve_checked(&bb, scale)
    }
}
