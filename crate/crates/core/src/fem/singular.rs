use faer::Mat;

use super::LinearizedOperator;
use crate::error::{Error, Result};
use crate::sparse::{dot, norm2, LuFactor, SparseMatrix};

/// Controls for [`smallest_singular_value_with`].
#[derive(Clone, Copy, Debug)]
pub struct SingularOptions {
    /// Matrices up to this size use a dense SVD.
    pub dense_limit: usize,
    pub block: usize,
    pub max_iterations: usize,
    pub tol: f64,
}

impl Default for SingularOptions {
    fn default() -> Self {
        Self { dense_limit: 700, block: 4, max_iterations: 500, tol: 1e-10 }
    }
}

/// `σ_min` of the coupled matrix.
pub fn smallest_singular_value(l: &LinearizedOperator) -> Result<f64> {
    smallest_singular_value_with(&l.coupled, SingularOptions::default()).map(|(s, _)| s)
}

/// `σ_min(A)` and a unit right singular vector.
pub fn smallest_singular_value_with(a: &SparseMatrix, opts: SingularOptions) -> Result<(f64, Vec<f64>)> {
    let n = a.dim();
    if n == 0 {
        return Err(Error::LinearSolve("empty matrix".into()));
    }
    if n <= opts.dense_limit {
        return Ok(dense_smallest(&a.to_dense()));
    }
    block_inverse_iteration(a, opts)
}

fn dense_smallest(a: &Mat<f64>) -> (f64, Vec<f64>) {
    let n = a.nrows();
    let svd = a.svd().expect("dense SVD converges");
    let s = svd.S().column_vector();
    let v = svd.V();
    let k = (0..n).min_by(|&i, &j| s[i].partial_cmp(&s[j]).expect("finite singular values")).expect("n > 0");
    (s[k], (0..n).map(|i| v[(i, k)]).collect())
}

struct Solver {
    lu: LuFactor,
    lu_t: LuFactor,
}

impl Solver {
    fn new(a: &SparseMatrix) -> Result<Self> {
        let t = a.triplets().into_iter().map(|(i, j, v)| (j, i, v)).collect();
        Ok(Self { lu: a.lu()?, lu_t: SparseMatrix::from_triplets(a.dim(), t).lu()? })
    }

    /// `(AᵀA)⁻¹ x`.
    fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        let y = self.lu_t.solve(x)?;
        self.lu.solve(&y)
    }
}

fn block_inverse_iteration(a: &SparseMatrix, opts: SingularOptions) -> Result<(f64, Vec<f64>)> {
    let n = a.dim();
    let solver = match Solver::new(a).and_then(|s| s.apply(&vec![1.0; n]).map(|_| s)) {
        Ok(s) => s,
        Err(_) => {
            let eps = 1e-12 * a.norm_inf().max(1e-300);
            Solver::new(&a.add_diagonal(&vec![eps; n]))?
        }
    };
    let k = opts.block.min(n);
    let mut x: Vec<Vec<f64>> = (0..k)
        .map(|j| (0..n).map(|i| ((i * (j + 1) * 7919 + j * 104729) % 1000) as f64 / 1000.0 - 0.5 + if j == 0 { 1.0 } else { 0.0 }).collect())
        .collect();
    orthonormalize(&mut x);
    let mut last = f64::NAN;
    for _ in 0..opts.max_iterations {
        let y: Vec<Vec<f64>> = match x.iter().map(|v| solver.apply(v)).collect::<Result<_>>() {
            Ok(y) => y,
            Err(_) => return Ok((0.0, x[0].clone())),
        };
        // Ritz values of (AᵀA)⁻¹ on span(x).
        let h = Mat::from_fn(k, k, |i, j| 0.5 * (dot(&x[i], &y[j]) + dot(&x[j], &y[i])));
        let eig = h.self_adjoint_eigen(faer::Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let mu = eig.S().column_vector()[k - 1];
        let est = if mu > 0.0 { 1.0 / mu.sqrt() } else { 0.0 };
        let u = eig.U();
        let lead: Vec<f64> = (0..n).map(|i| (0..k).map(|j| u[(j, k - 1)] * x[j][i]).sum()).collect();
        if !est.is_finite() || est == 0.0 {
            return Ok((0.0, lead));
        }
        if (est - last).abs() <= opts.tol * est {
            let nrm = norm2(&lead);
            return Ok((est, lead.iter().map(|v| v / nrm).collect()));
        }
        last = est;
        x = y;
        orthonormalize(&mut x);
    }
    Err(Error::NoConvergence { what: "smallest singular value".into(), iterations: opts.max_iterations })
}

fn orthonormalize(x: &mut [Vec<f64>]) {
    for j in 0..x.len() {
        for _ in 0..2 {
            for i in 0..j {
                let d = dot(&x[i], &x[j]);
                let xi = x[i].clone();
                x[j].iter_mut().zip(&xi).for_each(|(a, b)| *a -= d * b);
            }
        }
        let nrm = norm2(&x[j]);
        if nrm > 0.0 {
            x[j].iter_mut().for_each(|v| *v /= nrm);
        }
    }
}
