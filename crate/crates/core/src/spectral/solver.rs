//! Lowest eigenpairs of `K φ = λ M φ` with `K` sparse symmetric and `M`
//! diagonal, nonnegative and possibly singular (Steklov-type pencils).

use faer::Mat;

use crate::error::{Error, Result};
use crate::sparse::{dot, weighted_dot, SparseMatrix};

#[derive(Clone, Copy, Debug)]
pub struct EigenOptions {
    /// Use the dense path when fewer than this many rows carry mass.
    pub dense_limit: usize,
    pub max_iterations: usize,
    pub tol: f64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        Self { dense_limit: 2000, max_iterations: 400, tol: 1e-11 }
    }
}

/// Eigenvalue with its full-length eigenvector, normalized to `φᵀMφ = 1`.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub value: f64,
    pub vector: Vec<f64>,
}

/// The `count` smallest eigenpairs, ascending.
pub fn lowest_eigenpairs(k: &SparseMatrix, mass: &[f64], count: usize, opts: EigenOptions) -> Result<Vec<EigenPair>> {
    let n = k.dim();
    assert_eq!(mass.len(), n);
    if mass.iter().any(|&m| m < 0.0 || !m.is_finite()) {
        return Err(Error::Eigen("mass must be finite and nonnegative".into()));
    }
    let p: Vec<usize> = (0..n).filter(|&i| mass[i] > 0.0).collect();
    if p.len() < count.max(1) {
        return Err(Error::Eigen(format!("only {} rows carry mass", p.len())));
    }
    let mut pairs = if p.len() < opts.dense_limit { dense(k, mass, &p, count)? } else { sparse(k, mass, count, opts)? };
    for pair in &mut pairs {
        let nrm = weighted_dot(mass, &pair.vector, &pair.vector).sqrt();
        let s: f64 = pair.vector.iter().zip(mass).map(|(v, m)| v * m).sum::<f64>()
            + 1e-3 * pair.vector.iter().sum::<f64>() / n as f64;
        let sign = if s < 0.0 { -1.0 } else { 1.0 };
        pair.vector.iter_mut().for_each(|v| *v *= sign / nrm);
    }
    Ok(pairs)
}

/// Checks that a first eigenvector is positive up to `1e-10·max`.
pub fn check_positive(v: &[f64]) -> Result<()> {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    if min < -1e-10 * max {
        return Err(Error::Eigen(format!("first eigenfunction changes sign (min {min:.3e}, max {max:.3e})")));
    }
    Ok(())
}

fn dense(k: &SparseMatrix, mass: &[f64], p: &[usize], count: usize) -> Result<Vec<EigenPair>> {
    let n = k.dim();
    let z: Vec<usize> = (0..n).filter(|&i| mass[i] <= 0.0).collect();
    let mut schur = k.block_dense(p, p);
    let kzz = if z.is_empty() { None } else { Some(k.principal(&z).lu()?) };
    if let Some(lu) = &kzz {
        for (col, &pj) in p.iter().enumerate() {
            let rhs: Vec<f64> = z.iter().map(|&zi| k.get(zi, pj)).collect();
            if rhs.iter().all(|v| *v == 0.0) {
                continue;
            }
            let x = lu.solve(&rhs)?;
            let mut full = vec![0.0; n];
            for (t, &zi) in z.iter().enumerate() {
                full[zi] = x[t];
            }
            let kx = k.mul_vec(&full);
            for (row, &pi) in p.iter().enumerate() {
                schur[(row, col)] -= kx[pi];
            }
        }
    }
    let m: Vec<f64> = p.iter().map(|&i| mass[i].sqrt().recip()).collect();
    let np = p.len();
    let a = Mat::from_fn(np, np, |i, j| 0.5 * (schur[(i, j)] + schur[(j, i)]) * m[i] * m[j]);
    let eig = a.self_adjoint_eigen(faer::Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = eig.S().column_vector();
    let u = eig.U();
    let mut out = Vec::with_capacity(count);
    for c in 0..count {
        let mut v = vec![0.0; n];
        for (row, &pi) in p.iter().enumerate() {
            v[pi] = u[(row, c)] * m[row];
        }
        if let Some(lu) = &kzz {
            let kv = k.mul_vec(&v);
            let rhs: Vec<f64> = z.iter().map(|&zi| -kv[zi]).collect();
            let x = lu.solve(&rhs)?;
            for (t, &zi) in z.iter().enumerate() {
                v[zi] = x[t];
            }
        }
        out.push(EigenPair { value: s[c], vector: v });
    }
    Ok(out)
}

fn m_orthonormalize(x: &mut [Vec<f64>], mass: &[f64]) {
    for j in 0..x.len() {
        for _ in 0..2 {
            for i in 0..j {
                let d = weighted_dot(mass, &x[i], &x[j]);
                let xi = x[i].clone();
                x[j].iter_mut().zip(&xi).for_each(|(a, b)| *a -= d * b);
            }
        }
        let nrm = weighted_dot(mass, &x[j], &x[j]).sqrt();
        if nrm > 0.0 {
            x[j].iter_mut().for_each(|v| *v /= nrm);
        }
    }
}

fn sparse(k: &SparseMatrix, mass: &[f64], count: usize, opts: EigenOptions) -> Result<Vec<EigenPair>> {
    let n = k.dim();
    let ones = vec![1.0; n];
    let theta_c = dot(&ones, &k.mul_vec(&ones)) / mass.iter().sum::<f64>();
    let mut shift = theta_c - theta_c.abs().max(1.0);
    let block = (count + 2).min(n);
    for _attempt in 0..6 {
        match shift_invert(k, mass, shift, block, opts) {
            Ok(mut pairs) if pairs[0].value > shift => {
                pairs.truncate(count);
                if count > 1 || check_positive_signed(&pairs[0].vector) {
                    return Ok(pairs);
                }
                shift = pairs[0].value - 2.0 * pairs[0].value.abs().max(1.0);
            }
            Ok(pairs) => shift = pairs[0].value - pairs[0].value.abs().max(1.0),
            Err(Error::LinearSolve(_)) => shift -= shift.abs().max(1.0) * 0.37,
            Err(e) => return Err(e),
        }
    }
    Err(Error::NoConvergence { what: "shift-invert eigensolver".into(), iterations: opts.max_iterations })
}

fn check_positive_signed(v: &[f64]) -> bool {
    let s: f64 = v.iter().sum();
    let w: Vec<f64> = v.iter().map(|x| if s < 0.0 { -x } else { *x }).collect();
    check_positive(&w).is_ok()
}

fn shift_invert(k: &SparseMatrix, mass: &[f64], shift: f64, block: usize, opts: EigenOptions) -> Result<Vec<EigenPair>> {
    let n = k.dim();
    let mut shift = shift;
    let mut lu = k.add_diagonal(&mass.iter().map(|m| -shift * m).collect::<Vec<_>>()).lu()?;
    let mut x: Vec<Vec<f64>> = (0..block)
        .map(|j| {
            (0..n)
                .map(|i| if j == 0 { 1.0 } else { ((i * (2 * j + 1) * 2654435761usize) % 1009) as f64 / 1009.0 - 0.5 })
                .collect()
        })
        .collect();
    m_orthonormalize(&mut x, mass);
    let mut last = vec![f64::NAN; block];
    for it in 0..opts.max_iterations {
        let mut y: Vec<Vec<f64>> = x
            .iter()
            .map(|v| lu.solve(&v.iter().zip(mass).map(|(a, m)| a * m).collect::<Vec<_>>()))
            .collect::<Result<_>>()?;
        m_orthonormalize(&mut y, mass);
        let ky: Vec<Vec<f64>> = y.iter().map(|v| k.mul_vec(v)).collect();
        let h = Mat::from_fn(block, block, |i, j| 0.5 * (dot(&y[i], &ky[j]) + dot(&y[j], &ky[i])));
        let eig = h.self_adjoint_eigen(faer::Side::Lower).map_err(|e| Error::Eigen(format!("{e:?}")))?;
        let theta: Vec<f64> = (0..block).map(|i| eig.S().column_vector()[i]).collect();
        let u = eig.U();
        x = (0..block).map(|c| (0..n).map(|i| (0..block).map(|j| u[(j, c)] * y[j][i]).sum()).collect()).collect();
        let scale = theta.iter().fold(1.0f64, |m, t| m.max(t.abs()));
        let done = (0..block.min(2)).all(|c| (theta[c] - last[c]).abs() <= opts.tol * scale);
        if done {
            return Ok(x.into_iter().zip(theta).map(|(vector, value)| EigenPair { value, vector }).collect());
        }
        last = theta.clone();
        if it % 10 == 9 && block > 1 {
            let s = theta[0] - 0.1 * (theta[1] - theta[0]);
            if s > shift {
                if let Ok(f) = k.add_diagonal(&mass.iter().map(|m| -s * m).collect::<Vec<_>>()).lu() {
                    lu = f;
                    shift = s;
                }
            }
        }
    }
    Err(Error::NoConvergence { what: "shift-invert eigensolver".into(), iterations: opts.max_iterations })
}
