use super::{assemble_operators, DimensionConstants, OperatorSet};
use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::mesh::{Mesh, ScalarField, Support};
use crate::sparse::SparseMatrix;

/// Pointwise curvature densities `(T(u), Q(u))`.
#[derive(Clone, Debug, PartialEq)]
pub struct CurvaturePair {
    pub interior: ScalarField,
    pub boundary: ScalarField,
}

impl CurvaturePair {
    pub fn new(interior: ScalarField, boundary: ScalarField) -> Result<Self> {
        if interior.support() != Support::Interior || boundary.support() != Support::Boundary {
            return Err(Error::Field("curvature pair needs interior and boundary fields".into()));
        }
        Ok(Self { interior, boundary })
    }

    pub fn from_dense(mesh: &Mesh, dense: &[f64]) -> Result<Self> {
        Ok(Self {
            interior: ScalarField::from_dense(mesh, Support::Interior, dense)?,
            boundary: ScalarField::from_dense(mesh, Support::Boundary, dense)?,
        })
    }

    pub fn constant(mesh: &Mesh, interior: f64, boundary: f64) -> Result<Self> {
        Ok(Self {
            interior: ScalarField::constant(mesh, Support::Interior, interior)?,
            boundary: ScalarField::constant(mesh, Support::Boundary, boundary)?,
        })
    }

    pub fn to_dense(&self, num_vertices: usize) -> Vec<f64> {
        let mut out = self.interior.to_dense(num_vertices);
        for (i, v) in self.boundary.iter() {
            out[i] = v;
        }
        out
    }

    /// Sup-norm distances `(interior, boundary)` to another pair.
    pub fn sup_diff(&self, other: &Self) -> (f64, f64) {
        let d = |a: &ScalarField, b: &ScalarField| {
            a.values().iter().zip(b.values()).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
        };
        (d(&self.interior, &other.interior), d(&self.boundary, &other.boundary))
    }
}

/// Row-wise discrete form of the curvature equations.
///
/// Row `i` reads `ρ_i(u) = (K u + c)_i − w_i t_i φ_i(u_i)` where `t` is the
/// target density and `φ_i` is `e^{2u}`/`e^{u}` (n = 2) or `u^a`/`u^b`
/// (n ≥ 3) on interior/boundary rows. The density map is
/// `F_i(u) = (K u + c)_i / (w_i φ_i(u_i))`.
#[derive(Clone, Debug)]
pub struct NodalSystem {
    n: usize,
    k: SparseMatrix,
    c: Vec<f64>,
    w: Vec<f64>,
    p: Vec<f64>,
    boundary_row: Vec<bool>,
    ops: OperatorSet,
}

impl NodalSystem {
    pub fn new(mesh: &Mesh, bg: &BackgroundGeometry) -> Result<Self> {
        let ops = assemble_operators(mesh, bg)?;
        let nv = mesh.num_vertices();
        let boundary_row = mesh.d0_mask().to_vec();
        let (k, c, w, p) = if bg.n() == 2 {
            let c: Vec<f64> = (0..nv).map(|i| ops.curvature_load_interior[i] + ops.curvature_load_boundary[i]).collect();
            let w = (0..nv).map(|i| if boundary_row[i] { ops.mass_boundary[i] } else { ops.mass_interior[i] }).collect();
            let p = (0..nv).map(|i| if boundary_row[i] { 1.0 } else { 2.0 }).collect();
            (ops.stiffness.clone(), c, w, p)
        } else {
            let dc = DimensionConstants::new(bg.n())?;
            let ratio = dc.alpha / dc.beta;
            let diag: Vec<f64> =
                (0..nv).map(|i| ops.curvature_load_interior[i] + ratio * ops.curvature_load_boundary[i]).collect();
            let k = ops.stiffness.scaled(dc.alpha).add_diagonal(&diag);
            let w = (0..nv).map(|i| if boundary_row[i] { ratio * ops.mass_boundary[i] } else { ops.mass_interior[i] }).collect();
            let p = (0..nv).map(|i| if boundary_row[i] { dc.b } else { dc.a }).collect();
            (k, vec![0.0; nv], w, p)
        };
        Ok(Self { n: bg.n(), k, c, w, p, boundary_row, ops })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.w.len()
    }

    /// The linear part `K` (`S` for n = 2, `αS + R/H` diagonal for n ≥ 3).
    pub fn k(&self) -> &SparseMatrix {
        &self.k
    }

    /// The constant part `c` (integrated background curvature, n = 2).
    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// Row weights `w`.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn boundary_rows(&self) -> &[bool] {
        &self.boundary_row
    }

    pub fn operators(&self) -> &OperatorSet {
        &self.ops
    }

    pub fn check_admissible(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::Field(format!("conformal factor has {} values, mesh has {}", u.len(), self.dim())));
        }
        if let Some(i) = u.iter().position(|v| !v.is_finite()) {
            return Err(Error::Field(format!("non-finite conformal factor at vertex {i}")));
        }
        if self.n >= 3 {
            if let Some(i) = u.iter().position(|&v| v <= 0.0) {
                return Err(Error::NonPositiveFactor { vertex: i, value: u[i] });
            }
        }
        Ok(())
    }

    /// `φ_i(x)`.
    pub fn phi(&self, i: usize, x: f64) -> f64 {
        if self.n == 2 {
            (self.p[i] * x).exp()
        } else {
            x.powf(self.p[i])
        }
    }

    /// `φ_i′(x) / φ_i(x)`.
    pub fn log_derivative(&self, i: usize, x: f64) -> f64 {
        if self.n == 2 {
            self.p[i]
        } else {
            self.p[i] / x
        }
    }

    /// `K u + c`.
    pub fn linear_part(&self, u: &[f64]) -> Vec<f64> {
        let mut r = self.k.mul_vec(u);
        r.iter_mut().zip(&self.c).for_each(|(r, c)| *r += c);
        r
    }

    /// Nodal densities `F(u)` on all vertices.
    pub fn density(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check_admissible(u)?;
        let lin = self.linear_part(u);
        Ok((0..self.dim()).map(|i| lin[i] / (self.w[i] * self.phi(i, u[i]))).collect())
    }

    /// `ρ(u) = K u + c − w t φ(u)`.
    pub fn residual(&self, u: &[f64], target: &[f64]) -> Vec<f64> {
        let lin = self.linear_part(u);
        (0..self.dim()).map(|i| lin[i] - self.w[i] * target[i] * self.phi(i, u[i])).collect()
    }

    /// `D = diag(w φ(u))`, the scaling between residuals and densities.
    pub fn scale(&self, u: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|i| self.w[i] * self.phi(i, u[i])).collect()
    }

    /// Symmetric matrix `C = K − diag((K u + c) φ′/φ)`; the Jacobian of the
    /// density map is `D⁻¹ C`.
    pub fn coupled(&self, u: &[f64]) -> SparseMatrix {
        let lin = self.linear_part(u);
        let d: Vec<f64> = (0..self.dim()).map(|i| -lin[i] * self.log_derivative(i, u[i])).collect();
        self.k.add_diagonal(&d)
    }

    /// Jacobian of `ρ` for a fixed target: `K − diag(w t φ′)`.
    pub fn residual_jacobian(&self, u: &[f64], target: &[f64]) -> SparseMatrix {
        let d: Vec<f64> = (0..self.dim())
            .map(|i| -self.w[i] * target[i] * self.phi(i, u[i]) * self.log_derivative(i, u[i]))
            .collect();
        self.k.add_diagonal(&d)
    }

    pub fn linearize(&self, u: &[f64]) -> Result<LinearizedOperator> {
        self.check_admissible(u)?;
        let coupled = self.coupled(u);
        let interior: Vec<bool> = self.boundary_row.iter().map(|b| !b).collect();
        Ok(LinearizedOperator {
            a: coupled.select_rows(&interior),
            b: coupled.select_rows(&self.boundary_row),
            scale: self.scale(u),
            coupled,
        })
    }
}

/// `F′(u)` in weak form: `coupled = A + B`, and `F′(u)v = scale⁻¹ · coupled · v`.
#[derive(Clone, Debug)]
pub struct LinearizedOperator {
    /// Interior rows of the coupled matrix.
    pub a: SparseMatrix,
    /// Boundary (D0) rows of the coupled matrix.
    pub b: SparseMatrix,
    pub coupled: SparseMatrix,
    pub scale: Vec<f64>,
}

impl LinearizedOperator {
    /// Wraps a bare matrix (unit scaling, all rows interior).
    pub fn from_matrix(m: SparseMatrix) -> Self {
        let n = m.dim();
        Self { b: SparseMatrix::from_triplets(n, Vec::new()), a: m.clone(), coupled: m, scale: vec![1.0; n] }
    }

    /// `F′(u) v` as nodal densities.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.coupled.mul_vec(v).iter().zip(&self.scale).map(|(x, s)| x / s).collect()
    }
}

/// `F(u) = (T(u), Q(u))` as pointwise densities.
pub fn eval_f(mesh: &Mesh, bg: &BackgroundGeometry, u: &ScalarField) -> Result<CurvaturePair> {
    let sys = NodalSystem::new(mesh, bg)?;
    let u = full_values(mesh, u)?;
    CurvaturePair::from_dense(mesh, &sys.density(&u)?)
}

pub fn assemble_linearization(mesh: &Mesh, bg: &BackgroundGeometry, u: &ScalarField) -> Result<LinearizedOperator> {
    let sys = NodalSystem::new(mesh, bg)?;
    sys.linearize(&full_values(mesh, u)?)
}

fn full_values(mesh: &Mesh, u: &ScalarField) -> Result<Vec<f64>> {
    if u.support() != Support::All {
        return Err(Error::Field("conformal factor must live on all vertices".into()));
    }
    Ok(u.to_dense(mesh.num_vertices()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn zero_factor_returns_background() {
        let m = generators::disk(5);
        let bg = BackgroundGeometry::constant(&m, 0.0, 1.0).unwrap();
        let f = eval_f(&m, &bg, &ScalarField::constant(&m, Support::All, 0.0).unwrap()).unwrap();
        assert!(f.interior.max_abs() < 1e-12);
        assert!(f.boundary.values().iter().all(|v| (v - 1.0).abs() < 1e-12));
    }

    #[test]
    fn constant_shift_on_disk() {
        let m = generators::disk(5);
        let bg = BackgroundGeometry::constant(&m, 0.0, 1.0).unwrap();
        let c = 0.7;
        let f = eval_f(&m, &bg, &ScalarField::constant(&m, Support::All, c).unwrap()).unwrap();
        assert!(f.interior.max_abs() < 1e-12);
        assert!(f.boundary.values().iter().all(|v| (v - (-c).exp()).abs() < 1e-12));
    }

    #[test]
    fn unit_factor_on_flat_cube() {
        let m = generators::cube(3);
        let bg = BackgroundGeometry::flat(&m).unwrap();
        let f = eval_f(&m, &bg, &ScalarField::constant(&m, Support::All, 1.0).unwrap()).unwrap();
        assert!(f.interior.max_abs() < 1e-12 && f.boundary.max_abs() < 1e-12);
        let sys = NodalSystem::new(&m, &bg).unwrap();
        let lin = sys.linearize(&vec![1.0; m.num_vertices()]).unwrap();
        let alpha_s = sys.operators().stiffness.scaled(8.0);
        assert!(lin.coupled.add_scaled(-1.0, &alpha_s).max_abs() < 1e-12);
    }

    #[test]
    fn neumann_laplacian_at_zero() {
        let m = generators::cylinder(12, 3, 1.0);
        let bg = BackgroundGeometry::flat(&m).unwrap();
        let sys = NodalSystem::new(&m, &bg).unwrap();
        let c = sys.coupled(&vec![0.0; m.num_vertices()]);
        assert!(c.add_scaled(-1.0, &sys.operators().stiffness).max_abs() < 1e-14);
    }

    #[test]
    fn non_positive_factor_rejected() {
        let m = generators::cube(2);
        let bg = BackgroundGeometry::flat(&m).unwrap();
        let mut u = vec![1.0; m.num_vertices()];
        u[3] = -0.5;
        let u = ScalarField::new(&m, Support::All, u).unwrap();
        assert!(matches!(eval_f(&m, &bg, &u), Err(Error::NonPositiveFactor { vertex: 3, .. })));
    }
}
