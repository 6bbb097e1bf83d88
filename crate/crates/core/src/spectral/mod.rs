//! Lowest eigenvalues of the conformal operator pairs and the mixed-boundary
//! domain problems, plus the sign classifier.

mod solver;

pub use solver::{check_positive, lowest_eigenpairs, EigenOptions, EigenPair};

use serde::{Deserialize, Serialize};

use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::{assemble_operators, NodalSystem};
use crate::mesh::{Mesh, ScalarField, Support};
use crate::sparse::SparseMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenKind {
    #[serde(rename = "lambda1_Lg")]
    Lambda1Lg,
    #[serde(rename = "sigma1_Bg")]
    Sigma1Bg,
    Mu1Domain,
    Sigma1Domain,
    #[serde(rename = "robin_mR")]
    RobinMR,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum SignClass {
    Neg,
    Zero,
    Pos,
}

/// ZERO iff `|value| ≤ tol`.
pub fn classify_sign(value: f64, tol: f64) -> SignClass {
    debug_assert!(tol > 0.0);
    if value.abs() <= tol {
        SignClass::Zero
    } else if value > 0.0 {
        SignClass::Pos
    } else {
        SignClass::Neg
    }
}

/// `max(1e-8, 10 h² s)` with `h` the longest edge and `s` a sup-norm of the data.
pub fn default_tolerance(mesh: &Mesh, data_sup: f64) -> f64 {
    let h = mesh.mesh_size();
    (10.0 * h * h * data_sup).max(1e-8)
}

#[derive(Clone, Debug)]
pub struct EigenResult {
    pub kind: EigenKind,
    pub value: f64,
    /// Unit mass-weighted norm, positive.
    pub eigenfunction: ScalarField,
    pub sign_class: SignClass,
    pub tolerance: f64,
}

impl EigenResult {
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tolerance = tol;
        self.sign_class = classify_sign(self.value, tol);
        self
    }
}

fn first_pair(mesh: &Mesh, kind: EigenKind, k: &SparseMatrix, mass: &[f64], tol: f64) -> Result<EigenResult> {
    let pair = lowest_eigenpairs(k, mass, 1, EigenOptions::default())?.remove(0);
    check_positive(&pair.vector)?;
    Ok(EigenResult {
        kind,
        value: pair.value,
        eigenfunction: ScalarField::new(mesh, Support::All, pair.vector)?,
        sign_class: classify_sign(pair.value, tol),
        tolerance: tol,
    })
}

fn require_n3(bg: &BackgroundGeometry, what: &str) -> Result<()> {
    if bg.n() < 3 {
        return Err(Error::Dimension(format!("{what} needs n >= 3")));
    }
    Ok(())
}

/// Pencil of the interior eigenproblem: `(K, w on interior rows)`.
pub fn lambda1_pencil(mesh: &Mesh, bg: &BackgroundGeometry) -> Result<(SparseMatrix, Vec<f64>)> {
    require_n3(bg, "lambda1")?;
    let sys = NodalSystem::new(mesh, bg)?;
    Ok((sys.k().clone(), sys.operators().mass_interior.clone()))
}

/// Pencil of the boundary eigenproblem. For `n = 2` this is the analogue
/// with `𝓑 = ∂/∂ν + κ_g` and a harmonic interior.
pub fn sigma1_pencil(mesh: &Mesh, bg: &BackgroundGeometry) -> Result<(SparseMatrix, Vec<f64>)> {
    let sys = NodalSystem::new(mesh, bg)?;
    let ops = sys.operators();
    if bg.n() == 2 {
        let k = ops.stiffness.add_diagonal(&ops.curvature_load_boundary);
        return Ok((k, ops.mass_boundary.clone()));
    }
    let mass = (0..sys.dim()).map(|i| if sys.boundary_rows()[i] { sys.weights()[i] } else { 0.0 }).collect();
    Ok((sys.k().clone(), mass))
}

/// `λ₁(𝓛_g)`.
pub fn lambda1(mesh: &Mesh, bg: &BackgroundGeometry) -> Result<EigenResult> {
    let (k, m) = lambda1_pencil(mesh, bg)?;
    first_pair(mesh, EigenKind::Lambda1Lg, &k, &m, default_tolerance(mesh, bg.sup_norm()))
}

/// `σ₁(𝓑_g)`.
pub fn sigma1(mesh: &Mesh, bg: &BackgroundGeometry) -> Result<EigenResult> {
    let (k, m) = sigma1_pencil(mesh, bg)?;
    if m.iter().all(|&x| x == 0.0) {
        return Err(Error::Precondition("sigma1 needs a nonempty D0 boundary".into()));
    }
    first_pair(mesh, EigenKind::Sigma1Bg, &k, &m, default_tolerance(mesh, bg.sup_norm()))
}

/// Lowest eigenvalue of `Δu = 0` with `∂u/∂η + h u = λ u` on D0 and a
/// natural condition on DM.
pub fn sigma1_domain(mesh: &Mesh, h: &ScalarField) -> Result<EigenResult> {
    if h.support() != Support::Boundary {
        return Err(Error::Field("h must live on D0 vertices".into()));
    }
    if h.is_empty() {
        return Err(Error::Precondition("sigma1_domain needs a nonempty D0 boundary".into()));
    }
    let bg = BackgroundGeometry::flat(mesh)?;
    let ops = assemble_operators(mesh, &bg)?;
    let hd = h.to_dense(mesh.num_vertices());
    let d: Vec<f64> = ops.mass_boundary.iter().zip(&hd).map(|(l, h)| l * h).collect();
    let k = ops.stiffness.add_diagonal(&d);
    first_pair(mesh, EigenKind::Sigma1Domain, &k, &ops.mass_boundary, default_tolerance(mesh, h.max_abs()))
}

/// Pencil of `−Δ + f`: interior rows carry `S + V f` against `V`, D0 rows
/// carry the natural condition `(Sφ)_i = 0`.
pub fn mu1_pencil(mesh: &Mesh, f: &ScalarField) -> Result<(SparseMatrix, Vec<f64>)> {
    if f.support() != Support::All {
        return Err(Error::Field("potential must live on all vertices".into()));
    }
    let bg = BackgroundGeometry::flat(mesh)?;
    let ops = assemble_operators(mesh, &bg)?;
    let d: Vec<f64> = ops.mass_interior.iter().zip(f.values()).map(|(m, f)| m * f).collect();
    Ok((ops.stiffness.add_diagonal(&d), ops.mass_interior.clone()))
}

pub fn mu1_domain(mesh: &Mesh, f: &ScalarField) -> Result<EigenResult> {
    let (k, m) = mu1_pencil(mesh, f)?;
    first_pair(mesh, EigenKind::Mu1Domain, &k, &m, default_tolerance(mesh, f.max_abs()))
}

/// `Δv + mRv + λ v = 0` with natural boundary conditions, i.e. the lowest
/// eigenvalue of `−Δ − mR`.
pub fn robin_mr(mesh: &Mesh, r: &ScalarField, m: f64) -> Result<EigenResult> {
    let f = r.map(|x| -m * x);
    let mut res = mu1_domain(mesh, &f)?;
    res.kind = EigenKind::RobinMR;
    Ok(res)
}

/// Rayleigh quotient `tᵀKt / tᵀMt`.
pub fn rayleigh_quotient(k: &SparseMatrix, mass: &[f64], t: &[f64]) -> f64 {
    k.bilinear(t, t) / crate::sparse::weighted_dot(mass, t, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn classify() {
        assert_eq!(classify_sign(1e-12, 1e-8), SignClass::Zero);
        assert_eq!(classify_sign(0.5, 1e-8), SignClass::Pos);
        assert_eq!(classify_sign(-0.3, 1e-8), SignClass::Neg);
    }

    #[test]
    fn flat_cube_is_zero_case() {
        let m = generators::cube(3);
        let bg = BackgroundGeometry::flat(&m).unwrap();
        let l = lambda1(&m, &bg).unwrap();
        let s = sigma1(&m, &bg).unwrap();
        assert_eq!(l.sign_class, SignClass::Zero);
        assert_eq!(s.sign_class, SignClass::Zero);
        let v = l.eigenfunction.values();
        assert!(v.iter().all(|x| (x - v[0]).abs() < 1e-8));
    }

    #[test]
    fn constant_potentials() {
        let m = generators::disk(4);
        let one = ScalarField::constant(&m, Support::All, 1.0).unwrap();
        assert!((mu1_domain(&m, &one).unwrap().value - 1.0).abs() < 1e-10);
        let zero = ScalarField::constant(&m, Support::All, 0.0).unwrap();
        assert!(mu1_domain(&m, &zero).unwrap().value.abs() < 1e-10);
        let c = ScalarField::constant(&m, Support::Boundary, 0.3).unwrap();
        assert!((sigma1_domain(&m, &c).unwrap().value - 0.3).abs() < 1e-10);
    }

    #[test]
    fn disk_steklov_analogue() {
        let m = generators::disk(6);
        let bg = BackgroundGeometry::constant(&m, 0.0, 1.0).unwrap();
        let s = sigma1(&m, &bg).unwrap();
        assert!((s.value - 1.0).abs() < 1e-10);
        assert_eq!(s.sign_class, SignClass::Pos);
    }
}
