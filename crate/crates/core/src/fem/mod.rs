//! Finite-element operators: stiffness, lumped masses, curvature loads, the
//! nodal curvature maps `F = (T, Q)` and their linearizations.
//!
//! Row convention: vertices of D0 facets carry the boundary equation, every
//! other vertex carries the interior equation.

mod neumann;
mod nodal;
mod singular;

pub use neumann::NeumannSolver;
pub use nodal::{eval_f, assemble_linearization, CurvaturePair, LinearizedOperator, NodalSystem};
pub use singular::{smallest_singular_value, smallest_singular_value_with, SingularOptions};

use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::mesh::{BoundaryTag, Mesh};
use crate::sparse::SparseMatrix;

/// Exponents and constants of the conformal Laplacian in dimension `n ≥ 3`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DimensionConstants {
    pub n: usize,
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub alpha: f64,
    pub c_n: f64,
}

impl DimensionConstants {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::Dimension(format!("conformal Laplacian constants need n >= 3, got {n}")));
        }
        let nf = n as f64;
        let beta = 2.0 / (nf - 2.0);
        Ok(Self {
            n,
            a: (nf + 2.0) / (nf - 2.0),
            b: nf / (nf - 2.0),
            beta,
            alpha: 2.0 * (nf - 1.0) * beta,
            c_n: (nf - 2.0) / (4.0 * (nf - 1.0)),
        })
    }
}

/// Assembled linear pieces on a mesh and background.
#[derive(Clone, Debug)]
pub struct OperatorSet {
    /// P1 stiffness `∫∇φ_i·∇φ_j` from the edge lengths.
    pub stiffness: SparseMatrix,
    /// Lumped vertex measure on all vertices.
    pub vertex_mass: Vec<f64>,
    /// `vertex_mass` restricted to interior rows (zero on D0 vertices).
    pub mass_interior: Vec<f64>,
    /// Lumped D0 boundary measure (zero off D0).
    pub mass_boundary: Vec<f64>,
    /// `∫ K_g φ_i` (or `R_g`) on interior rows.
    pub curvature_load_interior: Vec<f64>,
    /// `∫ κ_g φ_i` (or `H_g`) on D0 rows.
    pub curvature_load_boundary: Vec<f64>,
    /// Edges whose total cotangent weight is negative (non-Delaunay).
    pub negative_weights: usize,
}

impl OperatorSet {
    pub fn warnings(&self) -> Vec<String> {
        if self.negative_weights > 0 {
            vec![format!("{} edges carry negative cotangent weights", self.negative_weights)]
        } else {
            Vec::new()
        }
    }
}

/// P1 stiffness matrix and the number of negative edge weights.
pub fn stiffness_matrix(mesh: &Mesh) -> Result<(SparseMatrix, usize)> {
    let n = mesh.num_vertices();
    let mut t = Vec::with_capacity(mesh.num_cells() * 16);
    for c in 0..mesh.num_cells() {
        let cell = mesh.cell(c);
        if mesh.dim() == 2 {
            let g = mesh.triangle(c).map_err(|_| Error::DegenerateCell { cell: c })?;
            let k = crate::mesh::simplex::triangle_stiffness(&g);
            for i in 0..3 {
                for j in 0..3 {
                    t.push((cell[i], cell[j], k[i][j]));
                }
            }
        } else {
            let g = mesh.tetrahedron(c)?;
            for i in 0..4 {
                for j in 0..4 {
                    t.push((cell[i], cell[j], g.stiffness[i][j]));
                }
            }
        }
    }
    let s = SparseMatrix::from_triplets(n, t);
    let tol = 1e-14 * s.max_abs();
    let negative = s.triplets().iter().filter(|&&(i, j, v)| i < j && v > tol).count();
    Ok((s, negative))
}

pub fn assemble_operators(mesh: &Mesh, bg: &BackgroundGeometry) -> Result<OperatorSet> {
    if mesh.dim() != bg.n() {
        return Err(Error::Dimension(format!("mesh is {}-dimensional, background has n = {}", mesh.dim(), bg.n())));
    }
    let nv = mesh.num_vertices();
    let (stiffness, negative_weights) = stiffness_matrix(mesh)?;
    let vertex_mass = mesh.vertex_measures();
    let d0 = mesh.d0_mask();
    let mass_interior: Vec<f64> = (0..nv).map(|i| if d0[i] { 0.0 } else { vertex_mass[i] }).collect();
    let mass_boundary = mesh.boundary_measures(BoundaryTag::D0);
    let kin = bg.interior().to_dense(nv);
    let kb = bg.boundary().to_dense(nv);
    let curvature_load_interior = (0..nv).map(|i| mass_interior[i] * kin[i]).collect();
    let curvature_load_boundary = (0..nv).map(|i| mass_boundary[i] * kb[i]).collect();
    Ok(OperatorSet {
        stiffness,
        vertex_mass,
        mass_interior,
        mass_boundary,
        curvature_load_interior,
        curvature_load_boundary,
        negative_weights,
    })
}
