use serde::{Deserialize, Serialize};

use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::{assemble_operators, NeumannSolver, OperatorSet};
use crate::mesh::{Mesh, ScalarField, Support};
use crate::sparse::SparseMatrix;

/// Linear boundary-value problems used as certificates. `data` lives on
/// D0 vertices for the boundary kinds and on interior rows (or all
/// vertices) for the others.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AuxiliaryKind {
    /// `Δφ = 0`, `∂φ/∂ν − κ₀φ = −κ`.
    BoundaryRobin { kappa0: f64 },
    /// `Δφ + K₀φ = K`, `∂φ/∂ν = 0`.
    InteriorHelmholtz { k0: f64 },
    /// `Δv = 0`, `∂v/∂ν = κ − κ̄`.
    BoundaryPotential,
    /// `Δv = K − K̄`, `∂v/∂ν = 0`.
    InteriorPotential,
    /// `ΔΨ = R̄ − R`, `∂Ψ/∂ν = 0`.
    ScalarPotential,
}

impl AuxiliaryKind {
    fn boundary_data(self) -> bool {
        matches!(self, Self::BoundaryRobin { .. } | Self::BoundaryPotential)
    }
}

fn operators(mesh: &Mesh) -> Result<OperatorSet> {
    assemble_operators(mesh, &BackgroundGeometry::flat(mesh)?)
}

/// Solves `S v = rhs` up to constants, normalized to vertex-mass mean zero.
pub fn neumann_potential(mesh: &Mesh, rhs: &[f64]) -> Result<Vec<f64>> {
    let ops = operators(mesh)?;
    NeumannSolver::new(&ops.stiffness, &ops.vertex_mass)?.solve(rhs)
}

fn check_data(mesh: &Mesh, kind: AuxiliaryKind, data: &ScalarField) -> Result<Vec<f64>> {
    let ok = if kind.boundary_data() {
        data.support() == Support::Boundary
    } else {
        matches!(data.support(), Support::Interior | Support::All)
    };
    if !ok {
        return Err(Error::Field(format!("{kind:?} does not accept data on {:?}", data.support())));
    }
    if kind.boundary_data() && data.is_empty() {
        return Err(Error::Precondition("boundary data needs a nonempty D0 boundary".into()));
    }
    Ok(data.to_dense(mesh.num_vertices()))
}

fn mean(weights: &[f64], values: &[f64]) -> f64 {
    let w: f64 = weights.iter().sum();
    weights.iter().zip(values).map(|(w, v)| w * v).sum::<f64>() / w
}

/// Solves the auxiliary problem; the flag reports `min φ > 0`.
pub fn solve_auxiliary_linear(mesh: &Mesh, kind: AuxiliaryKind, data: &ScalarField) -> Result<(ScalarField, bool)> {
    let d = check_data(mesh, kind, data)?;
    let ops = operators(mesh)?;
    let s = &ops.stiffness;
    let v = match kind {
        AuxiliaryKind::BoundaryRobin { kappa0 } => {
            let l = &ops.mass_boundary;
            let diag: Vec<f64> = l.iter().map(|l| -kappa0 * l).collect();
            let rhs: Vec<f64> = l.iter().zip(&d).map(|(l, k)| -l * k).collect();
            s.add_diagonal(&diag).solve(&rhs)?
        }
        AuxiliaryKind::InteriorHelmholtz { k0 } => {
            let m = &ops.mass_interior;
            let diag: Vec<f64> = m.iter().map(|m| -k0 * m).collect();
            let rhs: Vec<f64> = m.iter().zip(&d).map(|(m, k)| -m * k).collect();
            s.add_diagonal(&diag).solve(&rhs)?
        }
        AuxiliaryKind::BoundaryPotential => {
            let l = &ops.mass_boundary;
            let kb = mean(l, &d);
            let rhs: Vec<f64> = l.iter().zip(&d).map(|(l, k)| if *l > 0.0 { l * (k - kb) } else { 0.0 }).collect();
            NeumannSolver::new(s, &ops.vertex_mass)?.solve(&rhs)?
        }
        AuxiliaryKind::InteriorPotential | AuxiliaryKind::ScalarPotential => {
            let m = &ops.mass_interior;
            let kb = mean(m, &d);
            let sign = if kind == AuxiliaryKind::InteriorPotential { -1.0 } else { 1.0 };
            let rhs: Vec<f64> = m.iter().zip(&d).map(|(m, k)| sign * m * (k - kb)).collect();
            NeumannSolver::new(s, &ops.vertex_mass)?.solve(&rhs)?
        }
    };
    let positive = v.iter().all(|&x| x > 0.0);
    Ok((ScalarField::new(mesh, Support::All, v)?, positive))
}

/// Discrete harmonic extension of D0 data (Dirichlet on D0, natural on DM).
pub fn harmonic_extension(mesh: &Mesh, boundary: &ScalarField) -> Result<Vec<f64>> {
    if boundary.support() != Support::Boundary {
        return Err(Error::Field("harmonic extension takes D0 data".into()));
    }
    let ops = operators(mesh)?;
    let nv = mesh.num_vertices();
    let d0 = mesh.d0_mask();
    let g = boundary.to_dense(nv);
    let s: &SparseMatrix = &ops.stiffness;
    let mut t = Vec::new();
    let mut rhs = vec![0.0; nv];
    for (i, j, v) in s.triplets() {
        if d0[i] {
            continue;
        }
        if d0[j] {
            rhs[i] -= v * g[j];
        } else {
            t.push((i, j, v));
        }
    }
    for i in 0..nv {
        if d0[i] {
            t.push((i, i, 1.0));
            rhs[i] = g[i];
        }
    }
    SparseMatrix::from_triplets(nv, t).solve(&rhs)
}

/// Boundary curvature `κ` for which the Robin problem with constant
/// `κ₀ < 0` has the sign-changing solution `ψ + α`, with `ψ` the harmonic
/// extension of `sin θ` (angle about the vertex centroid).
pub fn negative_witness_recipe(mesh: &Mesh, kappa0: f64, alpha: f64) -> Result<ScalarField> {
    let nv = mesh.num_vertices() as f64;
    let cx = mesh.vertices().iter().map(|p| p[0]).sum::<f64>() / nv;
    let cy = mesh.vertices().iter().map(|p| p[1]).sum::<f64>() / nv;
    let sin = ScalarField::from_fn(mesh, Support::Boundary, |_, p| {
        let (x, y) = (p[0] - cx, p[1] - cy);
        let r = x.hypot(y);
        if r > 0.0 {
            y / r
        } else {
            0.0
        }
    })?;
    let psi = harmonic_extension(mesh, &sin)?;
    let ops = operators(mesh)?;
    let spsi = ops.stiffness.mul_vec(&psi);
    let kappa: Vec<f64> = (0..mesh.num_vertices())
        .map(|i| {
            let l = ops.mass_boundary[i];
            if l > 0.0 {
                -spsi[i] / l + kappa0 * (psi[i] + alpha)
            } else {
                0.0
            }
        })
        .collect();
    ScalarField::from_dense(mesh, Support::Boundary, &kappa)
}
