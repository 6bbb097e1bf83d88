//! Solvers for the prescription problems: damped Newton with the
//! perturbation fallback, constrained and subcritical minimization,
//! auxiliary linear problems, monotone iteration and the bounded-solution
//! transform.

mod auxiliary;
mod constrained;
mod monotone;
mod newton;
mod subcritical;
mod transform;

pub use auxiliary::{harmonic_extension, negative_witness_recipe, neumann_potential, solve_auxiliary_linear, AuxiliaryKind};
pub use constrained::minimize_constrained;
pub use monotone::{
    check_lower, check_upper, constant_upper_solution, eigenfunction_lower_solution, k_search,
    log_power_lower_solution, mean_curvature_admissibility, monotone_iteration, potential_upper_solution,
    scaled_eigenfunction_lower, KSearch, LowerSolution, UpperForm, UpperSolution,
};
pub use newton::{boundary_distance, newton_solve, perturb_until_invertible, PerturbBranch, Perturbation};
pub use subcritical::{minimize_subcritical, SubcriticalParams};
pub use transform::{bound_solution_transform, TransformReport};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::{CurvaturePair, NodalSystem};
use crate::mesh::{Mesh, ScalarField, Support};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SolveStatus {
    Converged,
    Diverged,
    NotAdmissible,
    SingularJacobian,
}

/// Which equation carries the prescribed data.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Boundary,
    Interior,
}

/// Nodal conformal factor targeting dimension `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConformalFactor {
    pub u: ScalarField,
    pub n: usize,
}

impl ConformalFactor {
    pub fn new(u: ScalarField, n: usize) -> Result<Self> {
        if u.support() != Support::All {
            return Err(Error::Field("conformal factor must live on all vertices".into()));
        }
        if n >= 3 {
            if let Some((i, v)) = u.iter().find(|&(_, v)| v <= 0.0) {
                return Err(Error::NonPositiveFactor { vertex: i, value: v });
            }
        }
        Ok(Self { u, n })
    }

    /// `u ≡ 0` (n = 2) or `u ≡ 1` (n ≥ 3).
    pub fn identity(mesh: &Mesh) -> Result<Self> {
        let n = mesh.dim();
        Self::new(ScalarField::constant(mesh, Support::All, if n == 2 { 0.0 } else { 1.0 })?, n)
    }

    pub fn from_dense(mesh: &Mesh, values: &[f64]) -> Result<Self> {
        Self::new(ScalarField::from_dense(mesh, Support::All, values)?, mesh.dim())
    }

    pub fn values(&self) -> &[f64] {
        self.u.values()
    }
}

/// Tolerances and caps shared by the solvers.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    /// Sup-norm tolerance on curvature densities.
    pub tol: f64,
    /// Relative tolerance for linear solves.
    pub linear_tol: f64,
    pub max_iterations: usize,
    /// Jacobians with `σ_min` below this are treated as singular.
    pub sing_tol: f64,
    /// First perturbation size; doubled up to `t_max`.
    pub t0: f64,
    pub t_max: f64,
    /// Armijo sufficient-decrease constant.
    pub armijo: f64,
    pub max_halvings: usize,
    /// Target continuation steps when direct Newton fails.
    pub continuation_steps: usize,
    /// Initial `ε` for the upper-solution halving schedule.
    pub eps0: f64,
    pub eps_min: f64,
    pub monotone_max_iterations: usize,
    /// Initial and smallest `c` for the bounded-solution transform.
    pub c0: f64,
    pub c_min: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-6,
            linear_tol: 1e-8,
            max_iterations: 200,
            sing_tol: 1e-6,
            t0: 0.1,
            t_max: 10.0,
            armijo: 1e-4,
            max_halvings: 40,
            continuation_steps: 8,
            eps0: 1.0,
            eps_min: 1e-6,
            monotone_max_iterations: 20000,
            c0: 4.0,
            c_min: 1e-6,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveReport {
    pub status: SolveStatus,
    pub method: String,
    /// Written separately as a CSV field.
    #[serde(skip)]
    pub u: Option<ConformalFactor>,
    pub iterations: usize,
    pub residual_interior: f64,
    pub residual_boundary: f64,
    /// `(λ₁, λ₂)` from the variational methods.
    pub multipliers: Option<(f64, f64)>,
    pub perturbation_used: Option<Perturbation>,
    pub regularized: bool,
    pub notes: Vec<String>,
}

impl SolveReport {
    pub fn new(method: &str, status: SolveStatus) -> Self {
        Self {
            status,
            method: method.to_string(),
            u: None,
            iterations: 0,
            residual_interior: f64::NAN,
            residual_boundary: f64::NAN,
            multipliers: None,
            perturbation_used: None,
            regularized: false,
            notes: Vec::new(),
        }
    }

    pub fn not_admissible(method: &str, why: impl Into<String>) -> Self {
        let mut r = Self::new(method, SolveStatus::NotAdmissible);
        r.notes.push(why.into());
        r
    }

    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }

    pub fn max_residual(&self) -> f64 {
        self.residual_interior.max(self.residual_boundary)
    }
}

/// Sup-norm density residuals `(interior, boundary)` of `F(u) − target`.
pub fn density_residuals(sys: &NodalSystem, u: &[f64], target: &[f64]) -> (f64, f64) {
    let rho = sys.residual(u, target);
    let scale = sys.scale(u);
    let mut out = (0.0f64, 0.0f64);
    for i in 0..u.len() {
        let r = (rho[i] / scale[i]).abs();
        let r = if r.is_finite() { r } else { f64::INFINITY };
        if sys.boundary_rows()[i] {
            out.1 = out.1.max(r);
        } else {
            out.0 = out.0.max(r);
        }
    }
    out
}

/// Fills the residual fields of a report from a final iterate.
pub(crate) fn finish(
    report: &mut SolveReport,
    mesh: &Mesh,
    sys: &NodalSystem,
    u: &[f64],
    target: &[f64],
    tol: f64,
) -> Result<()> {
    let (ri, rb) = density_residuals(sys, u, target);
    report.residual_interior = ri;
    report.residual_boundary = rb;
    if ri < tol && rb < tol {
        report.status = SolveStatus::Converged;
    } else if report.status == SolveStatus::Converged {
        report.status = SolveStatus::Diverged;
    }
    if u.iter().all(|v| v.is_finite()) && (sys.n() == 2 || u.iter().all(|&v| v > 0.0)) {
        report.u = Some(ConformalFactor::from_dense(mesh, u)?);
    }
    Ok(())
}

/// Full-length target densities from a pair.
pub(crate) fn target_dense(mesh: &Mesh, target: &CurvaturePair) -> Result<Vec<f64>> {
    let nv = mesh.num_vertices();
    if target.interior.len() != mesh.support_vertices(Support::Interior).len()
        || target.boundary.len() != mesh.support_vertices(Support::Boundary).len()
    {
        return Err(Error::Field("target does not match the mesh".into()));
    }
    Ok(target.to_dense(nv))
}

/// "Changes sign" with the dead-band `1e-12·‖t‖∞`.
pub fn changes_sign(values: &[f64]) -> bool {
    let band = 1e-12 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    values.iter().any(|&v| v > band) && values.iter().any(|&v| v < -band)
}

/// True when every value lies within the dead-band of zero.
pub fn identically_zero(values: &[f64]) -> bool {
    values.iter().all(|&v| v == 0.0)
}
