use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use super::{density_residuals, finish, target_dense, ConformalFactor, SolveReport, SolveStatus, SolverConfig};
use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::{smallest_singular_value_with, CurvaturePair, NodalSystem, SingularOptions};
use crate::mesh::Mesh;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbBranch {
    /// `z = φ·Δ(v₁²)` with `φ` an interior bump.
    KernelNonconstant,
    /// `z` built from the distance to the boundary (`z = 0`, `∂z/∂ν < 0` there).
    KernelConstant,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Perturbation {
    pub branch: PerturbBranch,
    pub z_description: String,
    pub t: f64,
    pub sigma_before: f64,
    pub sigma_after: f64,
}

fn sigma_min(sys: &NodalSystem, u: &[f64]) -> Result<(f64, Vec<f64>)> {
    smallest_singular_value_with(&sys.coupled(u), SingularOptions::default())
}

#[derive(PartialEq)]
struct Node(f64, usize);

impl Eq for Node {}

impl PartialOrd for Node {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Node {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then(other.1.cmp(&self.1))
    }
}

/// Edge-path distance from every vertex to the D0 boundary.
pub fn boundary_distance(mesh: &Mesh) -> Vec<f64> {
    let n = mesh.num_vertices();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (e, &[a, b]) in mesh.edges().iter().enumerate() {
        let l = mesh.edge_lengths()[e];
        adj[a].push((b, l));
        adj[b].push((a, l));
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut heap = BinaryHeap::new();
    for i in 0..n {
        if mesh.is_d0_vertex(i) {
            dist[i] = 0.0;
            heap.push(Node(0.0, i));
        }
    }
    while let Some(Node(d, i)) = heap.pop() {
        if d > dist[i] {
            continue;
        }
        for &(j, l) in &adj[i] {
            if d + l < dist[j] {
                dist[j] = d + l;
                heap.push(Node(d + l, j));
            }
        }
    }
    dist
}

/// Moves `u` along a perturbation direction until the linearization
/// becomes invertible.
pub fn perturb_until_invertible(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    u: &ConformalFactor,
    cfg: &SolverConfig,
) -> Result<(ConformalFactor, Perturbation)> {
    let sys = NodalSystem::new(mesh, bg)?;
    let u0 = u.values().to_vec();
    sys.check_admissible(&u0)?;
    let (sigma0, v1) = sigma_min(&sys, &u0)?;
    if sigma0 >= cfg.sing_tol {
        return Err(Error::Precondition(format!(
            "linearization is already invertible (sigma_min = {sigma0:.3e})"
        )));
    }
    let dist = boundary_distance(mesh);
    let finite_max = dist.iter().copied().filter(|d| d.is_finite()).fold(0.0, f64::max);
    if finite_max == 0.0 {
        return Err(Error::Precondition("perturbation needs interior vertices and a D0 boundary".into()));
    }

    let mut candidates: Vec<(PerturbBranch, String, Vec<f64>)> = Vec::new();
    let vmax = v1.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let vmean = v1.iter().sum::<f64>() / v1.len() as f64;
    let nonconstant = v1.iter().any(|x| (x - vmean).abs() > 1e-6 * vmax);
    if nonconstant {
        let sq: Vec<f64> = v1.iter().map(|x| x * x).collect();
        let lap = sys.operators().stiffness.mul_vec(&sq);
        let mass = &sys.operators().vertex_mass;
        let delta = 0.25 * finite_max;
        let z: Vec<f64> =
            (0..sq.len()).map(|i| (dist[i] / delta).min(1.0) * (-lap[i] / mass[i])).collect();
        let zmax = z.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if zmax > 0.0 {
            candidates.push((
                PerturbBranch::KernelNonconstant,
                "interior bump times the Laplacian of the squared kernel vector".into(),
                z.iter().map(|x| x / zmax).collect(),
            ));
        }
    }
    let z: Vec<f64> = dist.iter().map(|d| if d.is_finite() { d / finite_max } else { 1.0 }).collect();
    candidates.push((PerturbBranch::KernelConstant, "normalized distance to the boundary".into(), z));

    for (branch, desc, z) in candidates {
        let mut t = cfg.t0;
        while t <= cfg.t_max {
            for s in [t, -t] {
                let cand: Vec<f64> = u0.iter().zip(&z).map(|(u, z)| u + s * z).collect();
                if sys.check_admissible(&cand).is_err() {
                    continue;
                }
                let (sigma, _) = sigma_min(&sys, &cand)?;
                if sigma > cfg.sing_tol {
                    let p = Perturbation { branch, z_description: desc, t: s, sigma_before: sigma0, sigma_after: sigma };
                    return Ok((ConformalFactor::from_dense(mesh, &cand)?, p));
                }
            }
            t *= 2.0;
        }
    }
    Err(Error::NoConvergence { what: "perturbation search".into(), iterations: 0 })
}

fn merit(sys: &NodalSystem, rho: &[f64]) -> f64 {
    rho.iter().zip(sys.weights()).map(|(r, w)| r * r / w).sum()
}

/// Damped Newton on `ρ(u) = 0` for a fixed target. Returns true on
/// convergence; `u` holds the last accepted iterate either way.
pub(crate) fn newton_iterate(
    sys: &NodalSystem,
    u: &mut Vec<f64>,
    target: &[f64],
    cfg: &SolverConfig,
    regularize: bool,
    iterations: &mut usize,
    budget: usize,
) -> bool {
    for _ in 0..budget {
        let (ri, rb) = density_residuals(sys, u, target);
        if ri < cfg.tol && rb < cfg.tol {
            return true;
        }
        let rho = sys.residual(u, target);
        let m0 = merit(sys, &rho);
        if !m0.is_finite() {
            return false;
        }
        let mut jac = sys.residual_jacobian(u, target);
        let eps = 1e-8 * jac.norm_inf();
        if regularize {
            jac = jac.add_diagonal(&vec![eps; u.len()]);
        }
        let rhs: Vec<f64> = rho.iter().map(|r| -r).collect();
        let delta = match jac.solve(&rhs) {
            Ok(d) => d,
            Err(_) => match jac.add_diagonal(&vec![eps; u.len()]).solve(&rhs) {
                Ok(d) => d,
                Err(_) => return false,
            },
        };
        *iterations += 1;
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..cfg.max_halvings {
            let cand: Vec<f64> = u.iter().zip(&delta).map(|(u, d)| u + s * d).collect();
            if sys.check_admissible(&cand).is_ok() {
                let m1 = merit(sys, &sys.residual(&cand, target));
                if m1.is_finite() && m1 <= (1.0 - 2.0 * cfg.armijo * s) * m0 {
                    *u = cand;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        if !accepted {
            let (ri, rb) = density_residuals(sys, u, target);
            return ri < cfg.tol && rb < cfg.tol;
        }
    }
    let (ri, rb) = density_residuals(sys, u, target);
    ri < cfg.tol && rb < cfg.tol
}

/// Damped Newton for `F(u) = target`, with the perturbation and
/// regularization fallbacks for singular linearizations and continuation
/// in the target when the direct attempt fails.
pub fn newton_solve(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &CurvaturePair,
    u0: &ConformalFactor,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let sys = NodalSystem::new(mesh, bg)?;
    let t = target_dense(mesh, target)?;
    let mut u = u0.values().to_vec();
    sys.check_admissible(&u)?;
    let mut report = SolveReport::new("newton", SolveStatus::Diverged);
    report.notes.extend(sys.operators().warnings());

    let (ri, rb) = density_residuals(&sys, &u, &t);
    if ri < cfg.tol && rb < cfg.tol {
        finish(&mut report, mesh, &sys, &u, &t, cfg.tol)?;
        return Ok(report);
    }

    let mut regularize = false;
    let (sigma, _) = sigma_min(&sys, &u)?;
    if sigma < cfg.sing_tol {
        report.notes.push(format!("singular linearization at the initial guess (sigma_min = {sigma:.3e})"));
        match perturb_until_invertible(mesh, bg, u0, cfg) {
            Ok((up, p)) => {
                u = up.values().to_vec();
                report.perturbation_used = Some(p);
            }
            Err(e) => {
                report.notes.push(format!("perturbation failed ({e}); using Tikhonov-regularized steps"));
                regularize = true;
            }
        }
    }
    report.regularized = regularize;

    let start = u.clone();
    let mut its = 0;
    let mut ok = newton_iterate(&sys, &mut u, &t, cfg, regularize, &mut its, cfg.max_iterations);
    if !ok {
        report.notes.push("direct Newton failed; continuing in the target".into());
        u = start.clone();
        ok = continuation(&sys, &mut u, &t, cfg, regularize, &mut its);
    }
    report.iterations = its;
    if ok {
        report.status = SolveStatus::Converged;
    } else if regularize {
        report.status = SolveStatus::SingularJacobian;
    }
    finish(&mut report, mesh, &sys, &u, &t, cfg.tol)?;
    if !ok && regularize {
        report.status = SolveStatus::SingularJacobian;
    }
    Ok(report)
}

fn continuation(
    sys: &NodalSystem,
    u: &mut Vec<f64>,
    target: &[f64],
    cfg: &SolverConfig,
    regularize: bool,
    its: &mut usize,
) -> bool {
    let f0 = match sys.density(u) {
        Ok(f) => f,
        Err(_) => return false,
    };
    let mut s = 0.0;
    let mut step = 1.0 / cfg.continuation_steps.max(1) as f64;
    let mut splits = 0;
    while s < 1.0 {
        let next = (s + step).min(1.0);
        let tk: Vec<f64> = f0.iter().zip(target).map(|(a, b)| a + next * (b - a)).collect();
        let mut trial = u.clone();
        if newton_iterate(sys, &mut trial, &tk, cfg, regularize, its, cfg.max_iterations) {
            *u = trial;
            s = next;
        } else {
            splits += 1;
            if splits > 8 {
                return false;
            }
            step *= 0.5;
        }
    }
    true
}
