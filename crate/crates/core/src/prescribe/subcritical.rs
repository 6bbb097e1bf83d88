use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{Side, SolveReport, SolveStatus, SolverConfig};
use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::{NeumannSolver, NodalSystem};
use crate::mesh::{Mesh, ScalarField, Support};
use crate::sparse::{dot, SparseMatrix};

const METHOD: &str = "subcritical";

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubcriticalParams {
    /// Exponent `γ ∈ (0, 1)` in `e^{γ u}` (or `e^{2γu}` for interior data).
    pub gamma: f64,
    /// Right-hand side of the constraint `∫ t e^{…} = C`.
    pub constraint_constant: f64,
}

impl Default for SubcriticalParams {
    fn default() -> Self {
        Self { gamma: 0.5, constraint_constant: 2.0 * PI }
    }
}

struct Functional<'a> {
    s: &'a SparseMatrix,
    c: &'a [f64],
    csum: f64,
    gp: f64,
    /// `m_i t_i` on prescribed rows.
    mt: Vec<f64>,
    log_cc: f64,
}

impl Functional<'_> {
    fn q(&self, u: &[f64]) -> Vec<f64> {
        self.mt.iter().zip(u).map(|(mt, u)| if *mt != 0.0 { mt * (self.gp * u).exp() } else { 0.0 }).collect()
    }

    /// Reduced functional; `None` when `G(u) ≤ 0`.
    fn value(&self, u: &[f64]) -> Option<f64> {
        let g: f64 = self.q(u).iter().sum();
        if !(g > 0.0) || !g.is_finite() {
            return None;
        }
        Some(0.5 * self.s.bilinear(u, u) + dot(self.c, u) + self.csum / self.gp * (self.log_cc - g.ln()))
    }

    fn gradient(&self, u: &[f64], q: &[f64], g: f64) -> Vec<f64> {
        let su = self.s.mul_vec(u);
        (0..u.len()).map(|i| su[i] + self.c[i] - self.csum * q[i] / g).collect()
    }
}

/// Minimizes `½∫|∇u|² + ∫ k u` under `∫ t e^{γ' u} = C` on a surface of
/// Euler characteristic 1 whose background has constant positive
/// curvature on the prescribed side. The background total curvature must
/// equal `C`.
pub fn minimize_subcritical(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    params: &SubcriticalParams,
    side: Side,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    if bg.n() != 2 {
        return Err(Error::Dimension("subcritical minimization is two-dimensional".into()));
    }
    if !(params.gamma > 0.0 && params.gamma < 1.0) {
        return Err(Error::Precondition(format!("gamma must lie in (0, 1), got {}", params.gamma)));
    }
    let chi = mesh.euler_characteristic()?;
    if chi != 1 {
        return Err(Error::Precondition(format!("needs Euler characteristic 1, mesh has {chi}")));
    }
    let (want, p) = match side {
        Side::Boundary => (Support::Boundary, 1.0),
        Side::Interior => (Support::Interior, 2.0),
    };
    if target.support() != want {
        return Err(Error::Field(format!("target for {side:?} must live on {want:?} vertices")));
    }
    let own = match side {
        Side::Boundary => bg.boundary(),
        Side::Interior => bg.interior(),
    };
    let sys = NodalSystem::new(mesh, bg)?;
    let ops = sys.operators();
    let nv = mesh.num_vertices();
    let c = sys.c();
    let csum: f64 = c.iter().sum();
    let cc = params.constraint_constant;
    if (csum - cc).abs() > 1e-8 * cc.abs().max(1.0) {
        return Err(Error::Precondition(format!(
            "background total curvature {csum:.10} differs from the constraint constant {cc:.10}"
        )));
    }
    let mut report = SolveReport::new(METHOD, SolveStatus::Diverged);
    report.notes.extend(ops.warnings());
    if own.min() <= 0.0 {
        report.notes.push("background curvature on the prescribed side is not positive".into());
    }
    if target.max() <= 0.0 {
        return Ok(SolveReport::not_admissible(METHOD, "target must be positive somewhere"));
    }
    let t = target.to_dense(nv);
    let m = match side {
        Side::Boundary => &ops.mass_boundary,
        Side::Interior => &ops.mass_interior,
    };
    let gp = p * params.gamma;
    let f = Functional {
        s: &ops.stiffness,
        c,
        csum,
        gp,
        mt: (0..nv).map(|i| m[i] * t[i]).collect(),
        log_cc: cc.ln(),
    };
    let neumann = NeumannSolver::new(&ops.stiffness, &ops.vertex_mass)?;

    // Bordered factorization pieces: `[H₀ a; aᵀ 0]` with `a` the vertex masses.
    let a = &ops.vertex_mass;
    let bordered = |diag: &[f64]| -> Result<crate::sparse::LuFactor> {
        let h0 = ops.stiffness.add_diagonal(diag);
        let mut tr = h0.triplets();
        for i in 0..nv {
            tr.push((i, nv, a[i]));
            tr.push((nv, i, a[i]));
        }
        SparseMatrix::from_triplets(nv + 1, tr).lu()
    };

    let mut u = vec![0.0; nv];
    if f.value(&u).is_none() {
        let tmax = t.iter().fold(0.0f64, |x, y| x.max(*y));
        u = t.iter().map(|x| x / tmax).collect();
        let mut s = 1.0;
        while f.value(&u.iter().map(|x| s * x).collect::<Vec<_>>()).is_none() {
            s *= 2.0;
            if s > 1e6 {
                return Err(Error::Infeasible("no start with positive constraint integral".into()));
            }
        }
        u.iter_mut().for_each(|x| *x *= s);
    }

    let mut its = 0;
    let mut converged = false;
    while its < cfg.max_iterations {
        let q = f.q(&u);
        let g: f64 = q.iter().sum();
        let grad = f.gradient(&u, &q, g);
        let gn = grad.iter().fold(0.0f64, |x, y| x.max(y.abs()));
        let scale = c.iter().fold(0.0f64, |x, y| x.max(y.abs())).max(1e-300);
        if gn <= 1e-12 * scale {
            converged = true;
            break;
        }
        let beta = csum * gp / (g * g);
        let diag: Vec<f64> = q.iter().map(|q| -csum * gp / g * q).collect();
        let mut dir: Option<Vec<f64>> = None;
        if let Ok(lu) = bordered(&diag) {
            let mut r1: Vec<f64> = grad.iter().map(|x| -x).collect();
            r1.push(0.0);
            let mut r2 = q.clone();
            r2.push(0.0);
            if let (Ok(y1), Ok(y2)) = (lu.solve(&r1), lu.solve(&r2)) {
                let (y1, y2) = (&y1[..nv], &y2[..nv]);
                let k = beta * dot(&q, y1) / (1.0 + beta * dot(&q, y2));
                let x: Vec<f64> = (0..nv).map(|i| y1[i] - k * y2[i]).collect();
                if dot(&grad, &x) < 0.0 {
                    dir = Some(x);
                }
            }
        }
        let x = match dir {
            Some(x) => x,
            None => neumann.solve_projected(&grad, a)?.iter().map(|v| -v).collect(),
        };
        let j0 = f.value(&u).unwrap_or(f64::INFINITY);
        let slope = dot(&grad, &x);
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..cfg.max_halvings {
            let cand: Vec<f64> = u.iter().zip(&x).map(|(u, x)| u + s * x).collect();
            if let Some(j1) = f.value(&cand) {
                if j1 <= j0 + cfg.armijo * s * slope {
                    u = cand;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        its += 1;
        if !accepted {
            converged = gn <= 1e-8 * scale;
            break;
        }
    }
    report.iterations = its;
    if !converged {
        report.notes.push("minimization stopped before the gradient vanished".into());
    }

    let g: f64 = f.q(&u).iter().sum();
    let shift = (cc / g).ln() / gp;
    u.iter_mut().for_each(|x| *x += shift);

    let q = f.q(&u);
    let lin = sys.linear_part(&u);
    let lam = dot(&lin, &q) / dot(&q, &q);
    let mean_part = lin.iter().zip(&q).map(|(l, q)| l - lam * q).sum::<f64>() / a.iter().sum::<f64>();
    report.multipliers = Some((mean_part, -lam));
    let (ri, rb) = subcritical_residuals(&sys, &u, &q, gp);
    report.residual_interior = ri;
    report.residual_boundary = rb;
    report.status = if ri < cfg.tol && rb < cfg.tol { SolveStatus::Converged } else { SolveStatus::Diverged };
    report.u = Some(super::ConformalFactor::from_dense(mesh, &u)?);
    Ok(report)
}

/// Density residuals of `K u + c = m t e^{γ' u}`, scaled by `w e^{γ' u}`.
fn subcritical_residuals(sys: &NodalSystem, u: &[f64], q: &[f64], gp: f64) -> (f64, f64) {
    let lin = sys.linear_part(u);
    let mut out = (0.0f64, 0.0f64);
    for i in 0..u.len() {
        let r = ((lin[i] - q[i]) / (sys.weights()[i] * (gp * u[i]).exp())).abs();
        let r = if r.is_finite() { r } else { f64::INFINITY };
        if sys.boundary_rows()[i] {
            out.1 = out.1.max(r);
        } else {
            out.0 = out.0.max(r);
        }
    }
    out
}
