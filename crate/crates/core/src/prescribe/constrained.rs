use super::newton::newton_iterate;
use super::{changes_sign, finish, identically_zero, Side, SolveReport, SolveStatus, SolverConfig};
use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::{NeumannSolver, NodalSystem};
use crate::mesh::{Mesh, ScalarField, Support};
use crate::sparse::dot;

const METHOD: &str = "constrained";

struct Problem<'a> {
    p: f64,
    /// `m_i · t̃_i`, zero off the prescribed rows.
    mk: Vec<f64>,
    s: &'a crate::sparse::SparseMatrix,
    area: &'a [f64],
    neumann: NeumannSolver,
}

impl Problem<'_> {
    fn g(&self, w: &[f64]) -> f64 {
        self.mk.iter().zip(w).map(|(mk, w)| if *mk != 0.0 { mk * (self.p * w).exp() } else { 0.0 }).sum()
    }

    fn grad_g(&self, w: &[f64]) -> Vec<f64> {
        self.mk.iter().zip(w).map(|(mk, w)| if *mk != 0.0 { self.p * mk * (self.p * w).exp() } else { 0.0 }).collect()
    }

    fn energy(&self, w: &[f64]) -> f64 {
        self.s.bilinear(w, w)
    }

    fn normalize(&self, w: &mut [f64]) {
        let a: f64 = self.area.iter().sum();
        let mean = dot(self.area, w) / a;
        w.iter_mut().for_each(|x| *x -= mean);
    }

    /// Finds `τ` with `g(w + τ d) = 0` by bracketing and bisection.
    fn restore(&self, w: &[f64], d: &[f64]) -> Option<Vec<f64>> {
        let f = |tau: f64| {
            let x: Vec<f64> = w.iter().zip(d).map(|(w, d)| w + tau * d).collect();
            self.g(&x)
        };
        let f0 = f(0.0);
        if f0 == 0.0 {
            return Some(w.to_vec());
        }
        let mut step = 1e-3;
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut found = false;
        for _ in 0..60 {
            for s in [step, -step] {
                let v = f(s);
                if v.is_finite() && v.signum() != f0.signum() {
                    lo = 0.0;
                    hi = s;
                    found = true;
                    break;
                }
            }
            if found {
                break;
            }
            step *= 2.0;
        }
        if !found {
            return None;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if f(mid).signum() == f0.signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = 0.5 * (lo + hi);
        Some(w.iter().zip(d).map(|(w, d)| w + tau * d).collect())
    }
}

/// Minimizes `∫|∇w|²` under `∫ k̃ e^{p w} = 0` and recovers a conformal
/// factor with prescribed boundary (`Side::Boundary`, zero interior
/// curvature) or interior (`Side::Interior`, zero geodesic curvature)
/// curvature on a surface of zero Euler characteristic.
pub fn minimize_constrained(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    side: Side,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    if bg.n() != 2 {
        return Err(Error::Dimension("constrained minimization is two-dimensional".into()));
    }
    let want = match side {
        Side::Boundary => Support::Boundary,
        Side::Interior => Support::Interior,
    };
    if target.support() != want {
        return Err(Error::Field(format!("target for {side:?} must live on {want:?} vertices")));
    }
    let other = match side {
        Side::Boundary => bg.interior(),
        Side::Interior => bg.boundary(),
    };
    if other.max_abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "background curvature on the unprescribed side must vanish (sup {:.3e})",
            other.max_abs()
        )));
    }
    let sys = NodalSystem::new(mesh, bg)?;
    let ops = sys.operators();
    let nv = mesh.num_vertices();
    let c = sys.c().to_vec();
    let csum: f64 = c.iter().sum();
    let cabs: f64 = c.iter().map(|x| x.abs()).sum();
    if csum.abs() > 1e-8 * (cabs + 1.0) {
        return Err(Error::Precondition(format!("total background curvature is {csum:.3e}, expected zero")));
    }
    let neumann = NeumannSolver::new(&ops.stiffness, &ops.vertex_mass)?;
    let v = if cabs == 0.0 { vec![0.0; nv] } else { neumann.solve_projected(&c, &ops.vertex_mass)? };

    let t = target.to_dense(nv);
    let mut report = SolveReport::new(METHOD, SolveStatus::Diverged);
    report.notes.extend(ops.warnings());
    if identically_zero(target.values()) {
        let u: Vec<f64> = v.iter().map(|x| -x).collect();
        finish(&mut report, mesh, &sys, &u, &t, cfg.tol)?;
        report.notes.push("zero target: u is minus the background potential".into());
        return Ok(report);
    }
    let (p, m) = match side {
        Side::Boundary => (1.0, &ops.mass_boundary),
        Side::Interior => (2.0, &ops.mass_interior),
    };
    let mk: Vec<f64> = (0..nv).map(|i| m[i] * t[i] * (-p * v[i]).exp()).collect();
    let total: f64 = mk.iter().sum();
    if !changes_sign(target.values()) || total >= 0.0 {
        return Ok(SolveReport::not_admissible(
            METHOD,
            format!("target must change sign with negative weighted mean (weighted integral {total:.3e})"),
        ));
    }
    let prob = Problem { p, mk, s: &ops.stiffness, area: &ops.vertex_mass, neumann };

    let psi: Vec<f64> = prob.mk.iter().zip(m).map(|(mk, m)| if *m > 0.0 { mk / m } else { 0.0 }).collect();
    let psi_max = psi.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let along = |s: f64| prob.g(&psi.iter().map(|x| s * x).collect::<Vec<_>>());
    let cap = 600.0 / (p * psi_max);
    let mut hi = 1.0 / (p * psi_max);
    while along(hi) <= 0.0 {
        hi *= 2.0;
        if hi > cap {
            return Err(Error::Infeasible("no feasible start along the target direction".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if along(mid) <= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut w: Vec<f64> = psi.iter().map(|x| 0.5 * (lo + hi) * x).collect();
    prob.normalize(&mut w);

    let max_steps = 20 * cfg.max_iterations;
    let mut its = 0;
    let mut stationary = false;
    while its < max_steps {
        let grad = prob.grad_g(&w);
        let zeta = prob.neumann.solve_projected(&grad, prob.area)?;
        let denom = dot(&zeta, &grad);
        let mu = dot(&w, &grad) / denom;
        let d: Vec<f64> = w.iter().zip(&zeta).map(|(w, z)| -(w - mu * z)).collect();
        let e0 = prob.energy(&w);
        let dd = prob.energy(&d);
        if dd <= 1e-14 * e0.max(1e-300) {
            stationary = true;
            break;
        }
        let mut s = 1.0;
        let mut accepted = false;
        for _ in 0..cfg.max_halvings {
            let trial: Vec<f64> = w.iter().zip(&d).map(|(w, d)| w + s * d).collect();
            if let Some(mut cand) = prob.restore(&trial, &zeta) {
                prob.normalize(&mut cand);
                if prob.energy(&cand) <= e0 - cfg.armijo * s * dd {
                    w = cand;
                    accepted = true;
                    break;
                }
            }
            s *= 0.5;
        }
        its += 1;
        if !accepted {
            stationary = dd <= 1e-10 * e0;
            break;
        }
    }
    report.iterations = its;
    if !stationary {
        report.notes.push("projected gradient stopped before stationarity".into());
    }

    let grad = prob.grad_g(&w);
    let lam2 = -2.0 * prob.energy(&w) / dot(&w, &grad);
    let sw = prob.s.mul_vec(&w);
    let a: f64 = prob.area.iter().sum();
    let lam1 = -(0..nv).map(|i| 2.0 * sw[i] + lam2 * grad[i]).sum::<f64>() / a;
    report.multipliers = Some((lam1, lam2));
    if lam2 >= 0.0 {
        report.notes.push(format!("multiplier has the wrong sign ({lam2:.3e})"));
        finish(&mut report, mesh, &sys, &w, &t, cfg.tol)?;
        report.status = SolveStatus::Diverged;
        return Ok(report);
    }
    let shift = (-lam2 * p / 2.0).ln() / p;
    let mut u: Vec<f64> = (0..nv).map(|i| w[i] + shift - v[i]).collect();

    let before = super::density_residuals(&sys, &u, &t);
    let mut polished = u.clone();
    let mut extra = 0;
    newton_iterate(&sys, &mut polished, &t, cfg, false, &mut extra, 50);
    let after = super::density_residuals(&sys, &polished, &t);
    if after.0.max(after.1) < before.0.max(before.1) {
        u = polished;
        report.notes.push(format!("Newton polish: {extra} steps"));
    }
    report.status = SolveStatus::Converged;
    finish(&mut report, mesh, &sys, &u, &t, cfg.tol)?;
    let post: f64 = (0..nv).map(|i| m[i] * t[i] * (p * u[i]).exp()).sum();
    report.notes.push(format!("weighted integral of the target against the new measure: {post:.3e}"));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    fn annulus() -> (Mesh, BackgroundGeometry) {
        let m = generators::annulus(1.0, 2.0, 32, 6);
        let bg = BackgroundGeometry::intrinsic(&m).unwrap();
        (m, bg)
    }

    #[test]
    fn positive_target_is_not_admissible() {
        let (m, bg) = annulus();
        let t = ScalarField::constant(&m, Support::Boundary, 1.0).unwrap();
        let r = minimize_constrained(&m, &bg, &t, Side::Boundary, &SolverConfig::default()).unwrap();
        assert_eq!(r.status, SolveStatus::NotAdmissible);
    }

    #[test]
    fn zero_target_gives_flat_boundary() {
        let (m, bg) = annulus();
        let t = ScalarField::constant(&m, Support::Boundary, 0.0).unwrap();
        let r = minimize_constrained(&m, &bg, &t, Side::Boundary, &SolverConfig::default()).unwrap();
        assert!(r.converged(), "{r:?}");
    }
}
