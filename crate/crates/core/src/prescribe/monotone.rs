use serde::{Deserialize, Serialize};

use super::auxiliary::{solve_auxiliary_linear, AuxiliaryKind};
use super::newton::newton_iterate;
use super::{density_residuals, finish, target_dense, ConformalFactor, SolveReport, SolveStatus, SolverConfig};
use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::{CurvaturePair, DimensionConstants, NodalSystem};
use crate::mesh::{Mesh, ScalarField, Support};
use crate::spectral::{robin_mr, sigma1};

/// Relative slack for the nodal inequalities.
fn slack(sys: &NodalSystem, u: &[f64], target: &[f64]) -> f64 {
    let lin = sys.linear_part(u);
    let mut s = 0.0f64;
    for i in 0..u.len() {
        let w = sys.weights()[i];
        s = s.max((lin[i] / w).abs()).max((target[i] * sys.phi(i, u[i])).abs());
    }
    1e-10 * s.max(1e-300)
}

/// Lower-solution test `ρ(u) ≤ 0` row by row (scaled by the row weight).
/// Returns the verdict and the largest scaled residual.
pub fn check_lower(sys: &NodalSystem, u: &[f64], target: &[f64]) -> (bool, f64) {
    if sys.check_admissible(u).is_err() {
        return (false, f64::INFINITY);
    }
    let rho = sys.residual(u, target);
    let worst = rho.iter().zip(sys.weights()).map(|(r, w)| r / w).fold(f64::NEG_INFINITY, f64::max);
    (worst <= slack(sys, u, target), worst)
}

/// Upper-solution test `ρ(u) ≥ 0`; returns the smallest scaled residual.
pub fn check_upper(sys: &NodalSystem, u: &[f64], target: &[f64]) -> (bool, f64) {
    if sys.check_admissible(u).is_err() {
        return (false, f64::NEG_INFINITY);
    }
    let rho = sys.residual(u, target);
    let worst = rho.iter().zip(sys.weights()).map(|(r, w)| r / w).fold(f64::INFINITY, f64::min);
    (worst >= -slack(sys, u, target), worst)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UpperForm {
    /// `u⁺ = ε^a Ψ + ε`.
    Plain,
    /// `u⁺ = ε + c_n ε^a Ψ`.
    Damped,
}

#[derive(Clone, Debug)]
pub struct UpperSolution {
    pub u: ConformalFactor,
    pub form: UpperForm,
    pub eps: f64,
    pub potential: ScalarField,
}

#[derive(Clone, Debug)]
pub struct LowerSolution {
    pub u: ConformalFactor,
    pub family: String,
    pub gamma: f64,
    pub r: f64,
    pub m: f64,
    /// Largest scaled residual (non-positive for a lower solution).
    pub violation: f64,
}

fn interior_target(mesh: &Mesh, r: &ScalarField) -> Result<CurvaturePair> {
    let nv = mesh.num_vertices();
    let dense = r.to_dense(nv);
    CurvaturePair::new(
        ScalarField::from_dense(mesh, Support::Interior, &dense)?,
        ScalarField::constant(mesh, Support::Boundary, 0.0)?,
    )
}

fn require_flat(bg: &BackgroundGeometry) -> Result<()> {
    if bg.n() < 3 {
        return Err(Error::Dimension("needs n >= 3".into()));
    }
    if bg.sup_norm() > 1e-12 {
        return Err(Error::Precondition("needs a scalar-flat background with minimal boundary".into()));
    }
    Ok(())
}

/// Upper solution built from the potential `ΔΨ = R̄ − R`: tries the plain
/// form first, then the damped one, halving `ε` from `eps0`.
pub fn potential_upper_solution(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    r: &ScalarField,
    cfg: &SolverConfig,
) -> Result<UpperSolution> {
    require_flat(bg)?;
    let sys = NodalSystem::new(mesh, bg)?;
    let target = interior_target(mesh, r)?;
    let t = target.to_dense(mesh.num_vertices());
    let mi = &sys.operators().mass_interior;
    let rbar = mi.iter().zip(&t).map(|(m, r)| m * r).sum::<f64>() / mi.iter().sum::<f64>();
    if rbar >= 0.0 {
        return Err(Error::Precondition(format!("mean of R must be negative, got {rbar:.3e}")));
    }
    let (psi, _) = solve_auxiliary_linear(mesh, AuxiliaryKind::ScalarPotential, &target.interior)?;
    let k = DimensionConstants::new(bg.n())?;
    for form in [UpperForm::Plain, UpperForm::Damped] {
        let coef = match form {
            UpperForm::Plain => 1.0,
            UpperForm::Damped => k.c_n,
        };
        let mut eps = cfg.eps0;
        while eps >= cfg.eps_min {
            let ea = eps.powf(k.a);
            let u: Vec<f64> = psi.values().iter().map(|p| eps + coef * ea * p).collect();
            if check_upper(&sys, &u, &t).0 {
                return Ok(UpperSolution { u: ConformalFactor::from_dense(mesh, &u)?, form, eps, potential: psi });
            }
            eps *= 0.5;
        }
    }
    Err(Error::Infeasible("no upper solution on the halving schedule".into()))
}

/// The log-power lower-solution formula with eigenfunction `φ₁ > 1`,
/// constants `γ`, `r ∈ (0, 1)` and scaling `m`:
/// `v = γ(φ₁^{r²} − r^r)^{1 − log r / r} + (n−2)/4 · log(γ(r² − r log r)(1−r)^{−log r / r})`,
/// `u = e^v / a` with `m a^{4/(n−2)} = c_n`.
pub fn log_power_lower_solution(phi1: &[f64], gamma: f64, r: f64, m: f64, n: usize) -> Option<Vec<f64>> {
    if !(r > 0.0 && r < 1.0) || gamma <= 0.0 || m <= 0.0 {
        return None;
    }
    let nf = n as f64;
    let c_n = (nf - 2.0) / (4.0 * (nf - 1.0));
    let a = (c_n / m).powf((nf - 2.0) / 4.0);
    let e = 1.0 - r.ln() / r;
    let inner = gamma * (r * r - r * r.ln()) * (1.0 - r).powf(-r.ln() / r);
    if inner <= 0.0 {
        return None;
    }
    let tail = (nf - 2.0) / 4.0 * inner.ln();
    let u: Vec<f64> = phi1
        .iter()
        .map(|&p| {
            let base = p.powf(r * r) - r.powf(r);
            (gamma * base.powf(e) + tail).exp() / a
        })
        .collect();
    u.iter().all(|x| x.is_finite() && *x > 0.0).then_some(u)
}

/// Lower solution below `upper` from the eigenfunction of
/// `Δv + mRv + λv = 0`, with `m` doubled until `λ < 0`. Tries the
/// log-power formula first and falls back to the family `γ φ^r`.
pub fn eigenfunction_lower_solution(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    r: &ScalarField,
    upper: &[f64],
) -> Result<LowerSolution> {
    require_flat(bg)?;
    let sys = NodalSystem::new(mesh, bg)?;
    let target = interior_target(mesh, r)?;
    let t = target.to_dense(mesh.num_vertices());
    if t.iter().all(|&x| x <= 0.0) {
        return Err(Error::Precondition("R must be positive somewhere".into()));
    }
    let rall = ScalarField::from_dense(mesh, Support::All, &t)?;
    let mut m = 1.0;
    let mut eig = robin_mr(mesh, &rall, m)?;
    while eig.value >= 0.0 {
        m *= 2.0;
        if m > 1e12 {
            return Err(Error::Infeasible("no m with a negative Robin eigenvalue".into()));
        }
        eig = robin_mr(mesh, &rall, m)?;
    }
    let below = |u: &[f64]| u.iter().zip(upper).all(|(l, h)| l <= h);
    let mut best = f64::INFINITY;

    let phi = eig.eigenfunction.values();
    let pmin = phi.iter().copied().fold(f64::INFINITY, f64::min);
    if pmin > 0.0 {
        let phi1: Vec<f64> = phi.iter().map(|p| 2.0 * p / pmin).collect();
        for k in 0..16 {
            let gamma = 0.5f64.powi(k);
            for j in 1..10 {
                let rr = 0.1 * j as f64;
                if let Some(u) = log_power_lower_solution(&phi1, gamma, rr, m, bg.n()) {
                    let (ok, v) = check_lower(&sys, &u, &t);
                    if ok && below(&u) {
                        return Ok(LowerSolution {
                            u: ConformalFactor::from_dense(mesh, &u)?,
                            family: "log_power".into(),
                            gamma,
                            r: rr,
                            m,
                            violation: v,
                        });
                    }
                    best = best.min(v);
                }
            }
        }
    }

    let mut mm = m;
    for _ in 0..8 {
        let e = robin_mr(mesh, &rall, mm)?;
        let phi = e.eigenfunction.values();
        let pmax = phi.iter().copied().fold(0.0, f64::max);
        for rr in [1.0, 1.5, 2.0, 3.0, 4.0, 6.0] {
            let base: Vec<f64> = phi.iter().map(|p| (p / pmax).max(0.0).powf(rr)).collect();
            let gmax = base.iter().zip(upper).map(|(b, h)| h / b).fold(f64::INFINITY, f64::min);
            if !(gmax.is_finite() && gmax > 0.0) {
                continue;
            }
            let mut gamma = gmax;
            for _ in 0..60 {
                let u: Vec<f64> = base.iter().map(|b| gamma * b).collect();
                let (ok, v) = check_lower(&sys, &u, &t);
                if ok {
                    return Ok(LowerSolution {
                        u: ConformalFactor::from_dense(mesh, &u)?,
                        family: "power".into(),
                        gamma,
                        r: rr,
                        m: mm,
                        violation: v,
                    });
                }
                if v.is_finite() {
                    best = best.min(v);
                }
                gamma *= 0.8;
            }
        }
        mm *= 2.0;
    }
    Err(Error::Infeasible(format!("no lower solution below the upper one (smallest violation {best:.3e})")))
}

/// Largest `γ` from `min(upper/φ)` by halving with `γφ` a lower solution.
pub fn scaled_eigenfunction_lower(sys: &NodalSystem, phi: &[f64], target: &[f64], upper: &[f64]) -> Option<(f64, Vec<f64>)> {
    let mut gamma = phi.iter().zip(upper).map(|(p, h)| h / p).fold(f64::INFINITY, f64::min);
    if !(gamma.is_finite() && gamma > 0.0) {
        return None;
    }
    for _ in 0..80 {
        let u: Vec<f64> = phi.iter().map(|p| gamma * p).collect();
        if check_lower(sys, &u, target).0 {
            return Some((gamma, u));
        }
        gamma *= 0.5;
    }
    None
}

/// Smallest power-of-two constant that is an upper solution.
pub fn constant_upper_solution(sys: &NodalSystem, target: &[f64]) -> Option<f64> {
    (-30..=30).map(|j| 2f64.powi(j)).find(|&c| check_upper(sys, &vec![c; sys.dim()], target).0)
}

/// Monotone iteration `(K + Λ)u⁺ = N(u) + Λu` between an ordered pair,
/// followed by Newton steps that stay inside the pair.
pub fn monotone_iteration(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &CurvaturePair,
    lower: &ConformalFactor,
    upper: &ConformalFactor,
    cfg: &SolverConfig,
) -> Result<SolveReport> {
    let sys = NodalSystem::new(mesh, bg)?;
    let t = target_dense(mesh, target)?;
    let (l, h) = (lower.values(), upper.values());
    if let Some(i) = (0..l.len()).find(|&i| l[i] > h[i]) {
        return Err(Error::Precondition(format!(
            "lower solution exceeds upper at vertex {i} ({} > {})",
            l[i], h[i]
        )));
    }
    let (lok, lv) = check_lower(&sys, l, &t);
    if !lok {
        return Err(Error::Precondition(format!("lower inequality fails (worst {lv:.3e})")));
    }
    let (uok, uv) = check_upper(&sys, h, &t);
    if !uok {
        return Err(Error::Precondition(format!("upper inequality fails (worst {uv:.3e})")));
    }
    let mut report = SolveReport::new("monotone", SolveStatus::Diverged);
    report.notes.extend(sys.operators().warnings());

    let n = sys.dim();
    let w = sys.weights();
    let slope = |i: usize, x: f64| w[i] * t[i] * sys.phi(i, x) * sys.log_derivative(i, x);
    let rowsum = sys.k().mul_vec(&vec![1.0; n]);
    let kdiag = sys.k().diagonal();
    let lambda: Vec<f64> = (0..n)
        .map(|i| {
            let need = (-slope(i, l[i])).max(-slope(i, h[i])).max(0.0);
            need + (-rowsum[i]).max(0.0) + 1e-3 * kdiag[i].abs().max(w[i])
        })
        .collect();
    let lu = sys.k().add_diagonal(&lambda).lu()?;

    let mut u = h.to_vec();
    let mut clamped = 0.0f64;
    let mut its = 0;
    while its < cfg.monotone_max_iterations {
        let rhs: Vec<f64> =
            (0..n).map(|i| w[i] * t[i] * sys.phi(i, u[i]) - sys.c()[i] + lambda[i] * u[i]).collect();
        let mut next = lu.solve(&rhs)?;
        for i in 0..n {
            let c = next[i].clamp(l[i], h[i]);
            clamped = clamped.max((c - next[i]).abs());
            next[i] = c;
        }
        let change = next.iter().zip(&u).fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        let size = next.iter().fold(0.0f64, |m, a| m.max(a.abs())).max(1e-300);
        u = next;
        its += 1;
        if change <= 1e-13 * size {
            break;
        }
        if its % 50 == 0 {
            let (ri, rb) = density_residuals(&sys, &u, &t);
            if ri.max(rb) < 1e-3 * cfg.tol {
                break;
            }
        }
    }
    report.iterations = its;
    if clamped > 1e-10 {
        report.notes.push(format!("iterates clamped into the pair by up to {clamped:.3e}"));
    }
    let (ri, rb) = density_residuals(&sys, &u, &t);
    if ri.max(rb) >= cfg.tol {
        let mut polished = u.clone();
        let mut extra = 0;
        newton_iterate(&sys, &mut polished, &t, cfg, false, &mut extra, 50);
        let inside = (0..n).all(|i| polished[i] >= l[i] - 1e-12 * l[i].abs() && polished[i] <= h[i] + 1e-12 * h[i].abs());
        let after = density_residuals(&sys, &polished, &t);
        if inside && after.0.max(after.1) < ri.max(rb) {
            u = polished;
            report.notes.push(format!("Newton polish inside the pair: {extra} steps"));
        }
    }
    report.status = SolveStatus::Converged;
    finish(&mut report, mesh, &sys, &u, &t, cfg.tol)?;
    Ok(report)
}

/// Outcome of the search over constant mean-curvature targets.
#[derive(Clone, Debug, Serialize)]
pub struct KSearch {
    /// Most negative `k` for which the iteration converged.
    pub largest: Option<f64>,
    pub trials: Vec<(f64, bool)>,
}

/// Tries constant boundary targets `H ≡ k < 0` (zero interior target)
/// with `γφ` below and a constant above; `φ` is the boundary eigenfunction
/// of the background.
pub fn k_search(mesh: &Mesh, bg: &BackgroundGeometry, cfg: &SolverConfig) -> Result<KSearch> {
    if bg.n() < 3 {
        return Err(Error::Dimension("needs n >= 3".into()));
    }
    let sys = NodalSystem::new(mesh, bg)?;
    let phi = sigma1(mesh, bg)?.eigenfunction;
    let mut trials = Vec::new();
    let mut largest = None;
    for j in -3..=8 {
        let k = -(2f64.powi(j));
        let target = CurvaturePair::constant(mesh, 0.0, k)?;
        let t = target.to_dense(mesh.num_vertices());
        let ok = (|| {
            let c = constant_upper_solution(&sys, &t)?;
            let upper = vec![c; sys.dim()];
            let (_, lower) = scaled_eigenfunction_lower(&sys, phi.values(), &t, &upper)?;
            let rep = monotone_iteration(
                mesh,
                bg,
                &target,
                &ConformalFactor::from_dense(mesh, &lower).ok()?,
                &ConformalFactor::from_dense(mesh, &upper).ok()?,
                cfg,
            )
            .ok()?;
            Some(rep.converged())
        })()
        .unwrap_or(false);
        if ok {
            largest = Some(k);
        }
        trials.push((k, ok));
    }
    Ok(KSearch { largest, trials })
}

/// `H/√|R| < 1/√(n(n−1))` at every D0 vertex; both fields live on D0 and
/// `R` must be negative there. Returns the verdict and the largest ratio.
pub fn mean_curvature_admissibility(r: &ScalarField, h: &ScalarField, n: usize) -> Result<(bool, f64)> {
    if r.support() != Support::Boundary || h.support() != Support::Boundary || r.len() != h.len() {
        return Err(Error::Field("both fields must live on D0 vertices".into()));
    }
    if r.values().iter().any(|&x| x >= 0.0) {
        return Err(Error::Precondition("R must be negative on the boundary".into()));
    }
    let bound = 1.0 / ((n * (n - 1)) as f64).sqrt();
    let worst = r.values().iter().zip(h.values()).map(|(r, h)| h / r.abs().sqrt()).fold(f64::NEG_INFINITY, f64::max);
    Ok((worst < bound, worst))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn admissibility_ratio() {
        let m = generators::cube(2);
        let r = ScalarField::constant(&m, Support::Boundary, -6.0).unwrap();
        let h = ScalarField::constant(&m, Support::Boundary, 0.9).unwrap();
        let (ok, worst) = mean_curvature_admissibility(&r, &h, 3).unwrap();
        assert!(ok);
        assert!((worst - 0.9 / 6f64.sqrt()).abs() < 1e-15);
        let h = ScalarField::constant(&m, Support::Boundary, 1.1).unwrap();
        assert!(!mean_curvature_admissibility(&r, &h, 3).unwrap().0);
    }

    #[test]
    fn log_power_formula_rejects_bad_parameters() {
        assert!(log_power_lower_solution(&[2.0, 3.0], 0.5, 1.5, 1.0, 3).is_none());
        assert!(log_power_lower_solution(&[2.0, 3.0], 0.5, 0.5, 1.0, 3).is_some());
    }

    #[test]
    fn constant_mean_curvature_pair() {
        let m = generators::cube(3);
        let bg = BackgroundGeometry::constant(&m, 0.0, -1.0).unwrap();
        let sys = NodalSystem::new(&m, &bg).unwrap();
        let target = CurvaturePair::constant(&m, 0.0, -0.5).unwrap();
        let t = target.to_dense(m.num_vertices());
        let c = constant_upper_solution(&sys, &t).unwrap();
        assert!(check_upper(&sys, &vec![c; sys.dim()], &t).0);
        assert!(!check_lower(&sys, &vec![4.0 * c; sys.dim()], &t).0);
    }
}
