//! Necessary conditions, nonexistence certificates and the verdict tree for
//! the four prescription problems.

mod killing;

pub use killing::{affine_fit, kazdan_warner_escobar, KillingField, KillingKind};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::background::BackgroundGeometry;
use crate::error::{Error, Result};
use crate::fem::{CurvaturePair, NeumannSolver, NodalSystem};
use crate::mesh::{Mesh, ScalarField, Shape, Support};
use crate::prescribe::{
    changes_sign, eigenfunction_lower_solution, identically_zero, minimize_constrained, monotone_iteration,
    newton_solve, potential_upper_solution, solve_auxiliary_linear, AuxiliaryKind, ConformalFactor, Side,
    SolveReport, SolverConfig,
};
use crate::spectral::{lambda1, sigma1, SignClass};

/// Sup-norm below which a background curvature counts as vanishing.
const ZERO_CURVATURE: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Exists,
    NotExists,
    Unknown,
}

/// `PC`/`PC0`: pointwise conformal with prescribed interior (resp.
/// boundary) curvature and zero curvature on the other side. `CE`/`CE0`:
/// the same up to a diffeomorphism.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Problem {
    PC,
    PC0,
    CE,
    CE0,
}

impl Problem {
    pub fn side(self) -> Side {
        match self {
            Self::PC | Self::CE => Side::Interior,
            Self::PC0 | Self::CE0 => Side::Boundary,
        }
    }

    pub fn pointwise(self) -> bool {
        matches!(self, Self::PC | Self::PC0)
    }

    pub fn support(self) -> Support {
        match self.side() {
            Side::Interior => Support::Interior,
            Side::Boundary => Support::Boundary,
        }
    }

    /// Curvature pair with `target` on this problem's side and zero on the other.
    pub fn target_pair(self, mesh: &Mesh, target: &ScalarField) -> Result<CurvaturePair> {
        match self.side() {
            Side::Interior => CurvaturePair::new(target.clone(), ScalarField::constant(mesh, Support::Boundary, 0.0)?),
            Side::Boundary => CurvaturePair::new(ScalarField::constant(mesh, Support::Interior, 0.0)?, target.clone()),
        }
    }
}

impl std::str::FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "PC" => Ok(Self::PC),
            "PC0" => Ok(Self::PC0),
            "CE" => Ok(Self::CE),
            "CE0" => Ok(Self::CE0),
            _ => Err(Error::Precondition(format!("unknown problem {s:?} (PC, PC0, CE, CE0)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ObstructionVerdict {
    pub problem: Problem,
    pub verdict: Verdict,
    pub theorem: String,
    pub witnesses: BTreeMap<String, f64>,
    /// Names of witnesses recording a violated necessary condition.
    pub violated: Vec<String>,
    pub assumptions_checked: Vec<String>,
    pub report: Option<SolveReport>,
}

impl ObstructionVerdict {
    fn new(problem: Problem) -> Self {
        Self {
            problem,
            verdict: Verdict::Unknown,
            theorem: String::new(),
            witnesses: BTreeMap::new(),
            violated: Vec::new(),
            assumptions_checked: Vec::new(),
            report: None,
        }
    }

    fn witness(&mut self, name: &str, value: f64) {
        self.witnesses.insert(name.to_string(), value);
    }

    fn flag(&mut self, name: &str, value: bool) {
        self.witness(name, if value { 1.0 } else { 0.0 });
    }

    fn note(&mut self, s: impl Into<String>) {
        self.assumptions_checked.push(s.into());
    }

    fn decide(mut self, verdict: Verdict, theorem: impl Into<String>) -> Self {
        self.verdict = verdict;
        self.theorem = theorem.into();
        self
    }

    fn not_exists(mut self, theorem: impl Into<String>, violated: &str) -> Self {
        self.violated.push(violated.to_string());
        self.decide(Verdict::NotExists, theorem)
    }

    /// Attaches a solver report. A report that did not converge is kept
    /// only on Unknown verdicts.
    fn attach(&mut self, report: SolveReport) {
        self.witness("solver_residual", report.max_residual());
        self.note(format!("{} solver finished with status {:?}", report.method, report.status));
        if report.converged() || self.verdict == Verdict::Unknown {
            self.report = Some(report);
        } else {
            self.note("report withheld: the discrete solve did not reach tolerance");
        }
    }
}

/// Sign predicate for a conformal class of the given sign: negative
/// somewhere / changes sign or vanishes identically / positive somewhere.
/// Uses the dead-band `1e-12·‖t‖∞`.
pub fn sign_class_condition(class: SignClass, values: &[f64]) -> bool {
    let band = 1e-12 * values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    match class {
        SignClass::Neg => values.iter().any(|&v| v < -band),
        SignClass::Zero => identically_zero(values) || changes_sign(values),
        SignClass::Pos => values.iter().any(|&v| v > band),
    }
}

/// The Euler-characteristic sign condition on a surface.
pub fn sign_condition(chi: i64, target: &ScalarField) -> bool {
    let class = match chi.signum() {
        1 => SignClass::Pos,
        0 => SignClass::Zero,
        _ => SignClass::Neg,
    };
    sign_class_condition(class, target.values())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IntegralCondition {
    pub value: f64,
    pub pass: bool,
}

fn side_of(target: &ScalarField) -> Result<Side> {
    match target.support() {
        Support::Boundary => Ok(Side::Boundary),
        Support::Interior => Ok(Side::Interior),
        Support::All => Err(Error::Field("target must live on interior or D0 vertices".into())),
    }
}

/// Background potential `v` with `S v = c − (Σc) m/Σm` (`m` the mass on the
/// prescribed side), normalized to mean zero.
fn background_potential(sys: &NodalSystem, side: Side) -> Result<Vec<f64>> {
    let ops = sys.operators();
    let c = sys.c();
    if c.iter().all(|&x| x == 0.0) {
        return Ok(vec![0.0; c.len()]);
    }
    let m = match side {
        Side::Boundary => &ops.mass_boundary,
        Side::Interior => &ops.mass_interior,
    };
    NeumannSolver::new(&ops.stiffness, &ops.vertex_mass)?.solve_projected(c, m)
}

/// Integral necessary conditions that apply to `target` (lumped quadrature):
/// `total_curvature` is `∫ t`, and on surfaces `weighted_integral` is
/// `∫ t e^{−p v}` against the background potential (`p = 1` on the
/// boundary, `2` inside). Every condition passes for an identically zero
/// target.
pub fn integral_conditions(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    side: Side,
) -> Result<BTreeMap<String, IntegralCondition>> {
    if side_of(target)? != side {
        return Err(Error::Field(format!("target support does not match side {side:?}")));
    }
    let sys = NodalSystem::new(mesh, bg)?;
    let ops = sys.operators();
    let nv = mesh.num_vertices();
    let t = target.to_dense(nv);
    let (m, p) = match side {
        Side::Boundary => (&ops.mass_boundary, 1.0),
        Side::Interior => (&ops.mass_interior, 2.0),
    };
    let zero = identically_zero(target.values());
    let cond = |value: f64| IntegralCondition { value, pass: zero || value < 0.0 };
    let mut out = BTreeMap::new();
    out.insert("total_curvature".to_string(), cond((0..nv).map(|i| m[i] * t[i]).sum()));
    if bg.n() == 2 {
        let v = background_potential(&sys, side)?;
        let w: f64 = (0..nv).map(|i| m[i] * t[i] * (-p * v[i]).exp()).sum();
        out.insert("weighted_integral".to_string(), cond(w));
    }
    if zero {
        out.insert("identically_zero".to_string(), IntegralCondition { value: 1.0, pass: true });
    }
    Ok(out)
}

fn constant_value(f: &ScalarField) -> Option<f64> {
    if f.is_empty() {
        return Some(0.0);
    }
    let (lo, hi) = (f.min(), f.max());
    ((hi - lo) <= 1e-10 * hi.abs().max(lo.abs()).max(1.0)).then_some(0.5 * (lo + hi))
}

/// Solves the linear problem whose positivity is necessary on a
/// constant-negative-curvature background: the Robin problem with `κ₀`
/// (or `H₀`) for boundary targets, the Helmholtz problem with `K₀` (or
/// `R₀/(n−1)`, data scaled by `1/(n−1)`) for interior targets. Returns
/// `(min φ > 0, φ)`.
pub fn positivity_witness(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    side: Side,
) -> Result<(bool, ScalarField)> {
    if side_of(target)? != side {
        return Err(Error::Field(format!("target support does not match side {side:?}")));
    }
    let (own, other) = match side {
        Side::Boundary => (bg.boundary(), bg.interior()),
        Side::Interior => (bg.interior(), bg.boundary()),
    };
    let c0 = constant_value(own)
        .filter(|c| *c < 0.0)
        .ok_or_else(|| Error::Precondition("background curvature on the prescribed side must be a negative constant".into()))?;
    if other.max_abs() > ZERO_CURVATURE {
        return Err(Error::Precondition("background curvature on the other side must vanish".into()));
    }
    let (phi, positive) = match side {
        Side::Boundary => solve_auxiliary_linear(mesh, AuxiliaryKind::BoundaryRobin { kappa0: c0 }, target)?,
        Side::Interior => {
            let s = if bg.n() == 2 { 1.0 } else { (bg.n() - 1) as f64 };
            solve_auxiliary_linear(mesh, AuxiliaryKind::InteriorHelmholtz { k0: c0 / s }, &target.map(|x| x / s))?
        }
    };
    Ok((positive, phi))
}

#[derive(Clone, Debug)]
pub struct DispatchOptions {
    /// Run the matching solver in constructive branches.
    pub solve: bool,
    pub cfg: SolverConfig,
    /// Overrides the default ZERO-classification tolerance of the
    /// eigenvalue that fixes the conformal class (n ≥ 3).
    pub eigen_tol: Option<f64>,
}

impl Default for DispatchOptions {
    fn default() -> Self {
        Self { solve: true, cfg: SolverConfig::default(), eigen_tol: None }
    }
}

fn part(side: Side) -> &'static str {
    match side {
        Side::Boundary => "a",
        Side::Interior => "b",
    }
}

/// Routes a target through the known criteria and returns a verdict. A
/// violated necessary condition always yields NotExists; Exists is only
/// returned when a theorem's hypotheses are verified.
pub fn trichotomy_dispatch(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    problem: Problem,
    opts: &DispatchOptions,
) -> Result<ObstructionVerdict> {
    if target.support() != problem.support() {
        return Err(Error::Field(format!("{problem:?} needs a target on {:?} vertices", problem.support())));
    }
    if target.is_empty() {
        return Err(Error::Field("target has no vertices".into()));
    }
    if bg.n() == 2 {
        surface_dispatch(mesh, bg, target, problem, opts)
    } else {
        higher_dispatch(mesh, bg, target, problem, opts)
    }
}

fn other_side_vanishes(bg: &BackgroundGeometry, side: Side) -> bool {
    match side {
        Side::Boundary => bg.interior().max_abs() <= ZERO_CURVATURE,
        Side::Interior => bg.boundary().max_abs() <= ZERO_CURVATURE,
    }
}

/// Newton from the identity factor.
fn newton_from_identity(mesh: &Mesh, bg: &BackgroundGeometry, target: &ScalarField, problem: Problem, cfg: &SolverConfig) -> Result<SolveReport> {
    newton_solve(mesh, bg, &problem.target_pair(mesh, target)?, &ConformalFactor::identity(mesh)?, cfg)
}

/// Affine-data obstruction on a round disk or ball whose background has
/// zero interior curvature and constant positive boundary curvature.
fn affine_obstruction(mesh: &Mesh, bg: &BackgroundGeometry, target: &ScalarField, v: &mut ObstructionVerdict) -> Result<bool> {
    let round = matches!(mesh.shape(), Shape::RoundBall { .. } | Shape::RoundDisk { .. });
    let model = bg.interior().max_abs() <= ZERO_CURVATURE && constant_value(bg.boundary()).is_some_and(|c| c > 0.0);
    if !round || !model {
        return Ok(false);
    }
    v.note("round ball or disk with model background");
    let (a, _, resid) = affine_fit(mesh, target)?;
    let scale = target.max_abs().max(1e-300);
    let norm = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.witness("affine_fit_residual", resid);
    v.witness("linear_part_norm", norm);
    if resid > 1e-9 * scale || norm <= 1e-9 * scale {
        return Ok(false);
    }
    v.note("target is affine with nonzero linear part");
    let x = KillingField::conformal_translation(mesh, a)?;
    let kwe = kazdan_warner_escobar(mesh, target, &x)?;
    v.witness("kazdan_warner_escobar", kwe);
    let h = mesh.mesh_size();
    Ok(kwe.abs() > 1e-8 * norm * norm + h * h * norm * norm)
}

/// Positivity witness on a background with constant negative curvature on
/// the prescribed side. Returns a final verdict when the witness decides or
/// the background is not a consistent surface metric.
fn constant_negative_witness(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    problem: Problem,
    opts: &DispatchOptions,
    v: &mut ObstructionVerdict,
    consistent: bool,
) -> Result<Option<ObstructionVerdict>> {
    let side = problem.side();
    let (pos, phi) = match positivity_witness(mesh, bg, target, side) {
        Ok(x) => x,
        Err(Error::Precondition(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let thm = format!("Proposition 3.4({}) (positivity witness)", part(side));
    v.note("constant negative background curvature on the prescribed side");
    let total = integral_conditions(mesh, bg, target, side)?["total_curvature"];
    v.witness("total_curvature", total.value);
    v.witness("auxiliary_minimum", phi.min());
    v.flag("auxiliary_positive", pos);
    if !total.pass {
        return Ok(Some(v.clone().not_exists(thm, "total_curvature")));
    }
    if !pos {
        return Ok(Some(v.clone().not_exists(thm, "auxiliary_positive")));
    }
    if consistent {
        return Ok(None);
    }
    let mut out = v.clone().decide(Verdict::Unknown, thm);
    if opts.solve {
        out.attach(newton_from_identity(mesh, bg, target, problem, &opts.cfg)?);
    }
    Ok(Some(out))
}

fn surface_dispatch(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    problem: Problem,
    opts: &DispatchOptions,
) -> Result<ObstructionVerdict> {
    let side = problem.side();
    let mut v = ObstructionVerdict::new(problem);
    let chi = mesh.euler_characteristic()?;
    v.witness("euler_characteristic", chi as f64);
    let sys = NodalSystem::new(mesh, bg)?;
    let total: f64 = sys.c().iter().sum();
    let gb_scale = 1.0 + sys.c().iter().map(|x| x.abs()).sum::<f64>();
    v.witness("background_total_curvature", total);
    let consistent = (total - 2.0 * std::f64::consts::PI * chi as f64).abs() <= 1e-8 * gb_scale;
    let (sign_ok, sign_thm) = if consistent {
        (sign_condition(chi, target), "Eq. (1) (Gauss-Bonnet sign condition)")
    } else {
        v.note("background total curvature differs from 2πχ; the sign condition uses the background total");
        let class = crate::spectral::classify_sign(total, 1e-10 * gb_scale);
        (sign_class_condition(class, target.values()), "integrated transformation law (sign of the background total)")
    };
    v.flag("sign_condition", sign_ok);
    let model = other_side_vanishes(bg, side);
    v.note(format!(
        "background {} curvature {}",
        if side == Side::Boundary { "Gaussian" } else { "geodesic" },
        if model { "vanishes" } else { "does not vanish" }
    ));
    if !sign_ok {
        return Ok(v.not_exists(sign_thm, "sign_condition"));
    }
    if !problem.pointwise() {
        v.note("conformally equivalent class: verdict from the sign predicate only, no diffeomorphism is constructed");
        return Ok(if model && consistent {
            v.decide(Verdict::Exists, format!("Theorem 1.1({})", part(side)))
        } else {
            v.decide(Verdict::Unknown, "Theorem 1.1 (hypothesis on the background not met)")
        });
    }
    if !model {
        return Ok(v.decide(Verdict::Unknown, sign_thm));
    }
    if let Some(v) = constant_negative_witness(mesh, bg, target, problem, opts, &mut v, consistent)? {
        return Ok(v);
    }
    if !consistent {
        return Ok(v.decide(Verdict::Unknown, sign_thm));
    }
    let p = if side == Side::Boundary { 1.0 } else { 2.0 };
    let conds = integral_conditions(mesh, bg, target, side)?;
    for (k, c) in &conds {
        v.witness(k, c.value);
    }
    let weighted = conds["weighted_integral"];
    let zero = identically_zero(target.values());

    if chi == 0 {
        let thm = format!("Theorem 3.2({})", part(side));
        if !weighted.pass {
            return Ok(v.not_exists(thm, "weighted_integral"));
        }
        v.note(if zero { "target vanishes identically" } else { "target changes sign with negative weighted integral" });
        let mut v = v.decide(Verdict::Exists, thm);
        if opts.solve {
            match minimize_constrained(mesh, bg, target, side, &opts.cfg) {
                Ok(r) => {
                    if let Some((_, l2)) = r.multipliers {
                        v.witness("lambda2", l2);
                    }
                    v.attach(r)
                }
                Err(e) => v.note(format!("constrained solver error: {e}")),
            }
        }
        return Ok(v);
    }

    if chi < 0 {
        let (thm_a, thm_c) = match side {
            Side::Boundary => ("Theorem 3.3(a)", "Theorem 3.3(c)"),
            Side::Interior => ("Theorem 3.4(a)", "Theorem 3.4(c)"),
        };
        if !weighted.pass {
            return Ok(v.not_exists(thm_a, "weighted_integral"));
        }
        let ops = sys.operators();
        let pot = background_potential(&sys, side)?;
        let m = if side == Side::Boundary { &ops.mass_boundary } else { &ops.mass_interior };
        let mean = sys.c().iter().sum::<f64>() / m.iter().sum::<f64>();
        v.witness("background_mean_curvature", mean);
        let data = ScalarField::new(
            mesh,
            target.support(),
            target.iter().map(|(i, t)| t * (-p * pot[i]).exp()).collect(),
        )?;
        let kind = match side {
            Side::Boundary => AuxiliaryKind::BoundaryRobin { kappa0: mean },
            Side::Interior => AuxiliaryKind::InteriorHelmholtz { k0: mean },
        };
        let (phi, positive) = solve_auxiliary_linear(mesh, kind, &data)?;
        v.witness("auxiliary_minimum", phi.min());
        v.flag("auxiliary_positive", positive);
        if !positive {
            return Ok(v.not_exists(thm_a, "auxiliary_positive"));
        }
        if !opts.solve {
            return Ok(v.decide(Verdict::Unknown, thm_a));
        }
        let r = newton_from_identity(mesh, bg, target, problem, &opts.cfg)?;
        if r.converged() {
            v.note("converged solution serves as the upper solution, small constants as lower solutions");
            let mut v = v.decide(Verdict::Exists, thm_c);
            v.attach(r);
            return Ok(v);
        }
        let mut v = v.decide(Verdict::Unknown, thm_a);
        v.attach(r);
        return Ok(v);
    }

    if side == Side::Boundary && affine_obstruction(mesh, bg, target, &mut v)? {
        return Ok(v.not_exists("Section 4.2.3 (Kazdan-Warner-Escobar identity)", "kazdan_warner_escobar"));
    }
    let thm = match side {
        Side::Boundary => "Theorem 3.5(a)",
        Side::Interior => "Theorem 3.6(a)",
    };
    v.note("positive characteristic: no decisive criterion beyond the sign condition");
    Ok(v.decide(Verdict::Unknown, thm))
}

fn class_index(c: SignClass) -> usize {
    match c {
        SignClass::Neg => 0,
        SignClass::Zero => 1,
        SignClass::Pos => 2,
    }
}

fn higher_dispatch(
    mesh: &Mesh,
    bg: &BackgroundGeometry,
    target: &ScalarField,
    problem: Problem,
    opts: &DispatchOptions,
) -> Result<ObstructionVerdict> {
    let side = problem.side();
    let mut v = ObstructionVerdict::new(problem);
    let eig = match side {
        Side::Boundary => sigma1(mesh, bg)?,
        Side::Interior => lambda1(mesh, bg)?,
    };
    let eig = match opts.eigen_tol {
        Some(t) => eig.with_tolerance(t),
        None => eig,
    };
    let name = if side == Side::Boundary { "sigma1" } else { "lambda1" };
    v.witness(name, eig.value);
    v.witness("eigen_tolerance", eig.tolerance);
    v.note(format!("{name} classified {:?}", eig.sign_class));
    let class = eig.sign_class;
    let ce_thm = format!("Theorem {}({})", ["4.3", "4.4", "4.5"][class_index(class)], part(side));
    let sign_ok = sign_class_condition(class, target.values());
    v.flag("sign_condition", sign_ok);
    if !sign_ok {
        return Ok(v.not_exists(ce_thm, "sign_condition"));
    }
    if !problem.pointwise() {
        v.note("conformally equivalent class: verdict from the sign predicate only, no diffeomorphism is constructed");
        return Ok(v.decide(Verdict::Exists, ce_thm));
    }
    let conds = integral_conditions(mesh, bg, target, side)?;
    let total = conds["total_curvature"];
    v.witness("total_curvature", total.value);

    match class {
        SignClass::Neg => {
            let thm = format!("Proposition 4.3({})", part(side));
            let (pos, phi) = match positivity_witness(mesh, bg, target, side) {
                Ok(x) => x,
                Err(Error::Precondition(why)) => {
                    v.note(format!("positivity test skipped: {why}"));
                    return Ok(v.decide(Verdict::Unknown, ce_thm));
                }
                Err(e) => return Err(e),
            };
            v.note("constant negative background on the prescribed side, zero on the other");
            if !total.pass {
                return Ok(v.not_exists(thm, "total_curvature"));
            }
            v.witness("auxiliary_minimum", phi.min());
            v.flag("auxiliary_positive", pos);
            if !pos {
                return Ok(v.not_exists(thm, "auxiliary_positive"));
            }
            let mut v = v.decide(Verdict::Unknown, thm);
            if opts.solve {
                v.attach(newton_from_identity(mesh, bg, target, problem, &opts.cfg)?);
            }
            Ok(v)
        }
        SignClass::Zero => {
            let thm = format!("Theorem 4.8({})", part(side));
            if bg.sup_norm() > ZERO_CURVATURE {
                v.note("background is not scalar-flat with minimal boundary; integral test skipped");
                return Ok(v.decide(Verdict::Unknown, ce_thm));
            }
            v.note("scalar-flat background with minimal boundary");
            if !total.pass {
                return Ok(v.not_exists(thm, "total_curvature"));
            }
            let mut v = v.decide(Verdict::Exists, thm);
            if opts.solve && !identically_zero(target.values()) {
                let r = match side {
                    Side::Interior => sub_super_pipeline(mesh, bg, target, &opts.cfg)?,
                    Side::Boundary => newton_from_identity(mesh, bg, target, problem, &opts.cfg)?,
                };
                v.attach(r);
            }
            Ok(v)
        }
        SignClass::Pos => {
            if side == Side::Boundary && affine_obstruction(mesh, bg, target, &mut v)? {
                return Ok(v.not_exists("Section 4.2.3 (Kazdan-Warner-Escobar identity)", "kazdan_warner_escobar"));
            }
            v.note("positive class: no decisive criterion beyond the sign condition");
            Ok(v.decide(Verdict::Unknown, ce_thm))
        }
    }
}

/// Upper solution from the potential, eigenfunction lower solution and
/// monotone iteration, with Newton as the fallback.
pub fn sub_super_pipeline(mesh: &Mesh, bg: &BackgroundGeometry, r: &ScalarField, cfg: &SolverConfig) -> Result<SolveReport> {
    let target = Problem::PC.target_pair(mesh, r)?;
    let mut notes = Vec::new();
    let mut start = ConformalFactor::identity(mesh)?;
    match potential_upper_solution(mesh, bg, r, cfg) {
        Ok(up) => {
            notes.push(format!("upper solution: {:?} form, eps {:.3e}", up.form, up.eps));
            match eigenfunction_lower_solution(mesh, bg, r, up.u.values()) {
                Ok(lo) => {
                    notes.push(format!("lower solution: {} family", lo.family));
                    match monotone_iteration(mesh, bg, &target, &lo.u, &up.u, cfg) {
                        Ok(rep) if rep.converged() => {
                            let mut rep = rep;
                            rep.notes.splice(0..0, notes);
                            return Ok(rep);
                        }
                        Ok(rep) => notes.push(format!("monotone iteration ended {:?}", rep.status)),
                        Err(e) => notes.push(format!("monotone iteration: {e}")),
                    }
                }
                Err(e) => notes.push(format!("lower solution: {e}")),
            }
            start = up.u;
        }
        Err(e) => notes.push(format!("upper solution: {e}")),
    }
    notes.push("falling back to Newton".into());
    let mut rep = newton_solve(mesh, bg, &target, &start, cfg)?;
    rep.notes.splice(0..0, notes);
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::generators;

    #[test]
    fn sign_condition_examples() {
        let m = generators::disk(3);
        let pos = ScalarField::from_fn(&m, Support::Boundary, |_, p| p[0]).unwrap();
        assert!(sign_condition(1, &pos));
        let one = ScalarField::constant(&m, Support::Boundary, 1.0).unwrap();
        assert!(!sign_condition(0, &one));
        assert!(!sign_condition(-1, &one));
        assert!(sign_condition(-1, &one.map(|x| -x)));
        assert!(sign_condition(0, &one.map(|_| 0.0)));
    }

    #[test]
    fn positive_constant_fails_total_integral() {
        let m = generators::cube(2);
        let bg = BackgroundGeometry::flat(&m).unwrap();
        let r = ScalarField::constant(&m, Support::Interior, 1.0).unwrap();
        let c = integral_conditions(&m, &bg, &r, Side::Interior).unwrap();
        let t = c["total_curvature"];
        assert!(!t.pass && t.value > 0.0);
    }

    #[test]
    fn zero_target_passes_everything() {
        let m = generators::annulus(1.0, 2.0, 16, 3);
        let bg = BackgroundGeometry::intrinsic(&m).unwrap();
        let k = ScalarField::constant(&m, Support::Boundary, 0.0).unwrap();
        let c = integral_conditions(&m, &bg, &k, Side::Boundary).unwrap();
        assert!(c.values().all(|c| c.pass));
        assert_eq!(c["total_curvature"].value, 0.0);
    }

    #[test]
    fn constant_robin_witness_is_one() {
        let m = generators::disk(4);
        let bg = BackgroundGeometry::constant(&m, 0.0, -1.0).unwrap();
        let k = ScalarField::constant(&m, Support::Boundary, -1.0).unwrap();
        let (pos, phi) = positivity_witness(&m, &bg, &k, Side::Boundary).unwrap();
        assert!(pos);
        assert!(phi.values().iter().all(|v| (v - 1.0).abs() < 1e-10));
    }

    #[test]
    fn ce0_negative_class_needs_negative_values() {
        let m = generators::cube(6);
        let bg = BackgroundGeometry::constant(&m, 0.0, -1.0).unwrap();
        let h = ScalarField::constant(&m, Support::Boundary, 0.5).unwrap();
        let v = trichotomy_dispatch(&m, &bg, &h, Problem::CE0, &DispatchOptions::default()).unwrap();
        assert_eq!(v.verdict, Verdict::NotExists, "{:?}", v.witnesses);
        assert_eq!(v.theorem, "Theorem 4.3(a)");
        assert!(!v.violated.is_empty());
    }

    #[test]
    fn wrong_support_rejected() {
        let m = generators::disk(3);
        let bg = BackgroundGeometry::intrinsic(&m).unwrap();
        let k = ScalarField::constant(&m, Support::Interior, 1.0).unwrap();
        assert!(trichotomy_dispatch(&m, &bg, &k, Problem::PC0, &DispatchOptions::default()).is_err());
    }
}
