//! Subcommand bodies and report emission.

use std::fs;
use std::path::{Path, PathBuf};

use prescribed_curvature::background::BackgroundGeometry;
use prescribed_curvature::fem::{assemble_operators, CurvaturePair, NodalSystem};
use prescribed_curvature::mesh::{io, Mesh, ScalarField, Support};
use prescribed_curvature::obstructions::{sub_super_pipeline, trichotomy_dispatch, DispatchOptions, ObstructionVerdict, Problem};
use prescribed_curvature::prescribe::{
    minimize_constrained, minimize_subcritical, newton_solve, ConformalFactor, Side, SolveReport,
};
use prescribed_curvature::sparse::SparseMatrix;
use prescribed_curvature::spectral::{classify_sign, lambda1, mu1_domain, sigma1, sigma1_domain, EigenResult, SignClass};
use prescribed_curvature::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::{Method, ProblemConfig};
use crate::CliError;

/// Command-line overrides applied on top of the config file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub method: Option<Method>,
    pub resolution: Option<usize>,
    pub dump_matrices: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenChoice {
    /// `λ₁(L_g)` for n ≥ 3, `σ₁(B_g)` when only boundary data is prescribed.
    Auto,
    Lambda1,
    Sigma1,
    /// `σ₁` of `∂/∂η + h` with `h` the target.
    Sigma1Domain,
    /// `μ₁` of `−Δ + f` with `f` the target.
    Mu1Domain,
}

impl std::str::FromStr for EigenChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s {
            "auto" => Self::Auto,
            "lambda1" => Self::Lambda1,
            "sigma1" => Self::Sigma1,
            "sigma1_domain" => Self::Sigma1Domain,
            "mu1_domain" => Self::Mu1Domain,
            _ => return Err(format!("unknown eigenproblem `{s}`")),
        })
    }
}

#[derive(Clone, Copy, Debug)]
pub enum Command {
    Classify,
    Eigen(EigenChoice),
    Check,
    Solve,
    Run,
}

/// Everything a subcommand needs, built from the config.
pub struct Context {
    pub cfg: ProblemConfig,
    pub mesh: Mesh,
    pub bg: BackgroundGeometry,
    pub target: ScalarField,
    pub out: PathBuf,
    pub dump_matrices: bool,
}

fn core_err(e: Error) -> CliError {
    match e {
        Error::Dimension(_) | Error::Field(_) | Error::Parse { .. } | Error::NotRoundBall => CliError::Config(e.to_string()),
        _ => CliError::Solver(e.to_string()),
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("cannot write {}: {e}", path.display()))
}

impl Context {
    pub fn new(mut cfg: ProblemConfig, ov: &Overrides) -> Result<Self, CliError> {
        if let Some(s) = ov.seed {
            cfg.seed = s;
        }
        if let Some(t) = ov.tol {
            if !(t > 0.0) {
                return Err(CliError::Config(format!("tolerance must be positive, got {t}")));
            }
            cfg.solver.tol = t;
        }
        if let Some(m) = ov.method {
            cfg.method = m;
        }
        if let Some(r) = ov.resolution {
            cfg.mesh.resolution = Some(r);
        }
        let out = ov.out.clone().unwrap_or_else(|| cfg.output_dir());
        let mut mesh = cfg.build_mesh()?;
        if cfg.mesh.jitter > 0.0 {
            mesh = jitter(&mesh, cfg.mesh.jitter, cfg.seed)?;
        }
        let bg = cfg.build_background(&mesh)?;
        let target = cfg.build_target(&mesh)?;
        Ok(Self { cfg, mesh, bg, target, out, dump_matrices: ov.dump_matrices })
    }

    fn write(&self, rel: &str, contents: &str) -> Result<PathBuf, CliError> {
        let path = self.out.join(rel);
        if let Some(dir) = path.parent() {
            fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
        }
        fs::write(&path, contents).map_err(|e| io_err(&path, e))?;
        Ok(path)
    }

    fn write_json(&self, rel: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Solver(e.to_string()))?;
        self.write(rel, &(text + "\n"))
    }

    fn options(&self, solve: bool) -> DispatchOptions {
        DispatchOptions { solve, cfg: self.cfg.solver.clone(), eigen_tol: self.cfg.eigen_tol }
    }

    fn input(&self) -> InputSummary {
        InputSummary {
            problem: self.cfg.problem,
            target: self.cfg.target.clone(),
            target_parsed: self.cfg.target_expr().map(|e| e.to_string()).unwrap_or_default(),
            method: self.cfg.method,
            seed: self.cfg.seed,
            dimension: self.mesh.dim(),
            vertices: self.mesh.num_vertices(),
            cells: self.mesh.num_cells(),
            boundary_facets: self.mesh.num_facets(),
        }
    }
}

/// Moves interior vertices by up to `amplitude` times the mesh size, with
/// a seeded generator.
pub fn jitter(mesh: &Mesh, amplitude: f64, seed: u64) -> Result<Mesh, CliError> {
    if mesh.dim() != mesh.coord_dim() {
        return Err(CliError::Config("jitter only applies to flat meshes".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let h = mesh.mesh_size();
    let mut v = mesh.vertices().to_vec();
    for (i, p) in v.iter_mut().enumerate() {
        for c in p.iter_mut().take(mesh.dim()) {
            let d = rng.random_range(-1.0..1.0) * amplitude * h;
            if !mesh.is_boundary_vertex(i) {
                *c += d;
            }
        }
    }
    let cells: Vec<usize> = (0..mesh.num_cells()).flat_map(|c| mesh.cell(c).to_vec()).collect();
    let built = if mesh.dim() == 2 {
        let tris: Vec<[usize; 3]> = cells.chunks(3).map(|c| [c[0], c[1], c[2]]).collect();
        Mesh::triangles(v, mesh.coord_dim(), &tris)
    } else {
        let tets: Vec<[usize; 4]> = cells.chunks(4).map(|c| [c[0], c[1], c[2], c[3]]).collect();
        Mesh::tetrahedra(v, &tets)
    };
    let m = built.and_then(|m| m.with_tags(mesh.tags().to_vec())).map_err(|e| CliError::Config(format!("jitter: {e}")))?;
    Ok(m.with_shape(mesh.shape()))
}

#[derive(Serialize)]
struct InputSummary {
    problem: Problem,
    target: String,
    target_parsed: String,
    method: Method,
    seed: u64,
    dimension: usize,
    vertices: usize,
    cells: usize,
    boundary_facets: usize,
}

#[derive(Serialize)]
struct VerdictFile<'a> {
    input: InputSummary,
    #[serde(flatten)]
    verdict: &'a ObstructionVerdict,
}

#[derive(Serialize)]
struct ReportFile<'a> {
    input: InputSummary,
    #[serde(flatten)]
    report: &'a SolveReport,
    u: Option<&'static str>,
}

#[derive(Clone, Debug, Serialize)]
pub struct EigenSummary {
    pub kind: String,
    pub value: f64,
    pub sign_class: SignClass,
    pub tolerance: f64,
    pub eigenfunction: Option<String>,
}

impl EigenSummary {
    fn from(e: &EigenResult, csv: Option<&str>) -> Self {
        let kind = serde_json::to_value(e.kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        Self { kind, value: e.value, sign_class: e.sign_class, tolerance: e.tolerance, eigenfunction: csv.map(String::from) }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub dimension: usize,
    pub euler_characteristic: Option<i64>,
    /// Sign of `χ` for surfaces.
    pub chi_sign: Option<SignClass>,
    /// Integrated background curvature, interior plus boundary.
    pub background_total: f64,
    pub lambda1: Option<EigenSummary>,
    pub sigma1: Option<EigenSummary>,
    /// Whether `λ₁` and `σ₁` fall in the same sign class.
    pub classes_agree: Option<bool>,
}

fn retol(e: EigenResult, tol: Option<f64>) -> EigenResult {
    match tol {
        Some(t) => e.with_tolerance(t),
        None => e,
    }
}

pub fn classify(ctx: &Context) -> Result<Classification, CliError> {
    let sys = NodalSystem::new(&ctx.mesh, &ctx.bg).map_err(core_err)?;
    let chi = ctx.bg.euler_characteristic();
    let n = ctx.bg.n();
    let (mut l1, mut s1) = (None, None);
    if n >= 3 {
        let e = retol(lambda1(&ctx.mesh, &ctx.bg).map_err(core_err)?, ctx.cfg.eigen_tol);
        l1 = Some(EigenSummary::from(&e, None));
        if !ctx.mesh.support_vertices(Support::Boundary).is_empty() {
            let e = retol(sigma1(&ctx.mesh, &ctx.bg).map_err(core_err)?, ctx.cfg.eigen_tol);
            s1 = Some(EigenSummary::from(&e, None));
        }
    }
    let classes_agree = match (&l1, &s1) {
        (Some(a), Some(b)) => Some(a.sign_class == b.sign_class),
        _ => None,
    };
    Ok(Classification {
        dimension: n,
        euler_characteristic: chi,
        chi_sign: if n == 2 { chi.map(|c| classify_sign(c as f64, 0.5)) } else { None },
        background_total: sys.c().iter().sum(),
        lambda1: l1,
        sigma1: s1,
        classes_agree,
    })
}

pub fn eigen(ctx: &Context, choice: EigenChoice) -> Result<EigenSummary, CliError> {
    let (m, bg, t) = (&ctx.mesh, &ctx.bg, &ctx.target);
    let needs = |s: Support| {
        if t.support() == s {
            Ok(())
        } else {
            Err(CliError::Config(format!("this eigenproblem takes the target on {s:?} vertices")))
        }
    };
    let choice = match choice {
        EigenChoice::Auto if ctx.cfg.problem.side() == Side::Boundary => EigenChoice::Sigma1,
        EigenChoice::Auto => EigenChoice::Lambda1,
        c => c,
    };
    let e = match choice {
        EigenChoice::Lambda1 | EigenChoice::Auto => lambda1(m, bg),
        EigenChoice::Sigma1 => sigma1(m, bg),
        EigenChoice::Sigma1Domain => {
            needs(Support::Boundary)?;
            sigma1_domain(m, t)
        }
        EigenChoice::Mu1Domain => {
            needs(Support::Interior)?;
            mu1_domain(m, t)
        }
    }
    .map_err(core_err)?;
    let e = retol(e, ctx.cfg.eigen_tol);
    let csv = "fields/eigenfunction.csv";
    ctx.write(csv, &e.eigenfunction.to_csv())?;
    let s = EigenSummary::from(&e, Some(csv));
    ctx.write_json("eigen.json", &s)?;
    Ok(s)
}

pub fn check(ctx: &Context, solve: bool) -> Result<ObstructionVerdict, CliError> {
    let v = trichotomy_dispatch(&ctx.mesh, &ctx.bg, &ctx.target, ctx.cfg.problem, &ctx.options(solve)).map_err(core_err)?;
    ctx.write_json("verdict.json", &VerdictFile { input: ctx.input(), verdict: &v })?;
    Ok(v)
}

/// Runs the configured method; `auto` picks the constrained minimizer for
/// `χ = 0` surfaces, the sub/super pipeline for interior data in higher
/// dimension and Newton from the identity otherwise.
pub fn solve(ctx: &Context) -> Result<SolveReport, CliError> {
    let (m, bg, t, cfg) = (&ctx.mesh, &ctx.bg, &ctx.target, &ctx.cfg.solver);
    let side = ctx.cfg.problem.side();
    let newton = || -> Result<SolveReport, Error> {
        let pair: CurvaturePair = ctx.cfg.problem.target_pair(m, t)?;
        newton_solve(m, bg, &pair, &ConformalFactor::identity(m)?, cfg)
    };
    let method = match ctx.cfg.method {
        Method::Auto if bg.n() == 2 && bg.euler_characteristic() == Some(0) => Method::Constrained,
        Method::Auto if bg.n() >= 3 && side == Side::Interior => Method::Monotone,
        Method::Auto => Method::Newton,
        other => other,
    };
    let r = match method {
        Method::Newton | Method::Auto => newton(),
        Method::Constrained => minimize_constrained(m, bg, t, side, cfg),
        Method::Subcritical => minimize_subcritical(m, bg, t, &ctx.cfg.subcritical, side, cfg),
        Method::Monotone if side == Side::Interior => sub_super_pipeline(m, bg, t, cfg),
        Method::Monotone => return Err(CliError::Config("the monotone method needs an interior target (PC or CE)".into())),
    }
    .map_err(core_err)?;
    write_report(ctx, &r)?;
    Ok(r)
}

fn write_report(ctx: &Context, r: &SolveReport) -> Result<(), CliError> {
    let u = match &r.u {
        Some(u) => {
            ctx.write("fields/u.csv", &u.u.to_csv())?;
            Some("fields/u.csv")
        }
        None => None,
    };
    ctx.write_json("solve_report.json", &ReportFile { input: ctx.input(), report: r, u })?;
    Ok(())
}

/// Outcome of the full pipeline.
pub struct RunSummary {
    pub classification: Classification,
    pub verdict: ObstructionVerdict,
}

pub fn run(ctx: &Context) -> Result<RunSummary, CliError> {
    let classification = classify(ctx)?;
    ctx.write_json("classification.json", &classification)?;
    ctx.write("fields/target.csv", &ctx.target.to_csv())?;
    let verdict = check(ctx, true)?;
    if let Some(r) = &verdict.report {
        write_report(ctx, r)?;
    }
    Ok(RunSummary { classification, verdict })
}

fn matrix_market(m: &SparseMatrix) -> String {
    let mut t = m.triplets();
    t.sort_by_key(|&(i, j, _)| (j, i));
    let mut s = String::from("%%MatrixMarket matrix coordinate real general\n");
    s += &format!("{} {} {}\n", m.dim(), m.dim(), t.len());
    for (i, j, v) in t {
        s += &format!("{} {} {v:e}\n", i + 1, j + 1);
    }
    s
}

fn matrix_market_vector(v: &[f64]) -> String {
    let mut s = format!("%%MatrixMarket matrix array real general\n{} 1\n", v.len());
    for x in v {
        s += &format!("{x:e}\n");
    }
    s
}

/// Writes the stiffness matrix, the conformal operator and the lumped
/// masses under `matrices/`.
pub fn dump_matrices(ctx: &Context) -> Result<(), CliError> {
    let ops = assemble_operators(&ctx.mesh, &ctx.bg).map_err(core_err)?;
    let sys = NodalSystem::new(&ctx.mesh, &ctx.bg).map_err(core_err)?;
    ctx.write("matrices/stiffness.mtx", &matrix_market(&ops.stiffness))?;
    ctx.write("matrices/conformal_operator.mtx", &matrix_market(sys.k()))?;
    ctx.write("matrices/vertex_mass.mtx", &matrix_market_vector(&ops.vertex_mass))?;
    ctx.write("matrices/boundary_mass.mtx", &matrix_market_vector(&ops.mass_boundary))?;
    Ok(())
}

#[derive(Serialize)]
struct ErrorFile<'a> {
    kind: &'a str,
    message: &'a str,
    exit_code: i32,
}

/// Loads the config, runs `cmd` and logs any failure to `error.json` in
/// the output directory when one is known.
pub fn execute(config: &Path, cmd: Command, ov: &Overrides) -> Result<String, CliError> {
    let cfg = ProblemConfig::load(config)?;
    let out = ov.out.clone().unwrap_or_else(|| cfg.output_dir());
    let result = Context::new(cfg, ov).and_then(|ctx| {
        let _ = fs::remove_file(ctx.out.join("error.json"));
        if ctx.dump_matrices {
            dump_matrices(&ctx)?;
        }
        dispatch(&ctx, cmd)
    });
    if let Err(e) = &result {
        let log = ErrorFile { kind: e.kind(), message: e.message(), exit_code: e.exit_code() };
        if fs::create_dir_all(&out).is_ok() {
            if let Ok(text) = serde_json::to_string_pretty(&log) {
                let _ = fs::write(out.join("error.json"), text + "\n");
            }
        }
    }
    result
}

fn dispatch(ctx: &Context, cmd: Command) -> Result<String, CliError> {
    let out = ctx.out.display();
    Ok(match cmd {
        Command::Classify => {
            let c = classify(ctx)?;
            let path = ctx.write_json("classification.json", &c)?;
            let mut s = format!("dimension {}", c.dimension);
            if let Some(chi) = c.euler_characteristic {
                s += &format!(", chi {chi}");
            }
            for e in [&c.lambda1, &c.sigma1].into_iter().flatten() {
                s += &format!(", {} {:.6e} ({:?})", e.kind, e.value, e.sign_class);
            }
            format!("{s}\nwrote {}", path.display())
        }
        Command::Eigen(choice) => {
            let e = eigen(ctx, choice)?;
            format!("{} = {:.9e} ({:?}, tolerance {:.3e})\nwrote {out}/eigen.json", e.kind, e.value, e.sign_class, e.tolerance)
        }
        Command::Check => {
            let v = check(ctx, false)?;
            format!("verdict {:?} ({})\nwrote {out}/verdict.json", v.verdict, v.theorem)
        }
        Command::Solve => {
            let r = solve(ctx)?;
            format!(
                "{} {:?} after {} iterations, residuals {:.3e} / {:.3e}\nwrote {out}/solve_report.json",
                r.method, r.status, r.iterations, r.residual_interior, r.residual_boundary
            )
        }
        Command::Run => {
            let s = run(ctx)?;
            let mut text = format!("verdict {:?} ({})", s.verdict.verdict, s.verdict.theorem);
            if let Some(r) = &s.verdict.report {
                text += &format!("\n{} {:?}, residuals {:.3e} / {:.3e}", r.method, r.status, r.residual_interior, r.residual_boundary);
            }
            format!("{text}\nwrote {out}/verdict.json")
        }
    })
}

/// Writes a generated mesh as OFF, plus a tag sidecar next to it when the
/// mesh carries DM facets or a round shape.
pub fn mesh_gen(name: &str, resolution: Option<usize>, jitter_amp: f64, seed: u64, path: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut mesh = crate::config::generate(name, resolution)?;
    if jitter_amp > 0.0 {
        mesh = jitter(&mesh, jitter_amp, seed)?;
    }
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    io::save_mesh(&mesh, path).map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    let mut written = vec![path.to_path_buf()];
    let tags = io::TagFile::from_mesh(&mesh);
    if !tags.dm.is_empty() || tags.shape.is_some() {
        let tpath = path.with_extension("tags.toml");
        fs::write(&tpath, io::tags_to_toml(&tags)).map_err(|e| io_err(&tpath, e))?;
        written.push(tpath);
    }
    Ok(written)
}
