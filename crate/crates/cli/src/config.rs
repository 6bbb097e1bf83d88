//! Problem configuration files (TOML).
//!
//! ```toml
//! problem = "PC0"              # PC, PC0, CE or CE0
//! target = "sin(theta) - 0.1"  # expression, see `expr`
//! method = "auto"              # auto, newton, constrained, subcritical, monotone
//! dimension = 2                # optional consistency check
//! output = "out"               # relative to the config file
//! seed = 0
//! eigen_tol = 1e-6             # optional override of the eigenvalue dead band
//!
//! [mesh]
//! generator = "annulus"        # or: path = "mesh.off", tags = "tags.toml"
//! resolution = 8
//! jitter = 0.0                 # seeded interior-vertex displacement
//!
//! [background]
//! kind = "intrinsic"           # flat, intrinsic, constant or csv
//!
//! [solver]                     # any solver tolerance or cap
//! tol = 1e-6
//! ```

use std::path::{Path, PathBuf};

use prescribed_curvature::background::BackgroundGeometry;
use prescribed_curvature::mesh::{generators, io, Mesh, ScalarField, Support};
use prescribed_curvature::obstructions::Problem;
use prescribed_curvature::prescribe::{SolverConfig, SubcriticalParams};
use serde::Deserialize;

use crate::expr::{parse_expr, Expr};
use crate::CliError;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[default]
    Auto,
    Newton,
    Constrained,
    Subcritical,
    Monotone,
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "auto" => Self::Auto,
            "newton" => Self::Newton,
            "constrained" => Self::Constrained,
            "subcritical" => Self::Subcritical,
            "monotone" => Self::Monotone,
            _ => return Err(format!("unknown method `{s}`")),
        })
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshSpec {
    /// Built-in generator name; see `generate`.
    pub generator: Option<String>,
    pub resolution: Option<usize>,
    /// OFF file, used when no generator is given.
    pub path: Option<PathBuf>,
    /// Sidecar tag file for `path`.
    pub tags: Option<PathBuf>,
    /// Random interior-vertex displacement, in units of the mesh size,
    /// drawn from a generator seeded with `seed`. Default 0.
    #[serde(default)]
    pub jitter: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackgroundKind {
    /// Zero curvature everywhere.
    #[default]
    Flat,
    /// Angle defects of the mesh itself (surfaces only).
    Intrinsic,
    /// Constant densities `interior` and `boundary`.
    Constant,
    /// Nodal densities from `interior_csv` and `boundary_csv`.
    Csv,
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackgroundSpec {
    #[serde(default)]
    pub kind: BackgroundKind,
    #[serde(default)]
    pub interior: f64,
    #[serde(default)]
    pub boundary: f64,
    pub interior_csv: Option<PathBuf>,
    pub boundary_csv: Option<PathBuf>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub problem: Problem,
    pub target: String,
    #[serde(default)]
    pub method: Method,
    pub dimension: Option<usize>,
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    pub eigen_tol: Option<f64>,
    pub mesh: MeshSpec,
    #[serde(default)]
    pub background: BackgroundSpec,
    #[serde(default)]
    pub solver: SolverConfig,
    #[serde(default)]
    pub subcritical: SubcriticalParams,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base: PathBuf,
}

/// Built-in generators and their default resolution.
pub const GENERATORS: &[(&str, usize, &str)] = &[
    ("disk", 8, "unit disk, `resolution` rings"),
    ("annulus", 8, "annulus 1 < r < 2, 6·res angular by res radial"),
    ("rectangle", 8, "[0,2]×[0,1], 2·res by res"),
    ("cylinder", 8, "unit cylinder of height 1, 4·res by res"),
    ("half_cylinder", 8, "cylinder with DM on the top circle, 4·res by res"),
    ("hemisphere", 8, "upper unit hemisphere, `resolution` rings"),
    ("pair_of_pants", 2, "sphere minus three caps, `resolution` subdivisions"),
    ("cube", 4, "unit cube, res³ sub-cubes"),
    ("ball", 6, "unit ball, `resolution` shells"),
];

pub fn generate(name: &str, resolution: Option<usize>) -> Result<Mesh, CliError> {
    let (_, default, _) = GENERATORS
        .iter()
        .find(|g| g.0 == name)
        .ok_or_else(|| CliError::Config(format!("unknown generator `{name}`")))?;
    let k = resolution.unwrap_or(*default);
    if k == 0 {
        return Err(CliError::Config("resolution must be positive".into()));
    }
    Ok(match name {
        "disk" => generators::disk(k),
        "annulus" => generators::annulus(1.0, 2.0, 6 * k, k),
        "rectangle" => generators::rectangle(2 * k, k, 2.0, 1.0),
        "cylinder" => generators::cylinder(4 * k, k, 1.0),
        "half_cylinder" => generators::half_cylinder(4 * k, k, 1.0),
        "hemisphere" => generators::hemisphere(k),
        "pair_of_pants" => generators::pair_of_pants(k),
        "cube" => generators::cube(k),
        _ => generators::ball(k),
    })
}

fn config_err(e: impl std::fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

impl ProblemConfig {
    pub fn parse(text: &str, base: &Path) -> Result<Self, CliError> {
        let mut cfg: ProblemConfig = toml::from_str(text).map_err(config_err)?;
        cfg.base = base.to_path_buf();
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, path.parent().unwrap_or(Path::new(".")))
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    fn existing(&self, p: &Path, what: &str) -> Result<PathBuf, CliError> {
        let full = self.resolve(p);
        if !full.is_file() {
            return Err(CliError::Config(format!("{what} {} does not exist", full.display())));
        }
        Ok(full)
    }

    pub fn output_dir(&self) -> PathBuf {
        self.resolve(self.output.as_deref().unwrap_or(Path::new("out")))
    }

    pub fn target_expr(&self) -> Result<Expr, CliError> {
        parse_expr(&self.target).map_err(|e| CliError::Config(format!("target `{}`: {e}", self.target)))
    }

    pub fn build_mesh(&self) -> Result<Mesh, CliError> {
        let m = &self.mesh;
        let mesh = match (&m.generator, &m.path) {
            (Some(_), Some(_)) => return Err(config_err("mesh takes either `generator` or `path`, not both")),
            (Some(g), None) => {
                if m.tags.is_some() {
                    return Err(config_err("`tags` only applies to OFF meshes"));
                }
                generate(g, m.resolution)?
            }
            (None, Some(p)) => {
                let mesh = io::load_mesh(self.existing(p, "mesh file")?).map_err(config_err)?;
                match &m.tags {
                    Some(t) => io::load_tags(self.existing(t, "tag file")?).and_then(|t| t.apply(mesh)).map_err(config_err)?,
                    None => mesh,
                }
            }
            (None, None) => return Err(config_err("mesh needs `generator` or `path`")),
        };
        if let Some(d) = self.dimension {
            if d != mesh.dim() {
                return Err(CliError::Config(format!("config says dimension {d}, mesh has {}", mesh.dim())));
            }
        }
        Ok(mesh)
    }

    pub fn build_background(&self, mesh: &Mesh) -> Result<BackgroundGeometry, CliError> {
        let b = &self.background;
        if b.kind != BackgroundKind::Csv && (b.interior_csv.is_some() || b.boundary_csv.is_some()) {
            return Err(config_err("CSV paths need background kind `csv`"));
        }
        match b.kind {
            BackgroundKind::Flat => BackgroundGeometry::flat(mesh),
            BackgroundKind::Intrinsic => BackgroundGeometry::intrinsic(mesh),
            BackgroundKind::Constant => BackgroundGeometry::constant(mesh, b.interior, b.boundary),
            BackgroundKind::Csv => {
                let read = |p: &Option<PathBuf>, support: Support, what: &str| -> Result<ScalarField, CliError> {
                    match p {
                        Some(p) => {
                            let text = std::fs::read_to_string(self.existing(p, what)?).map_err(config_err)?;
                            ScalarField::from_csv(mesh, support, &text).map_err(config_err)
                        }
                        None => ScalarField::constant(mesh, support, 0.0).map_err(config_err),
                    }
                };
                let i = read(&b.interior_csv, Support::Interior, "interior CSV")?;
                let bd = read(&b.boundary_csv, Support::Boundary, "boundary CSV")?;
                BackgroundGeometry::new(mesh, mesh.dim(), i, bd)
            }
        }
        .map_err(config_err)
    }

    pub fn build_target(&self, mesh: &Mesh) -> Result<ScalarField, CliError> {
        let support = self.problem.support();
        if support == Support::Boundary && mesh.support_vertices(Support::Boundary).is_empty() {
            return Err(CliError::Config(format!("{:?} needs a D0 boundary, the mesh has none", self.problem)));
        }
        self.target_expr()?
            .sample(mesh, support)
            .map_err(|e| CliError::Config(format!("target `{}`: {e}", self.target)))
    }
}
