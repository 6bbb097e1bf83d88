use std::path::PathBuf;
use std::process::ExitCode;

use clap::{CommandFactory, FromArgMatches, Parser, Subcommand};
use pcurv::config::{Method, GENERATORS};
use pcurv::pipeline::{execute, mesh_gen, Command, EigenChoice, Overrides};
use pcurv::CliError;
use prescribed_curvature::prescribe::{SolverConfig, SubcriticalParams};

/// Conformal curvature prescription on meshes with boundary.
///
/// Exit codes: 0 when the pipeline completes (whatever the verdict), 2 on
/// configuration errors, 3 on solver faults.
#[derive(Parser)]
#[command(name = "pcurv", version)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Problem configuration file (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed for randomized mesh jitter [default: config value, else 0].
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory (for `mesh gen`, the OFF file) [default: config `output`, else ./out].
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Nonlinear residual tolerance [default: 1e-6].
    #[arg(long, global = true, value_name = "X")]
    tol: Option<f64>,
    /// Solver: auto, newton, constrained, subcritical or monotone [default: auto].
    #[arg(long, global = true, value_name = "NAME")]
    method: Option<Method>,
    /// Generator resolution, overriding the config.
    #[arg(long, global = true, value_name = "N")]
    resolution: Option<usize>,
    /// Also write matrices/*.mtx.
    #[arg(long, global = true)]
    dump_matrices: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// Euler characteristic or eigenvalue sign classes of the background.
    Classify,
    /// One eigenvalue with its eigenfunction.
    Eigen {
        /// auto, lambda1, sigma1, sigma1_domain or mu1_domain.
        #[arg(long, default_value = "auto")]
        kind: EigenChoice,
    },
    /// Obstruction analysis only, without solving.
    Check,
    /// Run one solver (see --method).
    Solve,
    /// Classification, obstruction analysis and the constructive solve.
    Run,
    /// Mesh utilities.
    Mesh {
        #[command(subcommand)]
        cmd: MeshCmd,
    },
}

#[derive(Subcommand)]
enum MeshCmd {
    /// Write a built-in mesh as OFF (plus a tag sidecar when needed).
    Gen {
        /// Generator name (listed below).
        generator: String,
        /// Interior-vertex jitter in units of the mesh size [default: 0].
        #[arg(long, default_value_t = 0.0)]
        jitter: f64,
    },
}

fn defaults_help() -> String {
    let mut s = String::from("Solver defaults ([solver] table):\n");
    s += &toml::to_string(&SolverConfig::default()).unwrap_or_default();
    s += "\nSubcritical defaults ([subcritical] table):\n";
    s += &toml::to_string(&SubcriticalParams::default()).unwrap_or_default();
    s += "\nGenerators (default resolution):\n";
    for (name, res, what) in GENERATORS {
        s += &format!("  {name:<14} {res:>3}  {what}\n");
    }
    s
}

fn main() -> ExitCode {
    let matches = Cli::command().after_long_help(defaults_help()).get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    let ov = Overrides {
        seed: cli.seed,
        out: cli.out.clone(),
        tol: cli.tol,
        method: cli.method,
        resolution: cli.resolution,
        dump_matrices: cli.dump_matrices,
    };
    let result = match cli.cmd {
        Cmd::Mesh { cmd: MeshCmd::Gen { generator, jitter } } => {
            let path = cli.out.unwrap_or_else(|| PathBuf::from(format!("{generator}.off")));
            mesh_gen(&generator, cli.resolution, jitter, cli.seed.unwrap_or(0), &path)
                .map(|w| w.iter().map(|p| format!("wrote {}", p.display())).collect::<Vec<_>>().join("\n"))
        }
        cmd => {
            let cmd = match cmd {
                Cmd::Classify => Command::Classify,
                Cmd::Eigen { kind } => Command::Eigen(kind),
                Cmd::Check => Command::Check,
                Cmd::Solve => Command::Solve,
                _ => Command::Run,
            };
            match &cli.config {
                Some(c) => execute(c, cmd, &ov),
                None => Err(CliError::Config("--config is required".into())),
            }
        }
    };
    match result {
        Ok(text) => {
            println!("{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("pcurv: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
