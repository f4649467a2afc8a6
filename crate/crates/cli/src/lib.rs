//! The `hyperconf` command-line tool.
//!
//! [`run`] parses an argument list, executes one subcommand and returns the
//! process exit code. Failures print a single JSON line on standard error.

pub mod render;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use hyperconf::conformal::{euc_change, hyp_change, random_init, yamabe_solve, FactorField, SolverOptions};
use hyperconf::io::{read_factors, read_mesh, to_json, write_factors, write_lengths, write_mesh, Mesh};
use hyperconf::mesh::{check_embedding, gen_regular_patch, induced_lengths, is_delaunay, min_inner_angle, LengthField};
use hyperconf::verifier::{run_suite, SampleConfig, Suite};
use serde_json::json;
use thiserror::Error;

use crate::render::{render_svg, RenderOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NO_CONVERGENCE: i32 = 3;

/// Amplitude of `--init random:SEED` starting factors.
const RANDOM_INIT_AMPLITUDE: f64 = 0.1;

#[derive(Debug, Parser)]
#[command(name = "hyperconf", version, about = "Discrete conformal geometry in the Poincaré disk")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a hexagonal patch around the origin.
    Gen {
        #[arg(long)]
        rings: usize,
        #[arg(long)]
        edge: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check a mesh; with no flags every check runs.
    Check {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        delaunay: bool,
        #[arg(long)]
        embedding: bool,
        #[arg(long)]
        min_angle: bool,
    },
    /// Apply a conformal factor to the edge lengths of a mesh.
    Conformal {
        #[arg(long)]
        mesh: PathBuf,
        /// Factor file; defaults to the factors stored in the mesh.
        #[arg(long)]
        factors: Option<PathBuf>,
        #[arg(long, value_enum)]
        mode: Mode,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve for the factor that flattens every interior vertex.
    Solve {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        pin_boundary: f64,
        /// `zero` or `random:SEED`.
        #[arg(long, default_value = "zero", value_parser = parse_init)]
        init: Init,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run sampled inequality audits.
    Verify {
        #[arg(long, value_parser = parse_suite)]
        suite: Suite,
        #[arg(long)]
        samples: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Draw a mesh as SVG.
    Render {
        #[arg(long)]
        mesh: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        companion: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Hyp,
    Euc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Init {
    Zero,
    Random(u64),
}

fn parse_init(s: &str) -> Result<Init, String> {
    match s.split_once(':') {
        None if s == "zero" => Ok(Init::Zero),
        Some(("random", seed)) => seed
            .parse()
            .map(Init::Random)
            .map_err(|e| format!("bad seed {seed:?}: {e}")),
        _ => Err(format!("expected `zero` or `random:SEED`, got {s:?}")),
    }
}

fn parse_suite(s: &str) -> Result<Suite, String> {
    s.parse().map_err(|e: hyperconf::Error| e.to_string())
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: hyperconf::Error },

    #[error(transparent)]
    Core(#[from] hyperconf::Error),
}

impl CliError {
    fn kind(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Io { .. } => "io",
            CliError::Parse { .. } => "parse",
            CliError::Core(e) if is_solver_failure(e) => "nonconvergence",
            CliError::Core(_) => "input",
        }
    }

    fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if is_solver_failure(e) => EXIT_NO_CONVERGENCE,
            _ => EXIT_INPUT,
        }
    }
}

fn is_solver_failure(e: &hyperconf::Error) -> bool {
    matches!(
        e,
        hyperconf::Error::NonConvergence { .. }
            | hyperconf::Error::InfeasibleStep { .. }
            | hyperconf::Error::SingularJacobian(_)
    )
}

/// Runs the tool with process standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    run_with(args, &mut std::io::stdout().lock(), &mut std::io::stderr().lock())
}

/// Runs the tool, writing reports to `out` and diagnostics to `err`.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
        Err(e) => {
            let message = e.to_string();
            let first = message.lines().next().unwrap_or_default().trim_start_matches("error: ");
            return report_error(err, &CliError::Usage(first.to_string()));
        }
    };
    match execute(cli.command, out) {
        Ok(code) => code,
        Err(e) => report_error(err, &e),
    }
}

fn report_error(err: &mut dyn Write, e: &CliError) -> i32 {
    let code = e.exit_code();
    let line = json!({ "error": e.kind(), "message": e.to_string(), "exit": code });
    let _ = writeln!(err, "{line}");
    code
}

fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_mesh(path: &Path) -> Result<Mesh, CliError> {
    read_mesh(&read_text(path)?).map_err(|source| CliError::Parse {
        path: path.to_path_buf(),
        source,
    })
}

fn emit(out: &mut dyn Write, value: &serde_json::Value) -> Result<(), CliError> {
    writeln!(out, "{}", to_json(value)).map_err(|source| CliError::Io {
        path: PathBuf::from("<stdout>"),
        source,
    })
}

fn execute(command: Command, out: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Gen { rings, edge, out: path } => {
            let (triangulation, map) = gen_regular_patch(rings, edge)?;
            let summary = json!({
                "vertices": triangulation.vertex_count(),
                "edges": triangulation.edges().len(),
                "faces": triangulation.faces().len(),
            });
            write_text(&path, &write_mesh(&Mesh { triangulation, map, factors: None }))?;
            emit(out, &summary)?;
            Ok(EXIT_OK)
        }
        Command::Check {
            mesh,
            delaunay,
            embedding,
            min_angle,
        } => check(&load_mesh(&mesh)?, delaunay, embedding, min_angle, out),
        Command::Conformal {
            mesh,
            factors,
            mode,
            out: path,
        } => {
            let mesh = load_mesh(&mesh)?;
            let u = match factors {
                Some(p) => read_factors(&read_text(&p)?).map_err(|source| CliError::Parse { path: p, source })?,
                None => mesh
                    .factors
                    .clone()
                    .ok_or_else(|| CliError::Usage("no --factors given and the mesh carries none".into()))?,
            };
            let changed = match mode {
                Mode::Hyp => hyp_change(&induced_lengths(&mesh.triangulation, &mesh.map)?, &u)?,
                Mode::Euc => euc_change(&chord_lengths(&mesh)?, &u)?,
            };
            write_text(&path, &write_lengths(&changed))?;
            emit(out, &json!({ "edges": changed.len(), "max_length": changed.sup_norm() }))?;
            Ok(EXIT_OK)
        }
        Command::Solve {
            mesh,
            pin_boundary,
            init,
            out: path,
        } => {
            let mesh = load_mesh(&mesh)?;
            let t = &mesh.triangulation;
            let l = induced_lengths(t, &mesh.map)?;
            let pinned: BTreeMap<_, _> = t.boundary_vertices().map(|v| (v, pin_boundary)).collect();
            let start = match init {
                Init::Zero => {
                    let mut u = FactorField::zeros(t);
                    for (&v, &value) in &pinned {
                        u.set(v, value);
                    }
                    u
                }
                Init::Random(seed) => random_init(t, &pinned, RANDOM_INIT_AMPLITUDE, seed),
            };
            let solution = yamabe_solve(t, &l, &pinned, &start, &SolverOptions::default())?;
            write_text(&path, &write_factors(&solution.factors))?;
            emit(
                out,
                &json!({
                    "iterations": solution.iterations,
                    "residual": solution.residual,
                    "log": solution.log,
                }),
            )?;
            Ok(EXIT_OK)
        }
        Command::Verify {
            suite,
            samples,
            seed,
            epsilon,
        } => {
            let mut cfg = SampleConfig::new(samples, seed);
            cfg.epsilon = epsilon;
            let reports = run_suite(suite, &cfg)?;
            for report in &reports {
                writeln!(out, "{}", report.to_json()).map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdout>"),
                    source,
                })?;
            }
            Ok(if reports.iter().all(|r| r.passed()) {
                EXIT_OK
            } else {
                EXIT_VIOLATIONS
            })
        }
        Command::Render {
            mesh,
            out: path,
            companion,
        } => {
            let mesh = load_mesh(&mesh)?;
            let svg = render_svg(&mesh.triangulation, &mesh.map, &RenderOptions { companion });
            write_text(&path, &svg)?;
            Ok(EXIT_OK)
        }
    }
}

fn chord_lengths(mesh: &Mesh) -> Result<LengthField, CliError> {
    let mut chords = LengthField::default();
    for &e in mesh.triangulation.edges() {
        let a = mesh.map.position(e.lo())?.to_complex();
        let b = mesh.map.position(e.hi())?.to_complex();
        chords.insert(e, (a - b).norm());
    }
    Ok(chords)
}

fn check(mesh: &Mesh, delaunay: bool, embedding: bool, min_angle: bool, out: &mut dyn Write) -> Result<i32, CliError> {
    let all = !(delaunay || embedding || min_angle);
    let (t, phi) = (&mesh.triangulation, &mesh.map);
    let mut report = serde_json::Map::new();
    report.insert("vertices".into(), t.vertex_count().into());
    report.insert("faces".into(), t.faces().len().into());
    let mut violations = 0;
    if all || delaunay {
        let d = is_delaunay(t, phi)?;
        violations += d.violations.len();
        report.insert("delaunay".into(), json!(d));
    }
    if all || embedding {
        let e = check_embedding(t, phi)?;
        violations += usize::from(!e.embedded);
        report.insert("embedding".into(), json!(e));
    }
    if all || min_angle {
        report.insert("min_angle".into(), json!(min_inner_angle(t, phi)?));
    }
    report.insert("violations".into(), violations.into());
    emit(out, &serde_json::Value::Object(report))?;
    Ok(if violations == 0 { EXIT_OK } else { EXIT_VIOLATIONS })
}
