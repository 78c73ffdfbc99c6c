//! `dccert` — batch front end for ε-subdifferential computations and
//! DC Lipschitz/constancy certification.
//!
//! Every command reads max-affine functions and point sets as JSON files,
//! writes exactly one line of JSON to standard output, and encodes its
//! verdict in the exit code:
//!
//! * `0` — certified / true / feasible
//! * `1` — refuted / false / infeasible (machine-readable witness in the JSON)
//! * `2` — usage or input error
//! * `3` — numerical or capacity error

use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dccert_core::{
    certify_lipschitz, certify_lipschitz_exact, chain_certificate, check_condition,
    check_constancy, coincidence_cells, eps_subdiff, lipschitz_exact, lipschitz_sampled,
    parse_maxaffine, parse_pointset, CellWitness, Condition, Error, MaxAffine, ModulusSpec, Norm,
    PointSet, Verdict,
};

#[derive(Parser)]
#[command(
    name = "dccert",
    version,
    about = "Exact ε-subdifferentials of max-affine functions and Lipschitz certification of their differences"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute ∂εf(x) and emit its vertex list.
    Subdiff {
        /// Function file (max-affine JSON).
        #[arg(long)]
        f: PathBuf,
        /// Evaluation point as a JSON array, e.g. "[1,0.5]".
        #[arg(long)]
        x: String,
        /// Epsilon (≥ 0).
        #[arg(long)]
        eps: f64,
        /// Emit the vertex list (the default output).
        #[arg(long)]
        vertices: bool,
    },
    /// Evaluate one condition (II, IV or VI) at one point and epsilon.
    Check {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        modulus: ModulusArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        eps: f64,
        /// Condition to evaluate: II, IV or VI.
        #[arg(long)]
        cond: String,
        #[arg(long, default_value = "linf")]
        norm: String,
    },
    /// Sweep a point grid and an epsilon grid; certify or refute a constant.
    Certify {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        modulus: ModulusArgs,
        /// Point-set file with the evaluation grid.
        #[arg(long)]
        grid: Option<PathBuf>,
        /// Lattice bounds "lo,hi" (with --per-dim) as an alternative to --grid.
        #[arg(long = "box", allow_hyphen_values = true)]
        box_bounds: Option<String>,
        /// Lattice points per dimension.
        #[arg(long = "per-dim")]
        per_dim: Option<usize>,
        /// Comma-separated epsilon list, e.g. "1e-6,0.01".
        #[arg(long)]
        eps: String,
        /// Comma-separated condition list (default: II,IV,VI for --K; II,IV for --h).
        #[arg(long)]
        cond: Option<String>,
        /// Upgrade a grid-relative Certified to a global verdict via the
        /// exact constant (requires --K).
        #[arg(long)]
        exact: bool,
        #[arg(long, default_value = "linf")]
        norm: String,
    },
    /// Run the segment-chain construction between two points.
    Chain {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        modulus: ModulusArgs,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Number of chain segments (≥ 1).
        #[arg(long)]
        m: usize,
        #[arg(long)]
        eps: f64,
    },
    /// Estimate the Lipschitz constant of f − g (exact or sampled).
    Estimate {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        /// Exact constant by coincidence-cell enumeration.
        #[arg(long)]
        exact: bool,
        /// Number of sampled difference quotients.
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Sampling box "lo,hi" applied to every coordinate.
        #[arg(long = "box", allow_hyphen_values = true)]
        box_bounds: Option<String>,
        #[arg(long, default_value = "linf")]
        norm: String,
    },
    /// Decide whether f − g is constant on a grid.
    Constancy {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        tol: f64,
        #[arg(long, default_value = "linf")]
        norm: String,
    },
}

#[derive(Args)]
struct ModulusArgs {
    /// Ball radius K (modulus = dual-norm ball of radius K).
    #[arg(long = "K")]
    k: Option<f64>,
    /// Modulus function file (max-affine h with h(0) = 0).
    #[arg(long = "h")]
    h: Option<PathBuf>,
}

impl ModulusArgs {
    fn resolve(&self, norm: Norm) -> Result<ModulusSpec, Error> {
        match (self.k, &self.h) {
            (Some(k), None) => ModulusSpec::ball(k, norm),
            (None, Some(path)) => ModulusSpec::function(load_function(path)?),
            _ => Err(Error::Input("exactly one of --K or --h is required".into())),
        }
    }
}

fn load_text(path: &Path) -> Result<String, Error> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Input(format!("cannot read {}: {e}", path.display())))
}

fn load_function(path: &Path) -> Result<MaxAffine, Error> {
    parse_maxaffine(&load_text(path)?)
        .map_err(|e| prefix_path(path, e))
}

fn load_points(path: &Path) -> Result<PointSet, Error> {
    parse_pointset(&load_text(path)?).map_err(|e| prefix_path(path, e))
}

fn prefix_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    }
}

fn parse_vector(text: &str) -> Result<Vec<f64>, Error> {
    serde_json::from_str(text)
        .map_err(|_| Error::Input(format!("expected a JSON array of numbers, got {text:?}")))
}

fn parse_list(text: &str) -> Result<Vec<f64>, Error> {
    text.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .map_err(|_| Error::Input(format!("bad number {t:?} in list")))
        })
        .collect()
}

fn parse_norm(text: &str) -> Result<Norm, Error> {
    Norm::from_str(text)
}

fn parse_conditions(text: &str) -> Result<Vec<Condition>, Error> {
    text.split(',').map(|t| Condition::from_str(t.trim())).collect()
}

fn parse_box(text: &str) -> Result<(f64, f64), Error> {
    let parts = parse_list(text)?;
    if parts.len() != 2 {
        return Err(Error::Input(format!("--box expects \"lo,hi\", got {text:?}")));
    }
    Ok((parts[0], parts[1]))
}

fn emit<T: Serialize>(doc: &T) {
    println!("{}", serde_json::to_string(doc).expect("output serialization cannot fail"));
}

fn exit_for<T: Display>(kind: &str, err: T, code: u8) -> ExitCode {
    eprintln!("dccert: {kind}: {err}");
    ExitCode::from(code)
}

fn error_exit(err: Error) -> ExitCode {
    match err {
        Error::Input(_) | Error::Parse(_) | Error::Modulus { .. } | Error::Unsupported(_) => {
            exit_for("input error", err, 2)
        }
        Error::Numerical(_) | Error::Capacity { .. } => exit_for("numerical error", err, 3),
    }
}

#[derive(Serialize)]
struct SubdiffOut {
    vertices: Vec<Vec<f64>>,
    epsilon: f64,
    point: Vec<f64>,
}

#[derive(Serialize)]
struct EstimateOut {
    #[serde(rename = "K")]
    k: f64,
    method: &'static str,
    witness: Option<CellWitness>,
    cells: Option<usize>,
    samples: Option<usize>,
    seed: Option<u64>,
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Subdiff { f, x, eps, vertices: _ } => {
            let func = load_function(&f)?;
            let point = parse_vector(&x)?;
            let polytope = eps_subdiff(&func, &point, eps)?;
            let vertices = polytope.vertices()?;
            emit(&SubdiffOut { vertices, epsilon: eps, point });
            Ok(ExitCode::SUCCESS)
        }
        Command::Check { f, g, modulus, x, eps, cond, norm } => {
            let norm = parse_norm(&norm)?;
            let func_f = load_function(&f)?;
            let func_g = load_function(&g)?;
            let spec = modulus.resolve(norm)?;
            let point = parse_vector(&x)?;
            let condition = Condition::from_str(&cond)?;
            let result = check_condition(&func_f, &func_g, &spec, &point, eps, condition)?;
            emit(&result);
            Ok(if result.verdict { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Certify {
            f,
            g,
            modulus,
            grid,
            box_bounds,
            per_dim,
            eps,
            cond,
            exact,
            norm,
        } => {
            let norm = parse_norm(&norm)?;
            let func_f = load_function(&f)?;
            let func_g = load_function(&g)?;
            let spec = modulus.resolve(norm)?;
            let grid = match (grid, box_bounds) {
                (Some(path), None) => load_points(&path)?,
                (None, Some(bounds)) => {
                    let (lo, hi) = parse_box(&bounds)?;
                    let per_dim = per_dim
                        .ok_or_else(|| Error::Input("--box requires --per-dim".into()))?;
                    PointSet::lattice(func_f.dim(), lo, hi, per_dim)?
                }
                _ => return Err(Error::Input("exactly one of --grid or --box is required".into())),
            };
            let eps_grid = parse_list(&eps)?;
            let conditions = match cond {
                Some(text) => parse_conditions(&text)?,
                None => match spec {
                    ModulusSpec::Ball(_) => {
                        vec![Condition::Inclusion, Condition::Intersection, Condition::Distance]
                    }
                    ModulusSpec::Function(_) => {
                        vec![Condition::Inclusion, Condition::Intersection]
                    }
                },
            };
            let report = if exact {
                let ModulusSpec::Ball(ball) = &spec else {
                    return Err(Error::Input("--exact requires a ball modulus (--K)".into()));
                };
                certify_lipschitz_exact(
                    &func_f,
                    &func_g,
                    ball.radius,
                    ball.norm,
                    &grid,
                    &eps_grid,
                    &conditions,
                )?
            } else {
                certify_lipschitz(&func_f, &func_g, &spec, &grid, &eps_grid, &conditions)?
            };
            println!("{}", report.to_json());
            Ok(match report.overall {
                Verdict::Certified => ExitCode::SUCCESS,
                Verdict::Refuted => ExitCode::from(1),
                Verdict::Inconclusive => {
                    eprintln!("dccert: input error: nothing to check (empty grid or condition list)");
                    ExitCode::from(2)
                }
            })
        }
        Command::Chain { f, g, modulus, x, y, m, eps } => {
            let func_f = load_function(&f)?;
            let func_g = load_function(&g)?;
            let spec = modulus.resolve(Norm::Linf)?;
            let from = parse_vector(&x)?;
            let to = parse_vector(&y)?;
            let cert = chain_certificate(&func_f, &func_g, &spec, &from, &to, m, eps)?;
            emit(&cert);
            Ok(if cert.feasible { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Estimate { f, g, exact, samples, seed, box_bounds, norm } => {
            let norm = parse_norm(&norm)?;
            let func_f = load_function(&f)?;
            let func_g = load_function(&g)?;
            if exact {
                if samples.is_some() || seed.is_some() || box_bounds.is_some() {
                    return Err(Error::Input(
                        "--exact does not combine with --samples/--seed/--box".into(),
                    ));
                }
                let cells = coincidence_cells(&func_f, &func_g, norm)?.len();
                let (k, witness) = lipschitz_exact(&func_f, &func_g, norm)?;
                emit(&EstimateOut {
                    k,
                    method: "exact",
                    witness: Some(witness),
                    cells: Some(cells),
                    samples: None,
                    seed: None,
                });
            } else {
                let samples = samples
                    .ok_or_else(|| Error::Input("need --exact or --samples N".into()))?;
                let seed = seed.unwrap_or(0);
                let bounds = box_bounds
                    .ok_or_else(|| Error::Input("--samples requires --box lo,hi".into()))?;
                let (lo, hi) = parse_box(&bounds)?;
                let dim = func_f.dim();
                let k = lipschitz_sampled(
                    &func_f,
                    &func_g,
                    &vec![lo; dim],
                    &vec![hi; dim],
                    samples,
                    seed,
                    norm,
                )?;
                emit(&EstimateOut {
                    k,
                    method: "sampled",
                    witness: None,
                    cells: None,
                    samples: Some(samples),
                    seed: Some(seed),
                });
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Constancy { f, g, grid, eps, tol, norm } => {
            let norm = parse_norm(&norm)?;
            let func_f = load_function(&f)?;
            let func_g = load_function(&g)?;
            let grid = load_points(&grid)?;
            let eps_grid = parse_list(&eps)?;
            let result = check_constancy(&func_f, &func_g, &grid, &eps_grid, tol, norm)?;
            emit(&result);
            Ok(if result.constant { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => error_exit(e),
    }
}
