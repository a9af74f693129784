//! Command-line interface: measure I/O, seeded generation, the barycenter
//! and transport solvers, and the verification suites.
//!
//! Exit codes: 0 success, 2 schema/usage violation, 3 solver
//! non-convergence, 4 verification failure (first counterexample
//! serialized in the report), 1 anything else.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use serde_json::json;

use spdmean::barycenter::{cartan_barycenter, Initialization, SolverOptions};
use spdmean::error::Error;
use spdmean::io;
use spdmean::measure::wasserstein;
use spdmean::randgen::{random_measure, rng_from_seed};
use spdmean::trotter::lie_trotter_curve;
use spdmean::verify::{run_suites, SuiteConfig, SuiteKind};

/// Environment variable holding default tolerance overrides as
/// comma-separated `name=value` pairs (e.g. `residual=1e-9,agh=1e-7`).
const TOL_ENV: &str = "SPDMEAN_TOLS";

#[derive(Parser)]
#[command(
    name = "spdmean",
    version,
    about = "Cartan barycenters and matrix-mean inequalities on the positive definite cone"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the Cartan barycenter of a measure file.
    Barycenter {
        /// Input measure (JSON).
        #[arg(short, long)]
        input: PathBuf,
        /// Relative residual tolerance (default 1e-10).
        #[arg(long)]
        tol: Option<f64>,
        /// Iteration budget (default 1000).
        #[arg(long)]
        max_iter: Option<usize>,
        /// Initialization: logmean | arith.
        #[arg(long, default_value = "logmean")]
        init: String,
        /// Report destination (default stdout).
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// p-Wasserstein distance between two measure files.
    Wasserstein {
        #[arg(short)]
        a: PathBuf,
        #[arg(short)]
        b: PathBuf,
        #[arg(short, default_value_t = 2.0)]
        p: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run seeded verification suites.
    Verify {
        /// Comma-separated suites: contraction, monotonicity, logmaj,
        /// commute, agh, trotter, sandwich.
        #[arg(long, value_delimiter = ',', required = true)]
        suites: Vec<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Matrix dimension of generated instances.
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Atom-count cap of generated measures.
        #[arg(long, default_value_t = 5)]
        atoms: usize,
        /// Condition-number cap of generated atoms.
        #[arg(long, default_value_t = 100.0)]
        kappa: f64,
        /// Tolerance override `name=value`; repeatable. Overrides SPDMEAN_TOLS.
        #[arg(long = "tol")]
        tols: Vec<String>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Sample the curve G(mu^t)^(1/t) toward its small-t limit.
    LieTrotter {
        #[arg(short, long)]
        input: PathBuf,
        /// Comma-separated t grid (nonzero, e.g. 1,0.5,0.1).
        #[arg(long, value_delimiter = ',', required = true)]
        grid: Vec<f64>,
        /// Also write a (t, distance) CSV here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Solver tolerance before per-t tightening (default 1e-10).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Generate a seeded random measure file.
    Gen {
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        atoms: usize,
        /// Condition-number cap (>= 1).
        #[arg(long)]
        kappa: f64,
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::Schema(_)
                | Error::Json(_)
                | Error::InvalidArgument(_)
                | Error::InvalidMeasure(_)
                | Error::BadEntryCount { .. }
                | Error::EmptyMatrix
                | Error::DimensionMismatch { .. }
                | Error::NotPositiveDefinite { .. } => 2,
                Error::SolverDidNotConverge { .. } | Error::CurveAborted { .. } => 3,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(command: Command) -> Result<ExitCode, Error> {
    let env_tols = parse_tols(
        &std::env::var(TOL_ENV)
            .ok()
            .map(|v| v.split(',').map(str::to_string).collect::<Vec<_>>())
            .unwrap_or_default(),
    )?;
    match command {
        Command::Barycenter {
            input,
            tol,
            max_iter,
            init,
            output,
        } => {
            let mu = io::load_measure(&input)?;
            let mut opts = SolverOptions::default();
            if let Some(t) = tol.or_else(|| env_tols.get("residual").copied()) {
                opts.residual_tol = t;
            }
            if let Some(n) = max_iter {
                opts.max_iter = n;
            }
            opts.init = match init.as_str() {
                "logmean" => Initialization::LogMean,
                "arith" => Initialization::Arithmetic,
                other => {
                    return Err(Error::InvalidArgument(format!(
                        "unknown init '{other}' (expected logmean or arith)"
                    )))
                }
            };
            let res = cartan_barycenter(&mu, &opts)?;
            let report = json!({
                "point": io::matrix_to_value(res.point.hermitian()),
                "residual": res.residual_norm,
                "iterations": res.iterations,
                "converged": res.converged,
            });
            emit(&output, &pretty(&report))?;
            Ok(if res.converged {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(3)
            })
        }
        Command::Wasserstein { a, b, p, output } => {
            let mu = io::load_measure(&a)?;
            let nu = io::load_measure(&b)?;
            let (distance, coupling) = wasserstein(&mu, &nu, p)?;
            let n = mu.len();
            let k = nu.len();
            let mass: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..k).map(|j| coupling.mass(i, j)).collect())
                .collect();
            let report = json!({
                "p": p,
                "distance": distance,
                "coupling": mass,
            });
            emit(&output, &pretty(&report))?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify {
            suites,
            seed,
            trials,
            m,
            atoms,
            kappa,
            tols,
            output,
        } => {
            let kinds: Vec<SuiteKind> = suites
                .iter()
                .filter(|s| !s.is_empty())
                .map(|s| SuiteKind::from_str(s))
                .collect::<Result<_, _>>()?;
            if kinds.is_empty() {
                return Err(Error::InvalidArgument("no suites selected".into()));
            }
            let mut tolerances = env_tols;
            tolerances.extend(parse_tols(&tols)?);
            let cfg = SuiteConfig {
                seed,
                trials,
                dim: m,
                atoms,
                kappa,
                tolerances,
            };
            let reports = run_suites(&kinds, &cfg)?;
            let pass = reports.iter().all(|r| r.pass);
            let report = json!({
                "seed": seed,
                "trials": trials,
                "m": m,
                "atoms": atoms,
                "kappa": kappa,
                "suites": reports,
                "pass": pass,
            });
            emit(&output, &pretty(&report))?;
            Ok(if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(4)
            })
        }
        Command::LieTrotter {
            input,
            grid,
            csv,
            tol,
            output,
        } => {
            let mu = io::load_measure(&input)?;
            let mut opts = SolverOptions::default();
            if let Some(t) = tol.or_else(|| env_tols.get("residual").copied()) {
                opts.residual_tol = t;
            }
            match lie_trotter_curve(&mu, &grid, &opts) {
                Ok(curve) => {
                    let report = json!({
                        "target": io::matrix_to_value(curve.target.hermitian()),
                        "points": curve_points(&curve),
                    });
                    emit(&output, &pretty(&report))?;
                    if let Some(path) = csv {
                        std::fs::write(&path, curve_csv(&curve))?;
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(Error::CurveAborted {
                    at_t,
                    cause,
                    partial,
                }) => {
                    let report = json!({
                        "target": io::matrix_to_value(partial.target.hermitian()),
                        "points": curve_points(&partial),
                        "aborted_at": at_t,
                        "error": cause.to_string(),
                    });
                    emit(&output, &pretty(&report))?;
                    if let Some(path) = csv {
                        std::fs::write(&path, curve_csv(&partial))?;
                    }
                    Ok(ExitCode::from(3))
                }
                Err(other) => Err(other),
            }
        }
        Command::Gen {
            seed,
            m,
            atoms,
            kappa,
            output,
        } => {
            if !(kappa >= 1.0) {
                return Err(Error::InvalidArgument(format!(
                    "condition cap {kappa} must be >= 1"
                )));
            }
            if m == 0 || atoms == 0 {
                return Err(Error::InvalidArgument(
                    "dimension and atom count must be positive".into(),
                ));
            }
            let mut rng = rng_from_seed(seed);
            let mu = random_measure(&mut rng, m, atoms, kappa, false);
            io::save_measure(&output, &mu)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn curve_points(curve: &spdmean::trotter::TrotterCurve) -> serde_json::Value {
    let points: Vec<serde_json::Value> = curve
        .ts
        .iter()
        .zip(curve.points.iter().zip(&curve.distances))
        .map(|(&t, (point, &distance))| {
            json!({
                "t": t,
                "matrix": io::matrix_to_value(point.hermitian()),
                "distance": distance,
            })
        })
        .collect();
    serde_json::Value::Array(points)
}

fn curve_csv(curve: &spdmean::trotter::TrotterCurve) -> String {
    let mut out = String::from("t,distance\n");
    for (t, d) in curve.ts.iter().zip(&curve.distances) {
        out.push_str(&format!("{t},{d}\n"));
    }
    out
}

fn parse_tols(pairs: &[String]) -> Result<BTreeMap<String, f64>, Error> {
    let mut map = BTreeMap::new();
    for pair in pairs.iter().filter(|p| !p.is_empty()) {
        let Some((name, value)) = pair.split_once('=') else {
            return Err(Error::InvalidArgument(format!(
                "tolerance override '{pair}' is not name=value"
            )));
        };
        let value: f64 = value.parse().map_err(|_| {
            Error::InvalidArgument(format!("tolerance '{pair}' has a non-numeric value"))
        })?;
        map.insert(name.trim().to_string(), value);
    }
    Ok(map)
}

fn pretty(value: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

fn emit(output: &Option<PathBuf>, text: &str) -> Result<(), Error> {
    match output {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}
