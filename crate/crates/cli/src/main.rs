use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use stochorder::json::ExtReal;
use stochorder::maxitive::alpha_min_leveled;
use stochorder::verify::{run_suite, Suite};
use stochorder::{
    alpha_min_from_set, check_order, sup_order, total_variation, Execution, FunctionalSpec,
    OrderRelation, QuantileFamily, StepQuantile,
};

const EXIT_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(name = "stochorder", version, about = "Stochastic orders, suprema and maxitive functionals")]
struct Cli {
    /// Absolute tolerance for order predicates and shape checks.
    #[arg(long, global = true, default_value_t = stochorder::DEFAULT_TOL, value_parser = positive)]
    tol: f64,
    /// Master seed for randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decide `a ≼ b` and print the verdict.
    Check {
        #[arg(long, value_parser = relation)]
        relation: OrderRelation,
        a: PathBuf,
        b: PathBuf,
    },
    /// Least upper bound of the given distributions.
    Sup {
        #[arg(long, value_parser = relation)]
        relation: OrderRelation,
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a functional on a distribution.
    Eval {
        /// Inline JSON or a path to a spec file.
        #[arg(long)]
        spec: String,
        input: PathBuf,
    },
    /// Minimal penalty of an acceptance set, or of nested sets with `--levels`.
    AlphaMin {
        #[arg(long, value_parser = relation)]
        relation: OrderRelation,
        /// A directory of JSON files or a single file; repeat once per level.
        #[arg(long, required = true, num_args = 1..)]
        set: Vec<PathBuf>,
        /// Comma-separated increasing levels, one per `--set`.
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total variation `TV_[u, v]` of a family.
    Tv {
        #[arg(long, required = true, num_args = 1..)]
        set: Vec<PathBuf>,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
    },
    /// Run the oracle-backed property suites.
    Verify {
        #[arg(long, default_value = "all", value_parser = suite)]
        suite: Suite,
        #[arg(long, default_value_t = 100)]
        trials: u64,
    },
    /// CSV samples of `q`, `q⁺`, `Q` or `Q̄` on `u_i = i / (N + 1)`.
    PlotData {
        input: PathBuf,
        #[arg(long, value_enum)]
        what: Curve,
        #[arg(long, default_value_t = 99)]
        points: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Curve {
    #[value(name = "q")]
    Q,
    #[value(name = "qplus")]
    QPlus,
    #[value(name = "Q")]
    Integrated,
    #[value(name = "Qbar")]
    Reflected,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error(transparent)]
    Lib(#[from] stochorder::Error),
    #[error("{0}")]
    Usage(String),
}

type Result<T> = std::result::Result<T, CliError>;

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("must be positive, found {x}")),
        Err(e) => Err(e.to_string()),
    }
}

fn relation(s: &str) -> std::result::Result<OrderRelation, String> {
    s.parse().map_err(|e: stochorder::Error| e.to_string())
}

fn suite(s: &str) -> std::result::Result<Suite, String> {
    s.parse().map_err(|e: stochorder::Error| e.to_string())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn read_distribution(path: &Path) -> Result<StepQuantile> {
    let text = read_text(path)?;
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Expands directories into their `.json` files in name order.
fn expand(paths: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for path in paths {
        if path.is_dir() {
            let entries = fs::read_dir(path).map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            })?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|ext| ext == "json"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(path.clone());
        }
    }
    Ok(out)
}

fn read_family(paths: &[PathBuf]) -> Result<QuantileFamily> {
    let members = expand(paths)?
        .iter()
        .map(|p| read_distribution(p))
        .collect::<Result<Vec<_>>>()?;
    if members.is_empty() {
        return Err(CliError::Usage("no distributions found".into()));
    }
    Ok(QuantileFamily::new(members)?)
}

fn read_spec(arg: &str) -> Result<FunctionalSpec> {
    let (text, origin) = if arg.trim_start().starts_with('{') {
        (arg.to_string(), "--spec".to_string())
    } else {
        (read_text(Path::new(arg))?, arg.to_string())
    };
    serde_json::from_str(&text).map_err(|source| CliError::Json {
        path: origin,
        source,
    })
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

/// Writes `json` to `out`, or returns it for stdout.
fn emit(json: String, out: Option<&Path>) -> Result<String> {
    match out {
        Some(path) => fs::write(path, format!("{json}\n"))
            .map(|_| String::new())
            .map_err(|source| CliError::Io {
                path: path.display().to_string(),
                source,
            }),
        None => Ok(format!("{json}\n")),
    }
}

#[derive(Serialize)]
struct ValueOut {
    value: ExtReal,
}

#[derive(Serialize)]
struct TvOut {
    tv: ExtReal,
    interval: [f64; 2],
}

fn plot_rows(q: &StepQuantile, what: Curve, points: usize) -> Result<String> {
    if points == 0 {
        return Err(CliError::Usage("--points must be positive".into()));
    }
    let integrated = q.integrated();
    let reflected = q.reflected_integrated();
    let mut csv = String::from("u,value\n");
    for i in 1..=points {
        let u = i as f64 / (points as f64 + 1.0);
        let value = match what {
            Curve::Q => q.eval(u)?,
            Curve::QPlus => q.eval_plus(u)?,
            Curve::Integrated => integrated.eval(u),
            Curve::Reflected => reflected.eval(u),
        };
        csv.push_str(&format!("{u:.16e},{value:.16e}\n"));
    }
    Ok(csv)
}

/// Output of one command.
#[derive(Debug)]
struct Outcome {
    stdout: String,
    /// False when a verification suite found violations.
    passed: bool,
}

fn run(cli: Cli) -> Result<Outcome> {
    let tol = cli.tol;
    let stdout = match cli.command {
        Command::Check { relation, a, b } => {
            let (a, b) = (read_distribution(&a)?, read_distribution(&b)?);
            emit(to_json(&check_order(relation, &a, &b, tol)), None)?
        }
        Command::Sup {
            relation,
            inputs,
            out,
        } => {
            let fam = read_family(&inputs)?;
            let s = sup_order(relation, &fam, tol)?;
            emit(to_json(&s), out.as_deref())?
        }
        Command::Eval { spec, input } => {
            let spec = read_spec(&spec)?;
            spec.validate(tol)?;
            let q = read_distribution(&input)?;
            let value = spec.evaluate(&q, tol)?;
            emit(to_json(&ValueOut { value: ExtReal(value) }), None)?
        }
        Command::AlphaMin {
            relation,
            set,
            levels,
            out,
        } => {
            let json = match levels {
                None => to_json(&alpha_min_from_set(relation, &read_family(&set)?, tol)?),
                Some(levels) => {
                    if levels.len() != set.len() {
                        return Err(CliError::Usage(format!(
                            "{} levels need {} --set values, found {}",
                            levels.len(),
                            levels.len(),
                            set.len()
                        )));
                    }
                    let sets = set
                        .iter()
                        .map(|p| read_family(std::slice::from_ref(p)))
                        .collect::<Result<Vec<_>>>()?;
                    to_json(&alpha_min_leveled(relation, &levels, &sets, tol)?)
                }
            };
            emit(json, out.as_deref())?
        }
        Command::Tv { set, from, to } => {
            let fam = read_family(&set)?;
            let tv = total_variation(&fam, from, to)?;
            emit(
                to_json(&TvOut {
                    tv: ExtReal(tv),
                    interval: [from, to],
                }),
                None,
            )?
        }
        Command::Verify { suite, trials } => {
            let report = run_suite(suite, trials, cli.seed, tol, Execution::default());
            return Ok(Outcome {
                stdout: emit(to_json(&report), None)?,
                passed: report.passed(),
            });
        }
        Command::PlotData {
            input,
            what,
            points,
        } => {
            plot_rows(&read_distribution(&input)?, what, points)?
        }
    };
    Ok(Outcome {
        stdout,
        passed: true,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(outcome) => {
            let mut stdout = io::stdout().lock();
            if stdout.write_all(outcome.stdout.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_INPUT);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_VIOLATION)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
