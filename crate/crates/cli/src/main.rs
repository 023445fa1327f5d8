//! Single entry point for the moment/cumulant toolkit: transforms, criterion
//! checks, Wasserstein gap brackets, Monte Carlo sampling, GUE estimation and
//! the constrained moment optimizer, all speaking JSON (CSV where noted).
//!
//! Exit codes: 0 success, 1 invalid input (schema or precondition),
//! 2 criterion violated under --strict, 3 numerical failure (optimizer
//! non-convergence).

use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use second_chaos::criteria::{self, CriterionReport, Verdict, W2Mode};
use second_chaos::monte_carlo;
use second_chaos::optimizer::{self, OptimizationProblem};
use second_chaos::partitions::PartitionCaps;
use second_chaos::spectral::cumulants_from_coefficients;
use second_chaos::transforms;
use second_chaos::{CoefficientSequence, Error as CoreError, MomentSequence};

const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Parser)]
#[command(name = "second-chaos", version, about = "Moment calculus for second-order chaos")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum TransformPath {
    #[default]
    Recursive,
    Enum,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Cumulants of a coefficient sequence, orders 1..=max-order
    Cumulants {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        /// JSON file with {"kind": ..., "lambda": [...]}; stdin when absent
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Moments of a coefficient sequence
    Moments {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        /// Conversion route; the partition-sum route is capped (see
        /// SECOND_CHAOS_ENUM_CAP)
        #[arg(long, value_enum, default_value_t)]
        path: TransformPath,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Cumulants from a centered moment sequence
    Invert {
        #[arg(long, default_value_t = 8)]
        max_order: usize,
        /// JSON file with {"kind": ..., "values": [...]}; stdin when absent
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Every applicable criterion for a coefficient sequence
    Check {
        /// Absolute tolerance for equality verdicts
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Exit with status 2 when any verdict is "violated"
        #[arg(long)]
        strict: bool,
        #[arg(long, value_enum, default_value_t)]
        format: OutputFormat,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Wasserstein-2 bracket (the quantity under the square root)
    W2gap {
        /// Even moment order 2r (r >= 3) for the single-moment bracket;
        /// default is the sextic bracket
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Seeded draws of a classical second-chaos variable, as CSV
    Simulate {
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// GUE random-matrix estimate of a free moment
    Gue {
        #[arg(long, default_value_t = 4)]
        order: usize,
        #[arg(long, default_value_t = 256)]
        matrix_size: usize,
        #[arg(long, default_value_t = 16)]
        replicas: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Constrained fourth-moment optimization from a problem description
    Optimize {
        /// JSON problem file; stdin when absent
        #[arg(long)]
        input: Option<PathBuf>,
    },
}

enum CliError {
    Core(CoreError),
    Io(std::io::Error),
    Parse(serde_json::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(CoreError::Numerical(_)) => 3,
            CliError::Core(_) | CliError::Io(_) | CliError::Parse(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Parse(e) => write!(f, "invalid input: {e}"),
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Parse(e)
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, CliError> {
    match path {
        Some(p) if p.as_os_str() != "-" => Ok(std::fs::read_to_string(p)?),
        _ => {
            let mut buf = String::new();
            std::io::stdin().read_to_string(&mut buf)?;
            Ok(buf)
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> Result<T, CliError> {
    Ok(serde_json::from_str(text)?)
}

fn caps_from_env() -> PartitionCaps {
    std::env::var("SECOND_CHAOS_ENUM_CAP")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .map(PartitionCaps::uniform)
        .unwrap_or_default()
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    println!("{}", serde_json::to_string(value)?);
    Ok(())
}

/// Stable field order: name,lhs,rhs,gap,verdict,tolerance; rows keep the
/// request order.
fn render_report(reports: &[CriterionReport], format: OutputFormat) -> Result<String, CliError> {
    match format {
        OutputFormat::Json => Ok(serde_json::to_string(reports)?),
        OutputFormat::Csv => {
            let mut out = String::from("name,lhs,rhs,gap,verdict,tolerance\n");
            for r in reports {
                let verdict = match r.verdict {
                    Verdict::Holds => "holds",
                    Verdict::Violated => "violated",
                    Verdict::Equality => "equality",
                };
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r.name, r.lhs, r.rhs, r.gap, verdict, r.tolerance
                ));
            }
            Ok(out)
        }
    }
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Cumulants { max_order, input } => {
            let seq: CoefficientSequence = parse(&read_input(&input)?)?;
            let c = cumulants_from_coefficients(&seq, max_order)?;
            print_json(&c)?;
            Ok(0)
        }
        Command::Moments {
            max_order,
            path,
            input,
        } => {
            let seq: CoefficientSequence = parse(&read_input(&input)?)?;
            let c = cumulants_from_coefficients(&seq, max_order)?;
            let m = match path {
                TransformPath::Recursive => {
                    transforms::moments_from_cumulants_recursive(&c, max_order)?
                }
                TransformPath::Enum => {
                    transforms::moments_from_cumulants_enum(&c, max_order, &caps_from_env())?
                }
            };
            print_json(&m)?;
            Ok(0)
        }
        Command::Invert { max_order, input } => {
            let m: MomentSequence = parse(&read_input(&input)?)?;
            let c = transforms::cumulants_from_moments(&m, max_order)?;
            print_json(&c)?;
            Ok(0)
        }
        Command::Check {
            tolerance,
            strict,
            format,
            input,
        } => {
            let seq: CoefficientSequence = parse(&read_input(&input)?)?;
            let reports = criteria::standard_battery(&seq, tolerance)?;
            print!("{}", render_report(&reports, format)?);
            if format == OutputFormat::Json {
                println!();
            }
            let violated = reports.iter().any(|r| r.verdict == Verdict::Violated);
            Ok(if strict && violated { 2 } else { 0 })
        }
        Command::W2gap { order, input } => {
            let seq: CoefficientSequence = parse(&read_input(&input)?)?;
            let (mode, name, needed) = match order {
                None => (W2Mode::Sextic, "w2-sextic-bracket".to_string(), 6),
                Some(o) => {
                    if o % 2 != 0 || o < 6 {
                        return Err(CoreError::InvalidInput(
                            "order must be an even integer >= 6".into(),
                        )
                        .into());
                    }
                    (
                        W2Mode::Even { r: o / 2 },
                        format!("w2-even-bracket[r={}]", o / 2),
                        o,
                    )
                }
            };
            let c = cumulants_from_coefficients(&seq, needed)?;
            let m = transforms::moments_from_cumulants_recursive(&c, needed)?;
            let bracket = criteria::w2_gap(&m, mode)?;
            #[derive(Serialize)]
            struct Bracket {
                name: String,
                bracket: f64,
                root: f64,
            }
            print_json(&Bracket {
                name,
                bracket,
                root: bracket.max(0.0).sqrt(),
            })?;
            Ok(0)
        }
        Command::Simulate {
            samples,
            seed,
            input,
        } => {
            let seq: CoefficientSequence = parse(&read_input(&input)?)?;
            let batch = monte_carlo::sample_classical(&seq, samples, seed)?;
            println!(
                "# seed={} count={} kind={} lambda={}",
                seed,
                samples,
                seq.kind(),
                serde_json::to_string(seq.lambdas())?
            );
            println!("value");
            let mut out = String::new();
            for v in batch.values() {
                out.push_str(&format!("{v}\n"));
            }
            print!("{out}");
            Ok(0)
        }
        Command::Gue {
            order,
            matrix_size,
            replicas,
            seed,
            input,
        } => {
            let seq: CoefficientSequence = parse(&read_input(&input)?)?;
            let est =
                monte_carlo::gue_free_moment_estimate(&seq, order, matrix_size, replicas, seed)?;
            print_json(&est)?;
            Ok(0)
        }
        Command::Optimize { input } => {
            let problem: OptimizationProblem = parse(&read_input(&input)?)?;
            let result = optimizer::minimize_fourth_moment(&problem)?;
            print_json(&result)?;
            Ok(if result.converged { 0 } else { 3 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
