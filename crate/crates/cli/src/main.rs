//! `hetgame`: enumerate, certify and simulate symmetric equilibria of
//! heterogeneous two-action games.
//!
//! Exit codes: 0 success, 1 semantic negative (not an equilibrium, or a
//! failed cross-check), 2 input error. Input errors are written to stderr as
//! `{"error": <kind>, "message": <text>}`.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use hetgame_core::equilibria::{check_equilibrium_conditions, enumerate_all, EquilibriumError};
use hetgame_core::model::{spec_from_json, GameSpec, OrderedPartition, StrategyProfile};
use hetgame_core::oracle::{cross_check, vertex_deviation_check};
use hetgame_core::payoff::{expected_payoff_direct, expected_payoff_factored, incentives};
use hetgame_core::rational::{self, ExactValue, Rational};
use hetgame_core::report::{
    exact_list, records_csv, ConditionsJson, CrossCheckJson, DeviationJson, EnumerationReport,
    PayoffReport, VerifyReport,
};
use hetgame_core::sim::{simulate, DEFAULT_SEED};
use hetgame_core::sweep::{sweep, sweep_csv, SweepError};

#[derive(Parser)]
#[command(name = "hetgame", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// List every symmetric equilibrium with its discrimination level.
    Enumerate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        /// Confirm the list against an exhaustive grid search.
        #[arg(long)]
        cross_check: bool,
        /// Grid resolution used by --cross-check.
        #[arg(long, default_value_t = 8)]
        grid: u32,
    },
    /// Certify a profile by the sign conditions and by pure deviations.
    Verify {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated probabilities, e.g. "0,5/6,1" or "0.5,0.5".
        #[arg(long)]
        profile: String,
    },
    /// Expected payoff of alpha against beta, computed two ways.
    Payoff {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, alias = "profile")]
        alpha: String,
        /// Defaults to alpha (self-play).
        #[arg(long)]
        beta: Option<String>,
    },
    /// Monte Carlo estimate of the payoff under random matching.
    Simulate {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        profile: String,
        /// Opponent profile; defaults to --profile.
        #[arg(long)]
        beta: Option<String>,
        #[arg(long, default_value_t = 100_000)]
        rounds: u64,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    /// Two-block threshold table as y varies with z fixed.
    Sweep {
        #[arg(long)]
        spec: PathBuf,
        /// Comma-separated labels of the high block.
        #[arg(long)]
        t2: String,
        #[arg(long, default_value_t = 100)]
        steps: u32,
        #[arg(long, default_value = "1/10")]
        y_min: String,
        #[arg(long, default_value = "10")]
        y_max: String,
    },
}

struct Failure {
    code: u8,
    kind: String,
    message: String,
}

impl Failure {
    fn input(kind: impl Into<String>, message: impl ToString) -> Failure {
        Failure {
            code: 2,
            kind: kind.into(),
            message: message.to_string(),
        }
    }
}

type Outcome = Result<u8, Failure>;

fn load_spec(path: &PathBuf) -> Result<GameSpec, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::input("Io", format!("{}: {e}", path.display())))?;
    spec_from_json(&text).map_err(|e| Failure::input(e.kind(), e))
}

fn load_profile(spec: &GameSpec, text: &str) -> Result<StrategyProfile, Failure> {
    let values =
        rational::parse_rational_list(text).map_err(|e| Failure::input("ParseError", e))?;
    let profile = StrategyProfile::new(values).map_err(|e| Failure::input(e.kind(), e))?;
    spec.check_profile(&profile)
        .map_err(|e| Failure::input(e.kind(), e))?;
    Ok(profile)
}

fn parse_value(text: &str) -> Result<Rational, Failure> {
    rational::parse_rational(text).map_err(|e| Failure::input("ParseError", e))
}

/// Writes to stdout, ignoring a closed pipe (e.g. output piped into `head`).
fn emit(text: &str) {
    let _ = io::stdout().lock().write_all(text.as_bytes());
}

fn print_json<T: Serialize>(value: &T) {
    emit(&(serde_json::to_string_pretty(value).expect("reports serialize") + "\n"));
}

fn enumerate(spec: &GameSpec, format: Format, check: bool, grid: u32) -> Outcome {
    let records = enumerate_all(spec);
    let mut report = EnumerationReport::new(spec, &records);
    let mut code = 0;
    if check {
        let result = cross_check(spec, grid).map_err(|e| Failure::input("OracleError", e))?;
        let render = |ps: &[StrategyProfile]| ps.iter().map(|p| p.to_string()).collect();
        if !result.agree() {
            code = 1;
        }
        report.cross_check = Some(CrossCheckJson {
            resolution: grid,
            agree: result.agree(),
            searched: result.searched.len(),
            only_enumerated: render(&result.only_enumerated),
            only_searched: render(&result.only_searched),
        });
    }
    match format {
        Format::Json => print_json(&report),
        Format::Csv => {
            let csv = records_csv(spec, &records).map_err(|e| Failure::input("Io", e))?;
            emit(&csv);
            if let Some(cc) = &report.cross_check {
                eprintln!("{}", json!({ "cross_check": cc }));
            }
        }
    }
    Ok(code)
}

fn verify(spec: &GameSpec, profile: &StrategyProfile) -> Outcome {
    let conditions = check_equilibrium_conditions(spec, profile);
    let deviation = vertex_deviation_check(spec, profile);
    let equilibrium = conditions.satisfied && deviation.nash;
    print_json(&VerifyReport {
        profile: exact_list(profile.alphas()),
        equilibrium,
        conditions: ConditionsJson::new(spec, &conditions),
        deviation: DeviationJson::from(&deviation),
    });
    Ok(if equilibrium { 0 } else { 1 })
}

fn payoff(spec: &GameSpec, alpha: &StrategyProfile, beta: &StrategyProfile) -> Outcome {
    let direct = expected_payoff_direct(spec, alpha, beta);
    let factored = expected_payoff_factored(spec, alpha, beta);
    print_json(&PayoffReport {
        alpha: exact_list(alpha.alphas()),
        beta: exact_list(beta.alphas()),
        agree: direct == factored,
        direct: ExactValue::from(&direct),
        factored: ExactValue::from(&factored),
        incentives: exact_list(&incentives(spec, beta).values),
    });
    Ok(0)
}

fn run_sweep(spec: &GameSpec, t2: &str, steps: u32, y_min: &str, y_max: &str) -> Outcome {
    let labels: Vec<&str> = t2
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let partition = OrderedPartition::two_blocks_from_labels(spec, &labels).map_err(|e| {
        Failure::input(
            EquilibriumError::InvalidPartition {
                expected: 2,
                m: spec.num_types(),
            }
            .kind(),
            e,
        )
    })?;
    let rows = sweep(
        spec,
        &partition,
        &parse_value(y_min)?,
        &parse_value(y_max)?,
        steps,
    )
    .map_err(|e| {
        let kind = match &e {
            SweepError::ZeroSteps => "ZeroSteps",
            SweepError::BadRange(..) => "BadRange",
            SweepError::Spec(s) => s.kind(),
            SweepError::Equilibrium(q) => q.kind(),
        };
        Failure::input(kind, e)
    })?;
    emit(&sweep_csv(&rows).map_err(|e| Failure::input("Io", e))?);
    Ok(0)
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Enumerate {
            spec,
            format,
            cross_check,
            grid,
        } => enumerate(&load_spec(&spec)?, format, cross_check, grid),
        Command::Verify { spec, profile } => {
            let spec = load_spec(&spec)?;
            let profile = load_profile(&spec, &profile)?;
            verify(&spec, &profile)
        }
        Command::Payoff { spec, alpha, beta } => {
            let spec = load_spec(&spec)?;
            let alpha = load_profile(&spec, &alpha)?;
            let beta = match beta {
                Some(b) => load_profile(&spec, &b)?,
                None => alpha.clone(),
            };
            payoff(&spec, &alpha, &beta)
        }
        Command::Simulate {
            spec,
            profile,
            beta,
            rounds,
            seed,
        } => {
            let spec = load_spec(&spec)?;
            let alpha = load_profile(&spec, &profile)?;
            let beta = match beta {
                Some(b) => load_profile(&spec, &b)?,
                None => alpha.clone(),
            };
            let report = simulate(&spec, &alpha, &beta, rounds, seed)
                .map_err(|e| Failure::input("ZeroRounds", e))?;
            print_json(&report);
            Ok(0)
        }
        Command::Sweep {
            spec,
            t2,
            steps,
            y_min,
            y_max,
        } => run_sweep(&load_spec(&spec)?, &t2, steps, &y_min, &y_max),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            emit(&e.to_string());
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                json!({ "error": "UsageError", "message": e.to_string().trim_end() })
            );
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("{}", json!({ "error": f.kind, "message": f.message }));
            ExitCode::from(f.code)
        }
    }
}
