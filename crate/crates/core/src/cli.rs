//! Command-line front end.
//!
//! Exit codes: 0 success, 1 verify failure or runtime error, 2 bad input,
//! 3 table rows without a solution, 4 simulator width overflow.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bounds::{parse_t_grid, sweep_table, ModelScales, TableMethod, CLI_N_CAP};
use crate::error::Error;
use crate::estimator::{
    estimate_all_order, estimate_qdrift, estimate_qswift, estimate_trotter, plan_budget, EstimatorConfig,
};
use crate::exact_channels::{ideal_expectation, MAX_DENSE_STATE_QUBITS};
use crate::hamiltonian::{parse_hamiltonian, HamiltonianModel, PauliString};
use crate::statevector::{InputState, Observable};
use crate::verify::Suite;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NA_ROWS: i32 = 3;
pub const EXIT_WIDTH: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "hamsim", version, about = "Randomized Hamiltonian simulation compiler and simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Minimal gate counts over a time grid, as CSV or JSON.
    Analyze(AnalyzeArgs),
    /// Run an estimator and report the result as JSON.
    Simulate(SimulateArgs),
    /// Per-bucket sample budgets for a target statistical error.
    Budget(BudgetArgs),
    /// Run the oracle self-checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Text,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub hamiltonian: Option<PathBuf>,
    /// Sum of term strengths.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Largest term strength.
    #[arg(long = "Lambda")]
    pub lambda_max: Option<f64>,
    /// Number of terms.
    #[arg(long = "L")]
    pub terms: Option<usize>,
    #[arg(long, default_value_t = 1e-3)]
    pub epsilon: f64,
    /// `log:a:b:n` or a comma-separated list.
    #[arg(long)]
    pub t_grid: String,
    #[arg(long, default_value = "qdrift,qswift3,qswift6")]
    pub methods: String,
    /// Largest segment count searched.
    #[arg(long, default_value_t = CLI_N_CAP)]
    pub n_cap: u128,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SimMethod {
    Qdrift,
    Qswift,
    QswiftAll,
    Ts,
    Rts,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputArg {
    Plus,
    Zero,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long, value_enum, default_value_t = SimMethod::Qswift)]
    pub method: SimMethod,
    /// qSWIFT order K, or the Trotter order for `ts`/`rts`.
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Segments N (Trotter repetitions r).
    #[arg(long, default_value_t = 64)]
    pub segments: usize,
    /// Circuits for the baseline and for every bucket assignment.
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
    #[arg(long, default_value_t = 100)]
    pub shots: u64,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// System Pauli string; defaults to `Z` on the first qubit.
    #[arg(long)]
    pub observable: Option<String>,
    #[arg(long, value_enum, default_value_t = InputArg::Plus)]
    pub input: InputArg,
    /// Use exact circuit expectations instead of simulated shots.
    #[arg(long)]
    pub exact: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct BudgetArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long)]
    pub t: f64,
    #[arg(long)]
    pub segments: usize,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    #[arg(long)]
    pub epsilon: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// all, swift, channels, slopes or estimator.
    #[arg(long, default_value = "all")]
    pub suite: String,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::MalformedLine { .. }
        | Error::InconsistentWidth { .. }
        | Error::EmptyModel
        | Error::WidthMismatch { .. }
        | Error::OrderExceedsSegments { .. }
        | Error::InvalidArgument(_) => EXIT_INPUT,
        Error::WidthOverflow { .. } => EXIT_WIDTH,
        _ => EXIT_FAILURE,
    }
}

struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure {
            code: exit_code(&e),
            message: e.to_string(),
        }
    }
}

fn input_failure(message: String) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message,
    }
}

fn load_model(path: &Path) -> Result<HamiltonianModel, Failure> {
    let text =
        fs::read_to_string(path).map_err(|e| input_failure(format!("cannot read {}: {e}", path.display())))?;
    parse_hamiltonian(&text).map_err(|e| input_failure(format!("{}: {e}", path.display())))
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure {
        code: EXIT_FAILURE,
        message: e.to_string(),
    };
    match path {
        Some(p) => fs::write(p, text).map_err(io),
        None => out.write_all(text.as_bytes()).map_err(io),
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn analyze(args: &AnalyzeArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let scales = match &args.hamiltonian {
        Some(path) => {
            let model = load_model(path)?;
            ModelScales {
                lambda: model.lambda(),
                lambda_max: model.lambda_max(),
                terms: model.len(),
            }
        }
        None => match (args.lambda, args.lambda_max, args.terms) {
            (Some(lambda), Some(lambda_max), Some(terms)) => ModelScales {
                lambda,
                lambda_max,
                terms,
            },
            _ => {
                return Err(input_failure(
                    "analyze needs --hamiltonian or all of --lambda, --Lambda and --L".into(),
                ))
            }
        },
    };
    let grid = parse_t_grid(&args.t_grid)?;
    let methods = args
        .methods
        .split(',')
        .map(|m| m.parse::<TableMethod>())
        .collect::<Result<Vec<_>, _>>()?;
    let table = sweep_table(scales, &grid, &methods, args.epsilon, args.n_cap)?;
    let text = match args.format {
        Format::Json => to_json(&table),
        _ => table.to_csv(),
    };
    emit(&text, args.out.as_deref(), out)?;
    Ok(if table.has_missing() { EXIT_NA_ROWS } else { EXIT_OK })
}

fn simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = load_model(&args.hamiltonian)?;
    let n = model.n_qubits();
    let observable = match &args.observable {
        Some(s) => s.parse::<PauliString>()?,
        None => crate::estimator::EstimatorConfig::new(n, 1, 1).observable,
    };
    let order = if args.method == SimMethod::Qswift { args.order } else { 1 };
    let mut config = EstimatorConfig::new(n, args.segments, order);
    config.n_sample_0 = args.samples;
    config.n_sample = args.samples;
    config.n_shot_0 = args.shots;
    config.n_shot = args.shots;
    config.seed = args.seed;
    config.observable = observable.clone();
    config.input = match args.input {
        InputArg::Plus => InputState::Plus,
        InputArg::Zero => InputState::Zero,
    };
    config.exact_expectations = args.exact;
    let mut report = match args.method {
        SimMethod::Qdrift => estimate_qdrift(&model, args.t, &config)?,
        SimMethod::Qswift => estimate_qswift(&model, args.t, &config)?,
        SimMethod::QswiftAll => estimate_all_order(&model, args.t, &config)?,
        SimMethod::Ts => estimate_trotter(&model, args.t, args.order, false, &config)?,
        SimMethod::Rts => estimate_trotter(&model, args.t, args.order, true, &config)?,
    };
    if n <= MAX_DENSE_STATE_QUBITS {
        report.reference = Some(ideal_expectation(
            &model,
            args.t,
            config.input,
            &Observable::system(observable),
        )?);
    }
    let text = match args.format {
        Format::Text => {
            let mut s = format!("method {}\nvalue {:.6}\nstderr {:.6}\n", report.method, report.value, report.stderr);
            if let Some(r) = report.reference {
                s.push_str(&format!("reference {r:.6}\n"));
            }
            s
        }
        _ => to_json(&report),
    };
    emit(&text, args.out.as_deref(), out)?;
    Ok(EXIT_OK)
}

fn budget(args: &BudgetArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let model = load_model(&args.hamiltonian)?;
    let table = plan_budget(&model, args.t, args.segments, args.order, args.epsilon)?;
    let text = match args.format {
        Format::Json => to_json(&table),
        _ => {
            let mut s = format!(
                "epsilon {:e} (per estimate {:e})\nbucket,coeff,assignments,n_sample,circuits\nbaseline,1,1,{},{}\n",
                table.epsilon_total, table.epsilon, table.baseline_samples, table.baseline_samples
            );
            for row in &table.buckets {
                s.push_str(&format!(
                    "\"{}\",{:e},{},{},{}\n",
                    row.bucket, row.coeff, row.assignments, row.n_sample, row.circuits
                ));
            }
            s.push_str(&format!("total,,,,{}\n", table.total_circuits));
            s
        }
    };
    emit(&text, args.out.as_deref(), out)?;
    Ok(EXIT_OK)
}

fn verify(args: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let suites = Suite::parse(&args.suite).ok_or_else(|| input_failure(format!("unknown suite '{}'", args.suite)))?;
    let mut failed = 0;
    let mut text = String::new();
    for suite in suites {
        for check in suite.run() {
            if !check.passed {
                failed += 1;
            }
            text.push_str(&format!(
                "{} {} {}\n",
                if check.passed { "PASS" } else { "FAIL" },
                check.name,
                check.detail
            ));
        }
    }
    text.push_str(&format!("{} failed\n", failed));
    emit(&text, None, out)?;
    Ok(if failed == 0 { EXIT_OK } else { EXIT_FAILURE })
}

/// Caps the global worker pool from `HAMSIM_THREADS`.
pub fn configure_threads() {
    if let Some(n) = std::env::var("HAMSIM_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

/// Parses `argv` and runs the command; returns the process exit code.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            if code == EXIT_OK {
                let _ = out.write_all(rendered.as_bytes());
            } else {
                let _ = err.write_all(rendered.as_bytes());
            }
            return code;
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Analyze(a) => analyze(a, out),
        Command::Simulate(a) => simulate(a, out),
        Command::Budget(a) => budget(a, out),
        Command::Verify(a) => verify(a, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let argv = std::iter::once("hamsim").chain(args.iter().copied());
        let code = run(argv, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn analyze_row_count() {
        let (code, out, _) = call(&[
            "analyze", "--lambda", "1", "--Lambda", "0.1", "--L", "100", "--epsilon", "1e-3", "--t-grid",
            "log:1e4:1e10:25", "--methods", "qdrift,qswift3,qswift6",
        ]);
        assert_eq!(code, 0);
        assert_eq!(out.lines().count(), 76);
    }

    #[test]
    fn analyze_needs_scales() {
        let (code, _, err) = call(&["analyze", "--lambda", "1", "--t-grid", "1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("--Lambda"));
    }

    #[test]
    fn missing_file_is_input_error() {
        let (code, _, err) = call(&["simulate", "--hamiltonian", "/nonexistent.ham", "--t", "1"]);
        assert_eq!(code, EXIT_INPUT);
        assert!(err.contains("cannot read"));
    }

    #[test]
    fn unknown_flag_is_input_error() {
        let (code, _, _) = call(&["verify", "--bogus"]);
        assert_eq!(code, EXIT_INPUT);
    }

    #[test]
    fn na_rows_exit_three() {
        let (code, out, _) = call(&[
            "analyze", "--lambda", "1", "--Lambda", "1", "--L", "2", "--t-grid", "1,1e6", "--methods", "qdrift",
            "--n-cap", "100000",
        ]);
        assert_eq!(code, EXIT_NA_ROWS);
        assert!(out.lines().last().unwrap().ends_with(",NA"));
    }
}
