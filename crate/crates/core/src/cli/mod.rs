//! Command-line front end.
//!
//! Exit codes: 0 success, 1 configuration, expression or I/O error, 2
//! Picard non-convergence, 3 failed verification.

pub mod config;
pub mod output;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::assembly::{classify_case_eps, generalized_dalembert_holds, solve, JumpData, Solution};
use crate::error::Error;
use crate::verify::{check_definition1, convergence_study_with, Reference, ToleranceProfile};
use config::Config;
use output::{machine, ClassifyReport, ConvergeOutput, SolveReport, StripSummary, VerifyOutput};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_NONCONVERGENCE: i32 = 2;
pub const EXIT_VERIFICATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "charwave", version, about = "Wave equation with a jump in the initial data, by characteristics")]
struct Cli {
    /// Print reports as TOML instead of text.
    #[arg(long, global = true)]
    machine: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve and write the window nodes as CSV.
    Solve {
        config: PathBuf,
        /// Output file; standard output when omitted.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Report which of the three jump cases the data falls in.
    Classify {
        config: PathBuf,
        /// Treat values closer than this as equal.
        #[arg(long, default_value_t = 0.0)]
        case_eps: f64,
    },
    /// Solve and check the solution conditions.
    Verify { config: PathBuf },
    /// Convergence study against `exact` or, for linear problems, the
    /// quadrature oracle.
    Converge {
        config: PathBuf,
        #[arg(long, default_value_t = 3)]
        levels: usize,
        /// Quadrature intervals per direction for the oracle.
        #[arg(long, default_value_t = 1024)]
        quad_n: usize,
        #[arg(long, default_value_t = 400)]
        probes: usize,
    },
}

/// Failure of a subcommand, carrying its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
            _ => EXIT_CONFIG,
        };
        Failure { code, message: e.to_string() }
    }
}

fn config_failure(message: String) -> Failure {
    Failure { code: EXIT_CONFIG, message }
}

fn load(path: &PathBuf) -> Result<Config, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| config_failure(format!("cannot read {}: {e}", path.display())))?;
    let cfg = Config::from_toml_str(&text)
        .map_err(|e| config_failure(format!("{}: {e}", path.display())))?;
    cfg.validate()?;
    Ok(cfg)
}

fn solve_config(cfg: &Config) -> Result<Solution, Failure> {
    let spec = cfg.spec()?;
    Ok(solve(&spec, &cfg.grid_params(), &cfg.picard_params())?)
}

/// Runs the command line `args` (program name first), writing to the given
/// streams. Returns the exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            let shown = matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion);
            let text = e.render().to_string();
            if shown {
                let _ = out.write_all(text.as_bytes());
                return EXIT_OK;
            }
            let _ = err.write_all(text.as_bytes());
            return EXIT_CONFIG;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// [`run_with`] on the process's standard streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes())
        .map_err(|e| config_failure(format!("cannot write output: {e}")))
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    match &cli.command {
        Command::Solve { config, output } => {
            let cfg = load(config)?;
            let sol = solve_config(&cfg)?;
            match output {
                Some(path) => {
                    let mut file = fs::File::create(path)
                        .map_err(|e| config_failure(format!("cannot create {}: {e}", path.display())))?;
                    output::write_csv(&sol, &mut file)
                        .map_err(|e| config_failure(format!("cannot write {}: {e}", path.display())))?;
                    let rep = SolveReport::new(&sol);
                    let text = if cli.machine { machine("solve", &rep) } else { rep.text() };
                    emit(out, &text)?;
                }
                None => output::write_csv(&sol, out)
                    .map_err(|e| config_failure(format!("cannot write output: {e}")))?,
            }
            Ok(EXIT_OK)
        }
        Command::Classify { config, case_eps } => {
            let cfg = load(config)?;
            let spec = cfg.spec()?;
            let case = classify_case_eps(&spec, *case_eps)?;
            let rep = ClassifyReport::new(case, &JumpData::of(&spec)?, generalized_dalembert_holds(&spec)?);
            let text = if cli.machine { machine("classify", &rep) } else { rep.text() };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
        Command::Verify { config } => {
            let cfg = load(config)?;
            let sol = solve_config(&cfg)?;
            let report = check_definition1(&sol, &ToleranceProfile::default());
            let passed = report.passed;
            let rep = VerifyOutput {
                case: sol.case().to_string(),
                report,
                picard: StripSummary::of(&sol),
            };
            let text = if cli.machine { machine("verify", &rep) } else { rep.text() };
            emit(out, &text)?;
            Ok(if passed { EXIT_OK } else { EXIT_VERIFICATION })
        }
        Command::Converge { config, levels, quad_n, probes } => {
            let cfg = load(config)?;
            let spec = cfg.spec()?;
            let (reference, name) = match cfg.exact_expr()? {
                Some(e) => (Reference::Manufactured(e), "exact".to_string()),
                None if spec.nonlinearity.is_zero_literal() => (
                    Reference::Oracle { quad_n: *quad_n, jump_term: true },
                    format!("quadrature oracle ({quad_n} intervals)"),
                ),
                None => {
                    return Err(config_failure(
                        "converge needs `exact` in the config unless f is the literal 0".into(),
                    ))
                }
            };
            let study = convergence_study_with(
                &spec,
                &reference,
                &cfg.grid_params(),
                &cfg.picard_params(),
                *levels,
                *probes,
            )?;
            let rep = ConvergeOutput { reference: name, study };
            let text = if cli.machine { machine("converge", &rep) } else { rep.text() };
            emit(out, &text)?;
            Ok(EXIT_OK)
        }
    }
}
