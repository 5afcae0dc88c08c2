//! Command-line interface over the library.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for invalid problems,
//! 3 when a query cannot be answered at the requested spectral parameter
//! (singular set, spectrum, non-definite problem, ...).

use std::collections::BTreeMap;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use floquet::error::Error;
use floquet::io::{
    bands_json, check_example, discriminant_sweep, find_example, greens_json, monodromy_json,
    parse_problem, registry, render_report, resolve_params, sweep_csv, to_json_pretty,
    ProblemError,
};
use floquet::linalg::C64;
use floquet::measure::{validate_system, CanonicalSystem};
use floquet::monodromy::floquet_data;
use floquet::scalar::scalar_spectrum;
use floquet::spectral::{classify_lambda, stability_bands, BandOptions, LambdaClass};

#[derive(Parser)]
#[command(
    name = "floquet",
    version,
    about = "Floquet data, spectral bands and Green's functions for periodic canonical systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Csv,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Check a problem file and print its validation report
    Validate {
        /// path to a problem file
        #[arg(long)]
        problem: PathBuf,
    },
    /// Sample the discriminant over a parameter window
    Discriminant {
        #[arg(long)]
        problem: PathBuf,
        /// lower end of the parameter window
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: f64,
        /// upper end of the parameter window
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: f64,
        /// number of evenly spaced samples (1 samples only lambda-min)
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        output: OutputFormat,
    },
    /// Locate the spectral bands inside a window (JSON)
    Bands {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: f64,
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: f64,
        /// discriminant samples used to bracket band edges
        #[arg(long, default_value_t = 2001)]
        grid_n: usize,
        /// relative tolerance for band-edge locations
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
    /// Monodromy matrix, multipliers and Floquet structure at one parameter (JSON)
    Monodromy {
        #[arg(long)]
        problem: PathBuf,
        /// real part of the spectral parameter
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        /// imaginary part of the spectral parameter
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_im: f64,
    },
    /// Green's function value at one parameter and position pair (JSON)
    Greens {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        lambda: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        lambda_im: f64,
        /// first position argument
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        /// second position argument
        #[arg(long, allow_hyphen_values = true)]
        y: f64,
    },
    /// Built-in example systems
    Examples {
        #[command(subcommand)]
        action: ExamplesAction,
    },
}

#[derive(Subcommand)]
enum ExamplesAction {
    /// List the available examples with their parameters and windows
    List,
    /// Compare the numeric discriminant of an example to its closed form
    Check {
        name: String,
        /// override a parameter, e.g. --set a=1.5 (repeatable)
        #[arg(long = "set", value_parser = parse_assignment)]
        set: Vec<(String, f64)>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
    },
    /// Sample the discriminant of an example over a window
    Discriminant {
        name: String,
        #[arg(long = "set", value_parser = parse_assignment)]
        set: Vec<(String, f64)>,
        /// lower end of the window (default: the example's own)
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: Option<f64>,
        /// upper end of the window (default: the example's own)
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 201)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
        output: OutputFormat,
    },
    /// Locate the spectral bands of an example (JSON)
    Bands {
        name: String,
        #[arg(long = "set", value_parser = parse_assignment)]
        set: Vec<(String, f64)>,
        #[arg(long, allow_hyphen_values = true)]
        lambda_min: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        lambda_max: Option<f64>,
        #[arg(long, default_value_t = 2001)]
        grid_n: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
    },
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (key, value) = s
        .split_once('=')
        .ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let value: f64 = value
        .parse()
        .map_err(|e| format!("bad value in `{s}`: {e}"))?;
    Ok((key.trim().to_string(), value))
}

/// A command failure: what to print on stderr and which code to exit with.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            code: 1,
            message: message.into(),
        }
    }
}

type CmdResult = Result<(), Failure>;

/// Write to stdout; a closed pipe (e.g. piping into `head`) ends the
/// program quietly instead of panicking.
fn emit(text: &str) -> CmdResult {
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Err(Failure {
            code: 0,
            message: String::new(),
        }),
        Err(e) => Err(Failure {
            code: 1,
            message: format!("cannot write output: {e}"),
        }),
    }
}

/// Exit code for a library error: invalid problems are 2, everything that
/// depends on the spectral parameter or the definiteness of the problem is
/// 3, and plain misuse is 1.
fn code_for(err: &Error) -> u8 {
    match err {
        Error::InvalidSystem(_) => 2,
        Error::Structure(_) | Error::NotPlanar | Error::NotScalar | Error::AnchorAtAtom(_) => 1,
        _ => 3,
    }
}

fn fail(err: Error) -> Failure {
    Failure {
        code: code_for(&err),
        message: err.to_string(),
    }
}

/// Best-effort classification label appended to parameter-dependent errors.
fn classification(sys: &CanonicalSystem, lambda: C64) -> Option<&'static str> {
    match classify_lambda(sys, lambda).ok()? {
        LambdaClass::Singular { .. } => Some("singular"),
        LambdaClass::BandInterior => Some("band_interior"),
        LambdaClass::BandEdge => Some("band_edge"),
        LambdaClass::Resolvent => Some("resolvent"),
    }
}

fn fail_at(sys: &CanonicalSystem, lambda: C64, err: Error) -> Failure {
    let code = code_for(&err);
    let mut message = err.to_string();
    if code == 3 {
        if let Some(label) = classification(sys, lambda) {
            message.push_str(&format!("\nclassification: {label}"));
        }
    }
    Failure { code, message }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::usage(format!("cannot read {}: {e}", path.display())))
}

fn load_problem(path: &Path) -> Result<CanonicalSystem, Failure> {
    let text = read_file(path)?;
    parse_problem(&text).map_err(|e| Failure {
        code: 2,
        message: e.to_string(),
    })
}

fn check_window(lo: f64, hi: f64) -> Result<(), Failure> {
    if lo.is_finite() && hi.is_finite() && lo < hi {
        Ok(())
    } else {
        Err(Failure::usage(format!(
            "empty parameter window [{lo}, {hi}]: lambda-min must be below lambda-max"
        )))
    }
}

fn run_discriminant(
    sys: &CanonicalSystem,
    lo: f64,
    hi: f64,
    samples: usize,
    output: OutputFormat,
) -> CmdResult {
    if samples == 0 {
        return Err(Failure::usage("samples must be at least 1"));
    }
    if samples > 1 {
        check_window(lo, hi)?;
    }
    if sys.n != 2 {
        return Err(Failure::usage(
            "the discriminant is defined for planar (n = 2) problems; for n = 1 use `bands`",
        ));
    }
    let rows = discriminant_sweep(sys, lo, hi, samples);
    match output {
        OutputFormat::Csv => emit(&sweep_csv(&rows)),
        OutputFormat::Json => emit(&format!("{}\n", to_json_pretty(&rows))),
    }
}

fn run_bands(sys: &CanonicalSystem, lo: f64, hi: f64, grid_n: usize, tol: f64) -> CmdResult {
    check_window(lo, hi)?;
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Failure::usage(format!("tol must be positive, got {tol}")));
    }
    let report = if sys.n == 1 {
        scalar_spectrum(sys, lo, hi, grid_n.max(2))
    } else {
        if grid_n < 2 {
            return Err(Failure::usage("grid-n must be at least 2"));
        }
        let opts = BandOptions {
            grid: grid_n,
            tol,
            ..BandOptions::default()
        };
        stability_bands(sys, lo, hi, &opts)
    }
    .map_err(fail)?;
    emit(&format!("{}\n", to_json_pretty(&bands_json(&report))))
}

fn cmd_validate(path: &Path) -> CmdResult {
    let text = read_file(path)?;
    match parse_problem(&text) {
        Ok(sys) => emit(&render_report(&validate_system(&sys))),
        Err(ProblemError::Invalid(report)) => {
            emit(&render_report(&report))?;
            Err(Failure {
                code: 2,
                message: String::new(),
            })
        }
        Err(other) => Err(Failure {
            code: 2,
            message: other.to_string(),
        }),
    }
}

fn cmd_monodromy(path: &Path, lambda: C64) -> CmdResult {
    let sys = load_problem(path)?;
    if sys.n != 2 {
        return Err(Failure::usage(
            "monodromy is defined for planar (n = 2) problems",
        ));
    }
    let data = floquet_data(&sys, lambda).map_err(|e| fail_at(&sys, lambda, e))?;
    emit(&format!("{}\n", to_json_pretty(&monodromy_json(&data))))
}

fn cmd_greens(path: &Path, lambda: C64, x: f64, y: f64) -> CmdResult {
    let sys = load_problem(path)?;
    if sys.n != 2 {
        return Err(Failure::usage(
            "the Green's function query is defined for planar (n = 2) problems",
        ));
    }
    let value =
        floquet::greens::greens_function(&sys, lambda, x, y).map_err(|e| fail_at(&sys, lambda, e))?;
    emit(&format!("{}\n", to_json_pretty(&greens_json(&value))))
}

fn example_entry(name: &str) -> Result<&'static floquet::io::ExampleEntry, Failure> {
    find_example(name).ok_or_else(|| {
        let names: Vec<&str> = registry().iter().map(|e| e.name).collect();
        Failure::usage(format!(
            "unknown example `{name}`; available: {}",
            names.join(", ")
        ))
    })
}

fn example_system(
    name: &str,
    set: &[(String, f64)],
) -> Result<(&'static floquet::io::ExampleEntry, BTreeMap<String, f64>, CanonicalSystem), Failure>
{
    let entry = example_entry(name)?;
    let overrides: BTreeMap<String, f64> = set.iter().cloned().collect();
    let params = resolve_params(entry, &overrides).map_err(Failure::usage)?;
    let sys = (entry.build)(&params);
    let report = validate_system(&sys);
    if !report.ok {
        return Err(Failure {
            code: 2,
            message: render_report(&report),
        });
    }
    Ok((entry, params, sys))
}

fn cmd_examples_list() -> CmdResult {
    let mut text = String::new();
    for entry in registry() {
        text.push_str(&format!("{}\n    {}\n", entry.name, entry.summary));
        if !entry.params.is_empty() {
            let params: Vec<String> = entry
                .params
                .iter()
                .map(|p| format!("{}={}", p.name, p.default))
                .collect();
            text.push_str(&format!("    parameters: {}\n", params.join(", ")));
        }
        text.push_str(&format!(
            "    window: [{}, {}]{}{}\n",
            entry.default_window.0,
            entry.default_window.1,
            if entry.closed_form.is_some() {
                "; closed-form discriminant"
            } else {
                ""
            },
            if entry.expected_bands.is_some() {
                "; closed-form bands"
            } else {
                ""
            },
        ));
    }
    emit(&text)
}

fn cmd_examples_check(name: &str, set: &[(String, f64)], samples: usize) -> CmdResult {
    let entry = example_entry(name)?;
    let overrides: BTreeMap<String, f64> = set.iter().cloned().collect();
    let params = resolve_params(entry, &overrides).map_err(Failure::usage)?;
    let outcome = check_example(entry, &params, samples).map_err(fail)?;
    emit(&format!(
        "example: {}\nwindow: [{}, {}]\nsamples: {}\nmax |D_numeric - D_closed_form| = {:.3e}\n",
        outcome.name, outcome.window[0], outcome.window[1], outcome.samples, outcome.max_error
    ))
}

fn run(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Validate { problem } => cmd_validate(&problem),
        Command::Discriminant {
            problem,
            lambda_min,
            lambda_max,
            samples,
            output,
        } => {
            let sys = load_problem(&problem)?;
            run_discriminant(&sys, lambda_min, lambda_max, samples, output)
        }
        Command::Bands {
            problem,
            lambda_min,
            lambda_max,
            grid_n,
            tol,
        } => {
            let sys = load_problem(&problem)?;
            run_bands(&sys, lambda_min, lambda_max, grid_n, tol)
        }
        Command::Monodromy {
            problem,
            lambda,
            lambda_im,
        } => cmd_monodromy(&problem, C64::new(lambda, lambda_im)),
        Command::Greens {
            problem,
            lambda,
            lambda_im,
            x,
            y,
        } => cmd_greens(&problem, C64::new(lambda, lambda_im), x, y),
        Command::Examples { action } => match action {
            ExamplesAction::List => cmd_examples_list(),
            ExamplesAction::Check { name, set, samples } => {
                cmd_examples_check(&name, &set, samples)
            }
            ExamplesAction::Discriminant {
                name,
                set,
                lambda_min,
                lambda_max,
                samples,
                output,
            } => {
                let (entry, _, sys) = example_system(&name, &set)?;
                let lo = lambda_min.unwrap_or(entry.default_window.0);
                let hi = lambda_max.unwrap_or(entry.default_window.1);
                run_discriminant(&sys, lo, hi, samples, output)
            }
            ExamplesAction::Bands {
                name,
                set,
                lambda_min,
                lambda_max,
                grid_n,
                tol,
            } => {
                let (entry, _, sys) = example_system(&name, &set)?;
                let lo = lambda_min.unwrap_or(entry.default_window.0);
                let hi = lambda_max.unwrap_or(entry.default_window.1);
                run_bands(&sys, lo, hi, grid_n, tol)
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version are not failures
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}
