//! Command-line front end for the trace toolkit.
//!
//! Exit codes: 0 success, 1 domain-check failure (a verification or level
//! precondition did not hold), 2 parse/validation failure (malformed or
//! shape-invalid input), 3 I/O failure. Outputs are byte-deterministic for
//! a fixed invocation; `FUZZY_ERSHOV_COLOR` only toggles ANSI coloring of
//! the human-readable reports on stdout.

use std::fmt::Display;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fuzzy_ershov::boolean::{
    decompose, parse_decomposition, recompose, render_decomposition, verify_theorem, BooleanError,
};
use fuzzy_ershov::gallery::{
    harkleroad, left_ce_real, oscillator, parse_bits, parse_halting_table, random_bounded_trace,
    right_ce_real, OscillatorSchedule, DEFAULT_GRID_DENOMINATOR,
};
use fuzzy_ershov::hierarchy::classify;
use fuzzy_ershov::mindchange::{pi_profile, sigma_profile};
use fuzzy_ershov::numeric::UnitRational;
use fuzzy_ershov::trace::{
    enumerate_left_cut, enumerate_right_cut, parse_trace, render_trace, ApproximationTrace,
    TraceShape,
};

const EXIT_DOMAIN: u8 = 1;
const EXIT_VALIDATION: u8 = 2;
const EXIT_IO: u8 = 3;

#[derive(Parser)]
#[command(name = "fuzzy-ershov", version, about = "Exact-rational approximation traces: validation, classification, decomposition, and generators", long_about = None)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check a trace file against a claimed shape
    Validate {
        #[arg(long = "in")]
        input: PathBuf,
        /// Shape to check instead of the one in the file header
        #[arg(long)]
        shape: Option<String>,
        /// Truncate to the first S stages before checking
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Report observed hierarchy levels as CSV
    Classify {
        #[arg(long = "in")]
        input: PathBuf,
        /// Write the CSV here (and print the profile report to stdout)
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Split a trace into rising difference pairs
    Decompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Evaluate the max-min recombination of a decomposition bundle
    Recompose {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decompose, recombine, and check the round-trip guarantees
    Verify {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Pointwise set algebra on trace files
    Ops {
        #[command(subcommand)]
        op: OpsCommand,
    },
    /// Enumerate per-element cuts over a bounded-denominator grid
    Cut {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "denominator-bound")]
        denominator_bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Generate traces from the example families
    Gallery {
        #[command(subcommand)]
        family: GalleryCommand,
    },
}

#[derive(Subcommand)]
enum OpsCommand {
    /// Pointwise max of two traces
    Union {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pointwise min of two traces
    Intersection {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long = "in2")]
        input2: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pointwise 1 - f
    Complement {
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum GalleryCommand {
    /// Two-update approximation of a toy halting table
    Harkleroad {
        /// Halting table file: lines `x=<int> halts_at=<int|NEVER>`
        #[arg(long = "in")]
        input: PathBuf,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Single-element trace swinging around a center
    Oscillator {
        center: UnitRational,
        amplitude: UnitRational,
        count: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Seeded trace with a bounded mind-change budget
    Random {
        domain_size: usize,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        level: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "denominator-bound", default_value_t = DEFAULT_GRID_DENOMINATOR)]
        denominator_bound: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rising dyadic accumulation of a digit string like 101
    Leftce {
        digits: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Falling dyadic bound of a digit string like 101
    Rightce {
        digits: String,
        #[arg(long)]
        horizon: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn domain(message: impl Display) -> Self {
        CliError {
            code: EXIT_DOMAIN,
            message: message.to_string(),
        }
    }

    fn validation(message: impl Display) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.to_string(),
        }
    }

    fn io(path: &Path, error: std::io::Error) -> Self {
        CliError {
            code: EXIT_IO,
            message: format!("{}: {error}", path.display()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            eprintln!("error: {}", error.message);
            ExitCode::from(error.code)
        }
    }
}

fn color_enabled() -> bool {
    std::env::var("FUZZY_ERSHOV_COLOR").is_ok_and(|v| !v.is_empty() && v != "0")
}

fn paint(text: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_owned()
    }
}

fn read_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn load_trace(path: &Path, horizon: Option<usize>) -> Result<ApproximationTrace, CliError> {
    let text = read_file(path)?;
    let trace =
        parse_trace(&text).map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    match horizon {
        Some(stages) => trace
            .truncated(stages)
            .map_err(|e| CliError::validation(format!("--horizon {stages}: {e}"))),
        None => Ok(trace),
    }
}

/// Writes to the file when a path is given, otherwise to stdout.
fn emit(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, content).map_err(|e| CliError::io(path, e)),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn boolean_error(error: BooleanError) -> CliError {
    match error {
        BooleanError::LevelExceeded { .. }
        | BooleanError::AnchorViolation { .. }
        | BooleanError::ZeroLevel => CliError::domain(error),
        other => CliError::validation(other),
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Validate {
            input,
            shape,
            horizon,
        } => {
            let claimed = shape
                .map(|name| {
                    TraceShape::parse(&name)
                        .ok_or_else(|| CliError::validation(format!("unknown shape {name:?}")))
                })
                .transpose()?;
            let trace = load_trace(&input, horizon)?;
            let trace = match claimed {
                Some(shape) => trace
                    .reshaped(shape)
                    .map_err(|e| CliError::validation(format!("{}: {e}", input.display())))?,
                None => trace,
            };
            println!(
                "{}",
                paint(
                    &format!(
                        "OK shape={} X={} S={}",
                        trace.shape(),
                        trace.domain_size(),
                        trace.horizon()
                    ),
                    "32"
                )
            );
            Ok(())
        }
        Command::Classify {
            input,
            out,
            horizon,
        } => {
            let trace = load_trace(&input, horizon)?;
            let report = classify(&trace);
            let csv = report.render_csv();
            match out {
                Some(path) => {
                    emit(Some(&path), &csv)?;
                    print!("{}", paint(&report.to_string(), "36"));
                    print!("{}", sigma_profile(&trace).render_report());
                    print!("{}", pi_profile(&trace).render_report());
                }
                None => print!("{csv}"),
            }
            Ok(())
        }
        Command::Decompose {
            input,
            level,
            out,
            horizon,
        } => {
            let trace = load_trace(&input, horizon)?;
            let decomposition = decompose(&trace, level).map_err(boolean_error)?;
            emit(out.as_deref(), &render_decomposition(&decomposition))
        }
        Command::Recompose { input, out } => {
            let text = read_file(&input)?;
            let decomposition = parse_decomposition(&text)
                .map_err(|e| CliError::validation(format!("{}: {e}", input.display())))?;
            emit(out.as_deref(), &render_trace(&recompose(&decomposition)))
        }
        Command::Verify {
            input,
            level,
            out,
            horizon,
        } => {
            let trace = load_trace(&input, horizon)?;
            let report = verify_theorem(&trace, level).map_err(boolean_error)?;
            let rendered = report.render();
            if let Some(path) = out.as_deref() {
                emit(Some(path), &rendered)?;
            }
            for line in rendered.lines() {
                if line == "result: PASS" {
                    println!("{}", paint(line, "32"));
                } else if line == "result: FAIL" || line.starts_with("violation:") {
                    println!("{}", paint(line, "31"));
                } else {
                    println!("{line}");
                }
            }
            if report.passed() {
                Ok(())
            } else {
                Err(CliError::domain(format!(
                    "{} check(s) failed",
                    report.violations().len()
                )))
            }
        }
        Command::Ops { op } => {
            let (result, out) = match op {
                OpsCommand::Union { input, input2, out } => {
                    let a = load_trace(&input, None)?;
                    let b = load_trace(&input2, None)?;
                    (a.union(&b).map_err(CliError::validation)?, out)
                }
                OpsCommand::Intersection { input, input2, out } => {
                    let a = load_trace(&input, None)?;
                    let b = load_trace(&input2, None)?;
                    (a.intersection(&b).map_err(CliError::validation)?, out)
                }
                OpsCommand::Complement { input, out } => {
                    (load_trace(&input, None)?.complement(), out)
                }
            };
            emit(out.as_deref(), &render_trace(&result))
        }
        Command::Cut {
            input,
            denominator_bound,
            out,
            horizon,
        } => {
            let trace = load_trace(&input, horizon)?;
            let mut lines = String::new();
            for x in 0..trace.domain_size() {
                let cut = match trace.shape() {
                    TraceShape::Sigma1 => enumerate_left_cut(&trace, x, denominator_bound),
                    TraceShape::Pi1 => enumerate_right_cut(&trace, x, denominator_bound),
                    _ => Err(fuzzy_ershov::trace::TraceError::WrongShape {
                        expected: TraceShape::Sigma1,
                        found: trace.shape(),
                    }),
                }
                .map_err(CliError::validation)?;
                let rendered: Vec<String> = cut.iter().map(UnitRational::to_string).collect();
                lines.push_str(&rendered.join(" "));
                lines.push('\n');
            }
            emit(out.as_deref(), &lines)
        }
        Command::Gallery { family } => {
            let (trace, out) = match family {
                GalleryCommand::Harkleroad {
                    input,
                    horizon,
                    out,
                } => {
                    let table = parse_halting_table(&read_file(&input)?)
                        .map_err(|e| CliError::validation(format!("{}: {e}", input.display())))?;
                    (
                        harkleroad(&table, horizon).map_err(CliError::validation)?,
                        out,
                    )
                }
                GalleryCommand::Oscillator {
                    center,
                    amplitude,
                    count,
                    horizon,
                    out,
                } => {
                    let schedule = OscillatorSchedule::new(center, amplitude, count)
                        .map_err(CliError::validation)?;
                    (
                        oscillator(&schedule, horizon).map_err(CliError::validation)?,
                        out,
                    )
                }
                GalleryCommand::Random {
                    domain_size,
                    horizon,
                    level,
                    seed,
                    denominator_bound,
                    out,
                } => (
                    random_bounded_trace(seed, domain_size, horizon, level, denominator_bound)
                        .map_err(CliError::validation)?,
                    out,
                ),
                GalleryCommand::Leftce {
                    digits,
                    horizon,
                    out,
                } => {
                    let bits = parse_bits(&digits).ok_or_else(|| {
                        CliError::validation(format!("digits must be 0s and 1s, got {digits:?}"))
                    })?;
                    (
                        left_ce_real(&bits, horizon).map_err(CliError::validation)?,
                        out,
                    )
                }
                GalleryCommand::Rightce {
                    digits,
                    horizon,
                    out,
                } => {
                    let bits = parse_bits(&digits).ok_or_else(|| {
                        CliError::validation(format!("digits must be 0s and 1s, got {digits:?}"))
                    })?;
                    (
                        right_ce_real(&bits, horizon).map_err(CliError::validation)?,
                        out,
                    )
                }
            };
            emit(out.as_deref(), &render_trace(&trace))
        }
    }
}
