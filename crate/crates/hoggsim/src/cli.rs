//! Command-line interface.
//!
//! Five subcommands cover the library surface: `solve` runs the single-step
//! search on one formula, `sweep` exhaustively checks every formula at a
//! given size, `pulse-check` scores a pulse sequence against an ideal
//! operator under all sign/labeling conventions, `tomo` simulates a
//! tomography experiment and reconstructs the state, and `operators` dumps
//! the matrices themselves.
//!
//! Exit codes: 0 on success, 1 when a requested verification fails (a solve
//! whose answer state flunks the oracle check, a sweep with failures, a
//! pulse sequence that validates under no convention), 2 on usage errors.
//! Output is deterministic: identical invocations produce identical bytes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::nmr::{self, ConventionRow, Conventions, PulseSequence};
use crate::operators::{build_gamma, build_r, build_u, build_w, UMethod};
use crate::sat::Formula;
use crate::search::{self, SearchResult, VerificationReport};
use crate::state::DeviationMatrix;
use crate::tomography;

#[derive(Parser)]
#[command(
    name = "hoggsim",
    version,
    about = "Single-step structured search, simulated end to end"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the single-step search on one formula and report the answer state
    Solve {
        /// Formula text, e.g. "1, -2" or "n=3; 2"
        #[arg(long)]
        formula: String,
        #[arg(long, value_enum, default_value_t = SolveFormat::Json)]
        format: SolveFormat,
        /// Write the result here instead of stdout
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Check every formula on n variables and aggregate the outcome
    Sweep {
        /// Number of variables (1 through 10)
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value_t = SweepFormat::Text)]
        format: SweepFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Score a pulse sequence against an ideal operator under all conventions
    #[command(name = "pulse-check")]
    PulseCheck {
        /// Built-in sequence name, or a literal like "y1/90 x1/90 -y1/90"
        #[arg(long)]
        sequence: String,
        /// Ideal operator name: R_V1andV2, R_V2, Gamma_m2, Gamma_m1, Hadamard
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = PulseFormat::Text)]
        format: PulseFormat,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Simulate line tomography of a search's answer state and reconstruct it
    Tomo {
        /// Formula text; the prepared state is the search output for it
        #[arg(long)]
        formula: String,
        /// Gaussian noise level on line intensities (0 disables noise)
        #[arg(long)]
        noise: f64,
        /// RNG seed; required so runs are reproducible
        #[arg(long)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = TomoFormat::Json)]
        format: TomoFormat,
        #[arg(long)]
        output: Option<PathBuf>,
        /// Also write the simulated line dataset as CSV to this path
        #[arg(long)]
        dataset_out: Option<PathBuf>,
    },
    /// Dump the step operators for a problem size (R needs a formula)
    Operators {
        /// Number of variables; inferred from --formula when omitted
        #[arg(long)]
        n: Option<usize>,
        /// Number of clauses; inferred from --formula when omitted
        #[arg(long)]
        m: Option<usize>,
        /// Formula text; enables the R dump
        #[arg(long)]
        formula: Option<String>,
        #[arg(long, value_enum, default_value_t = MethodArg::Elementwise)]
        method: MethodArg,
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SolveFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepFormat {
    Json,
    Csv,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PulseFormat {
    Json,
    Text,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TomoFormat {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum MethodArg {
    Elementwise,
    Decomposition,
}

impl From<MethodArg> for UMethod {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Elementwise => UMethod::Elementwise,
            MethodArg::Decomposition => UMethod::Decomposition,
        }
    }
}

/// Everything a subcommand produces: the rendered body, whether a
/// verification it performed failed, and any extra files to write.
#[derive(Debug)]
struct Outcome {
    body: String,
    verification_failed: bool,
    extra_files: Vec<(PathBuf, String)>,
    output: Option<PathBuf>,
}

/// Parse `args` and run the selected subcommand, returning the process exit
/// code. Files are only written after the subcommand has fully succeeded, so
/// a failed run never leaves a partial artifact behind.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders --help/--version on stdout with code 0 and real
            // usage errors on stderr with code 2.
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli.command) {
        Ok(outcome) => {
            for (path, content) in &outcome.extra_files {
                if let Err(e) = write_atomic(path, content) {
                    eprintln!("error: {e}");
                    return 2;
                }
            }
            match &outcome.output {
                Some(path) => {
                    if let Err(e) = write_atomic(path, &outcome.body) {
                        eprintln!("error: {e}");
                        return 2;
                    }
                }
                None => print!("{}", outcome.body),
            }
            if outcome.verification_failed {
                1
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

fn execute(command: Command) -> Result<Outcome> {
    match command {
        Command::Solve {
            formula,
            format,
            output,
        } => {
            let f: Formula = formula.parse()?;
            let result = search::run_search(&f)?;
            let report = search::verify_result(&f, &result)?;
            let body = match format {
                SolveFormat::Json => to_json(&result)?,
                SolveFormat::Text => render_solve_text(&result, &report),
            };
            Ok(Outcome {
                body,
                verification_failed: report.applicable && !report.passed,
                extra_files: Vec::new(),
                output,
            })
        }
        Command::Sweep { n, format, output } => {
            let report = search::sweep(n)?;
            let body = match format {
                SweepFormat::Json => to_json(&report)?,
                SweepFormat::Csv => render_sweep_csv(&report),
                SweepFormat::Text => render_sweep_text(&report),
            };
            Ok(Outcome {
                body,
                verification_failed: !report.all_passed(),
                extra_files: Vec::new(),
                output,
            })
        }
        Command::PulseCheck {
            sequence,
            target,
            format,
            output,
        } => {
            let seq = resolve_sequence(&sequence)?;
            let ideal = nmr::builtin_target(&target)?;
            let report = nmr::convention_search(&seq, &ideal)?;
            let validating = report.validating_set().len();
            let out = PulseCheckOutput {
                sequence: report.sequence.clone(),
                target: target.clone(),
                validating,
                rows: report.rows.clone(),
            };
            let body = match format {
                PulseFormat::Json => to_json(&out)?,
                PulseFormat::Text => render_pulse_text(&out),
            };
            Ok(Outcome {
                body,
                verification_failed: validating == 0,
                extra_files: Vec::new(),
                output,
            })
        }
        Command::Tomo {
            formula,
            noise,
            seed,
            format,
            output,
            dataset_out,
        } => {
            let f: Formula = formula.parse()?;
            if f.var_count() != 2 {
                return Err(Error::TooManyVariables {
                    context: "tomography is modeled for the two-spin system",
                    n: f.var_count(),
                    max: 2,
                });
            }
            let conventions = Conventions::default();
            let rho = search::final_deviation_matrix(&f)?;
            let dataset = tomography::simulate_dataset(&rho, noise, seed, &conventions)?;
            let reconstructed = tomography::reconstruct(&dataset, &conventions)?;
            let out = TomoOutput {
                formula: f.to_string(),
                noise_sigma: noise,
                seed,
                trace: dataset.trace(),
                reconstruction_error: reconstructed.frobenius_distance(&rho)?,
                reconstructed: reconstructed.clone(),
                modulus_table: tomography::modulus_table(&reconstructed),
            };
            let body = match format {
                TomoFormat::Json => to_json(&out)?,
                TomoFormat::Csv => tomography::modulus_table_csv(&out.modulus_table),
            };
            let mut extra_files = Vec::new();
            if let Some(path) = dataset_out {
                extra_files.push((path, dataset.to_csv()));
            }
            Ok(Outcome {
                body,
                verification_failed: false,
                extra_files,
                output,
            })
        }
        Command::Operators {
            n,
            m,
            formula,
            method,
            output,
        } => {
            let parsed = formula.map(|text| text.parse::<Formula>()).transpose()?;
            let (n, m) = infer_size(n, m, parsed.as_ref())?;
            let r = parsed.as_ref().map(build_r).transpose()?;
            let out = OperatorsOutput {
                n,
                m,
                method: match method {
                    MethodArg::Elementwise => "elementwise",
                    MethodArg::Decomposition => "decomposition",
                },
                formula: parsed.as_ref().map(|f| f.to_string()),
                r,
                gamma: build_gamma(n, m)?,
                w: build_w(n)?,
                u: build_u(n, m, method.into())?,
            };
            Ok(Outcome {
                body: to_json(&out)?,
                verification_failed: false,
                extra_files: Vec::new(),
                output,
            })
        }
    }
}

#[derive(Serialize)]
struct PulseCheckOutput {
    sequence: String,
    target: String,
    validating: usize,
    rows: Vec<ConventionRow>,
}

#[derive(Serialize)]
struct TomoOutput {
    formula: String,
    noise_sigma: f64,
    seed: u64,
    trace: f64,
    reconstructed: DeviationMatrix,
    modulus_table: [[f64; 4]; 4],
    reconstruction_error: f64,
}

#[derive(Serialize)]
struct OperatorsOutput {
    n: usize,
    m: usize,
    method: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    formula: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    r: Option<crate::operators::DiagonalUnitary>,
    gamma: crate::operators::DiagonalUnitary,
    w: crate::operators::UnitaryMatrix,
    u: crate::operators::UnitaryMatrix,
}

/// A `--sequence` value is a built-in name, or failing that a literal pulse
/// program. Bare words that match no built-in get the name error (with the
/// roster) rather than a parse error, since that is almost always the typo.
fn resolve_sequence(text: &str) -> Result<PulseSequence> {
    if nmr::BUILTIN_SEQUENCE_NAMES.contains(&text) {
        return nmr::builtin_sequence(text);
    }
    if text.contains('/') {
        return text.parse();
    }
    Err(Error::UnknownSequence {
        name: text.to_string(),
    })
}

fn infer_size(
    n: Option<usize>,
    m: Option<usize>,
    formula: Option<&Formula>,
) -> Result<(usize, usize)> {
    let check = |given: Option<usize>, from_formula: usize, what: &'static str| -> Result<usize> {
        match given {
            Some(v) if v != from_formula => Err(Error::SolveFailed {
                reason: format!("--{what} {v} contradicts the formula, which has {from_formula}"),
            }),
            _ => Ok(from_formula),
        }
    };
    match formula {
        Some(f) => Ok((
            check(n, f.var_count(), "n")?,
            check(m, f.clause_count(), "m")?,
        )),
        None => match (n, m) {
            (Some(n), Some(m)) => Ok((n, m)),
            _ => Err(Error::SolveFailed {
                reason: "give --n and --m, or a --formula to take them from".to_string(),
            }),
        },
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut body = serde_json::to_string_pretty(value).map_err(|e| Error::SolveFailed {
        reason: format!("serialization failed: {e}"),
    })?;
    body.push('\n');
    Ok(body)
}

fn render_solve_text(result: &SearchResult, report: &VerificationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "formula: {}", result.formula());
    let _ = writeln!(
        s,
        "guaranteed: {}",
        if result.guaranteed() { "yes" } else { "no" }
    );
    let solutions: Vec<String> = result
        .decoded_solutions()
        .iter()
        .map(|a| a.to_string())
        .collect();
    let _ = writeln!(
        s,
        "solutions: {}",
        if solutions.is_empty() {
            "none".to_string()
        } else {
            solutions.join(" ")
        }
    );
    for (bits, p) in result.probability_map() {
        let _ = writeln!(s, "P({bits}) = {p}");
    }
    let verdict = if !report.applicable {
        "not applicable (no solutions)"
    } else if report.passed {
        "passed"
    } else {
        "failed"
    };
    let _ = writeln!(s, "verification: {verdict}");
    s
}

fn render_sweep_text(report: &search::SweepReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}/{} passed", report.pass_count, report.formula_count);
    let _ = writeln!(
        s,
        "worst off-solution probability: {}",
        report.worst_max_offsolution_probability
    );
    let _ = writeln!(
        s,
        "worst solution spread: {}",
        report.worst_solution_probability_spread
    );
    s
}

fn render_sweep_csv(report: &search::SweepReport) -> String {
    let mut s = String::from(
        "formula,guaranteed,passed,max_offsolution_probability,solution_probability_spread\n",
    );
    for row in &report.rows {
        let _ = writeln!(
            s,
            "\"{}\",{},{},{},{}",
            row.formula,
            row.guaranteed,
            row.passed,
            row.max_offsolution_probability,
            row.solution_probability_spread
        );
    }
    s
}

fn render_pulse_text(out: &PulseCheckOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sequence: {}", out.sequence);
    let _ = writeln!(s, "target: {}", out.target);
    for row in &out.rows {
        let _ = writeln!(
            s,
            "{}  fidelity={}  validates={}",
            row.conventions,
            row.fidelity,
            if row.validates { "yes" } else { "no" }
        );
    }
    let _ = writeln!(s, "validating: {}/{}", out.validating, out.rows.len());
    s
}

/// Write into a sibling temp file and rename it over the target, so readers
/// never see a half-written file.
fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let io_err = |e: std::io::Error| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    };
    let file_name = path
        .file_name()
        .ok_or_else(|| io_err(std::io::Error::other("path has no file name")))?;
    let mut tmp = path.to_path_buf();
    tmp.set_file_name(format!(
        ".{}.tmp-{}",
        file_name.to_string_lossy(),
        std::process::id()
    ));
    std::fs::write(&tmp, content).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(|e| {
        let _ = std::fs::remove_file(&tmp);
        io_err(e)
    })
}
