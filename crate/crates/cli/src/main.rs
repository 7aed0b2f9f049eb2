//! Command-line entry point.
//!
//! Exit codes: 0 when every check passes, 1 when a well-formed run finds
//! a failed identity or bad data, 2 when the invocation itself is
//! unusable. Reports go to stdout (JSON for ingest/verify/predict, CSV
//! for dump) and optionally to a file via `-o`; nothing in them depends
//! on wall-clock time, so identical invocations are byte-identical.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;

use padic_forms::smoothrep::Splitness;
use padic_forms_cli::dump::{run_dump, DumpArgs};
use padic_forms_cli::ingest;
use padic_forms_cli::predict::{run_predict, PredictArgs};
use padic_forms_cli::report::{render, tool_version, IngestReport};
use padic_forms_cli::suites::{run_suite, JobConfig};
use padic_forms_cli::CliError;

#[derive(Parser)]
#[command(
    name = "padic-forms",
    version,
    about = "p-adic identity checks and germ-space predictions for modular forms data"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Validate a newform dataset file and report its shape.
    Ingest {
        /// Path to the dataset JSON.
        input: String,
        /// Promote multiplicativity warnings to a hard error.
        #[arg(long)]
        strict: bool,
        /// Also write the report to this path.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run an identity check suite and report one line per check.
    Verify {
        /// fourier, kirillov, ordinary, doublecoset, local, or all.
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(short, default_value_t = 11)]
        p: u64,
        /// Working precision `p^k`.
        #[arg(short, default_value_t = 5)]
        k: u32,
        /// Coefficient window for the q-expansion checks.
        #[arg(short = 'N', long = "trunc", default_value_t = 1500)]
        n: usize,
        /// Seed for the randomized batches.
        #[arg(long, default_value_t = 271828)]
        seed: u64,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Classify a newform at p and bound the completed germ space.
    Predict {
        /// Builtin name (delta, cm32) or a dataset path.
        #[arg(long, default_value = "delta")]
        newform: String,
        #[arg(short, default_value_t = 11)]
        p: u64,
        #[arg(short, default_value_t = 5)]
        k: u32,
        /// split, nonsplit, or unknown: whether the source two-dimensional
        /// space is asserted to split.
        #[arg(long, default_value = "unknown")]
        splitness: String,
        /// Exponent window for the upper bound.
        #[arg(long = "m-window", default_value_t = 1)]
        m_window: u32,
        /// Coefficient count for builtins and the divisibility probe.
        #[arg(short = 'N', long = "trunc", default_value_t = 300)]
        n: usize,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Write a CSV table with symmetric signed lifts.
    Dump {
        /// What to dump: qexp or tails.
        object: String,
        #[arg(long, default_value = "delta")]
        newform: String,
        #[arg(short, default_value_t = 11)]
        p: u64,
        #[arg(short, default_value_t = 5)]
        k: u32,
        /// Row count for qexp; coefficient hint for tails.
        #[arg(short = 'N', long = "trunc", default_value_t = 60)]
        n: usize,
        /// Feeds the prediction behind the tails table.
        #[arg(long, default_value = "unknown")]
        splitness: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
}

fn parse_splitness(s: &str) -> Result<Splitness, CliError> {
    match s {
        "split" => Ok(Splitness::Split),
        "nonsplit" => Ok(Splitness::NonSplit),
        "unknown" => Ok(Splitness::Unknown),
        other => Err(CliError::Config(format!(
            "unknown splitness {other:?}; expected split, nonsplit, or unknown"
        ))),
    }
}

fn emit_json<T: Serialize>(report: &T, out: Option<&Path>) -> Result<(), CliError> {
    emit_text(&render(report), out)
}

fn emit_text(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    print!("{text}");
    if let Some(path) = out {
        fs::write(path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display())))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Ingest { input, strict, out } => {
            let loaded = ingest::load_file(&input, strict)?;
            let report = IngestReport {
                command: "ingest".into(),
                tool_version: tool_version(),
                input,
                level: loaded.record.level(),
                weight: loaded.record.weight(),
                neb_modulus: loaded.record.neb_modulus(),
                coeff_count: loaded.record.trunc(),
                eigenform: loaded.record.is_eigenform(),
                cm: loaded.record.is_cm(),
                warnings: loaded.warnings,
                passed: true,
            };
            emit_json(&report, out.as_deref())
        }
        Command::Verify { suite, p, k, n, seed, out } => {
            let report = run_suite(&suite, &JobConfig { p, k, n, seed })?;
            let passed = report.passed;
            emit_json(&report, out.as_deref())?;
            if !passed {
                return Err(CliError::Data("one or more checks failed".into()));
            }
            Ok(())
        }
        Command::Predict { newform, p, k, splitness, m_window, n, out } => {
            let report = run_predict(&PredictArgs {
                newform,
                p,
                k,
                splitness: parse_splitness(&splitness)?,
                m_window,
                n_hint: n,
            })?;
            let passed = report.passed;
            emit_json(&report, out.as_deref())?;
            if !passed {
                return Err(CliError::Data(
                    "the asserted splitting fails its divisibility probe".into(),
                ));
            }
            Ok(())
        }
        Command::Dump { object, newform, p, k, n, splitness, out } => {
            let csv = run_dump(&DumpArgs {
                object,
                newform,
                p,
                k,
                n,
                splitness: parse_splitness(&splitness)?,
            })?;
            emit_text(&csv, out.as_deref())
        }
    }
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(e.exit_code());
        }
    }
}
