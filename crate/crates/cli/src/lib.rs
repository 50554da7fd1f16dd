//! The `semibreak` command-line front-end.
//!
//! Every subcommand reads JSON files, prints a JSON document on stdout and
//! exits with a stable code:
//!
//! | code | meaning                                   |
//! |------|-------------------------------------------|
//! | 0    | success, or the predicate holds           |
//! | 1    | the predicate is false                    |
//! | 2    | malformed input or unmet precondition     |
//! | 3    | internal invariant violation (with dump)  |

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use semibreak_core::divisor::apply_certificate;
use semibreak_core::engine::{
    are_equivalent, break_representative_with_certificate, equivalence_certificate, is_break,
    semibreak_reduce, ReduceOptions,
};
use semibreak_core::error_minmax::{error_of_set, max_error_profile, Strategy};
use semibreak_core::json::{self, CertificateJson, ReductionJson};
use semibreak_core::oracle::{is_semibreak_bruteforce, max_error_bruteforce};
use semibreak_core::{Divisor, Error, MetricGraph};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Parser, Debug)]
#[command(name = "semibreak", version, about = "Divisors on metric graphs: semibreak reduction, max-error sets and certificates")]
struct Cli {
    /// Submodular minimization backend.
    #[arg(long, global = true, default_value = "exhaustive", value_parser = ["exhaustive", "min-norm"])]
    strategy: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a graph (and optionally a divisor) and report basic invariants.
    Validate { graph: PathBuf, divisor: Option<PathBuf> },
    /// Reduce an effective divisor of degree at most g to a semibreak divisor.
    Semibreak {
        graph: PathBuf,
        divisor: PathBuf,
        /// Also write the result document here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the firing certificate here.
        #[arg(long)]
        cert: Option<PathBuf>,
        /// Record a per-iteration trace.
        #[arg(long)]
        trace: bool,
    },
    /// The break divisor equivalent to a degree-g effective divisor.
    Breakrep {
        graph: PathBuf,
        divisor: PathBuf,
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Decide linear equivalence of two effective divisors of equal degree.
    Equiv {
        graph: PathBuf,
        first: PathBuf,
        second: PathBuf,
        /// When equivalent, write a certificate from the first to the second.
        #[arg(long)]
        cert: Option<PathBuf>,
    },
    /// Error(D, S) for a closed set S.
    Error { graph: PathBuf, divisor: PathBuf, set: PathBuf },
    /// Max-error value and the smallest max-error set.
    Minmax { graph: PathBuf, divisor: PathBuf },
    /// Is the divisor a break divisor?
    IsBreak { graph: PathBuf, divisor: PathBuf },
    /// Brute-force semibreak test via spanning trees and matchings.
    OracleSemibreak { graph: PathBuf, divisor: PathBuf },
    /// Brute-force max-error profile.
    OracleMe { graph: PathBuf, divisor: PathBuf },
    /// Replay a certificate and compare with the target divisor.
    ///
    /// The target may be a divisor or a reduction document; in the latter case
    /// the certificate defaults to the one it carries.
    VerifyCert {
        graph: PathBuf,
        divisor: PathBuf,
        target: PathBuf,
        cert: Option<PathBuf>,
    },
}

enum Failure {
    Input(String),
    Core(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

type Outcome = Result<(i32, Value), Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, value: &Value) -> Result<(), Failure> {
    fs::write(path, json::to_pretty(value) + "\n")
        .map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn in_file<T>(path: &Path, result: semibreak_core::Result<T>) -> Result<T, Failure> {
    result.map_err(|e| match e {
        Error::Parse(msg) => Failure::Input(format!("{}: {msg}", path.display())),
        other => Failure::Core(other),
    })
}

fn load_graph(path: &Path) -> Result<Arc<MetricGraph>, Failure> {
    in_file(path, json::parse_graph(&read(path)?))
}

fn load_divisor(graph: &MetricGraph, path: &Path) -> Result<Divisor, Failure> {
    in_file(path, json::parse_divisor(graph, &read(path)?))
}

fn to_value<T: serde::Serialize>(doc: &T) -> Value {
    serde_json::to_value(doc).expect("documents always serialize")
}

fn predicate(key: &str, holds: bool) -> (i32, Value) {
    (if holds { EXIT_OK } else { EXIT_FALSE }, json!({ key: holds }))
}

fn dispatch(cli: Cli) -> Outcome {
    let strategy: Strategy = cli.strategy.parse()?;
    match cli.command {
        Command::Validate { graph, divisor } => {
            let g = load_graph(&graph)?;
            let branch: Vec<&str> = g.branch_points().into_iter().map(|v| g.vertex_id(v)).collect();
            let mut report = json!({
                "valid": true,
                "genus": g.genus(),
                "vertices": g.vertex_count(),
                "edges": g.edge_count(),
                "branch_points": branch,
            });
            if let Some(path) = divisor {
                let d = load_divisor(&g, &path)?;
                report["degree"] = json!(d.degree());
                report["effective"] = json!(d.is_effective());
            }
            Ok((EXIT_OK, report))
        }
        Command::Semibreak { graph, divisor, out, cert, trace } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let result = semibreak_reduce(&g, &d, ReduceOptions { strategy, trace })?;
            let doc = to_value(&json::reduction_to_json(&g, &result));
            if let Some(path) = out {
                write(&path, &doc)?;
            }
            if let Some(path) = cert {
                write(&path, &doc["certificate"])?;
            }
            Ok((EXIT_OK, doc))
        }
        Command::Breakrep { graph, divisor, cert } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let (rep, certificate) = break_representative_with_certificate(&g, &d, strategy)?;
            if let Some(path) = cert {
                write(&path, &to_value(&json::certificate_to_json(&certificate)))?;
            }
            Ok((EXIT_OK, to_value(&json::divisor_to_json(&g, &rep))))
        }
        Command::Equiv { graph, first, second, cert } => {
            let g = load_graph(&graph)?;
            let d1 = load_divisor(&g, &first)?;
            let d2 = load_divisor(&g, &second)?;
            let holds = match cert {
                None => are_equivalent(&g, &d1, &d2, strategy)?,
                Some(path) => match equivalence_certificate(&g, &d1, &d2, strategy)? {
                    Some(c) => {
                        write(&path, &to_value(&json::certificate_to_json(&c)))?;
                        true
                    }
                    None => false,
                },
            };
            Ok(predicate("equivalent", holds))
        }
        Command::Error { graph, divisor, set } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let doc: json::SetJson = in_file(&set, json::parse(&read(&set)?))?;
            let s = json::set_from_json(&g, &doc)?;
            Ok((EXIT_OK, json!({ "error": error_of_set(&d, &s) })))
        }
        Command::Minmax { graph, divisor } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let profile = max_error_profile(&g, &d, strategy)?;
            Ok((EXIT_OK, to_value(&json::profile_to_json(&profile))))
        }
        Command::IsBreak { graph, divisor } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            Ok(predicate("is_break", is_break(&g, &d, strategy)?))
        }
        Command::OracleSemibreak { graph, divisor } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            Ok(predicate("semibreak", is_semibreak_bruteforce(&g, &d)?))
        }
        Command::OracleMe { graph, divisor } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let profile = max_error_bruteforce(&g, &d)?;
            Ok((EXIT_OK, to_value(&json::profile_to_json(&profile))))
        }
        Command::VerifyCert { graph, divisor, target, cert } => {
            let g = load_graph(&graph)?;
            let d = load_divisor(&g, &divisor)?;
            let target_doc: Value = in_file(&target, json::parse(&read(&target)?))?;
            let (expected, carried) = if target_doc.is_object() {
                let doc: ReductionJson = in_file(&target, json::parse(&target_doc.to_string()))?;
                (json::divisor_from_json(&g, &doc.semibreak)?, Some(doc.certificate))
            } else {
                (in_file(&target, json::parse_divisor(&g, &target_doc.to_string()))?, None)
            };
            let cert_doc: CertificateJson = match (cert, carried) {
                (Some(path), _) => in_file(&path, json::parse(&read(&path)?))?,
                (None, Some(c)) => c,
                (None, None) => {
                    return Err(Failure::Input(
                        "a certificate file is required when the target is a plain divisor".into(),
                    ))
                }
            };
            let certificate = json::certificate_from_json(&g, &cert_doc)?;
            match apply_certificate(&d, &certificate) {
                Ok(reached) => {
                    let valid = reached == expected;
                    let mut report = json!({ "valid": valid });
                    if !valid {
                        report["reached"] = to_value(&json::divisor_to_json(&g, &reached));
                    }
                    Ok((if valid { EXIT_OK } else { EXIT_FALSE }, report))
                }
                Err(e) if !e.is_invariant_violation() => {
                    Ok((EXIT_FALSE, json!({ "valid": false, "reason": e.to_string() })))
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// Runs one command line (including the program name) to completion.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            return if e.use_stderr() {
                CommandOutcome { code, stdout: String::new(), stderr: text }
            } else {
                CommandOutcome { code, stdout: text, stderr: String::new() }
            };
        }
    };
    match dispatch(cli) {
        Ok((code, value)) => CommandOutcome { code, stdout: json::to_pretty(&value) + "\n", stderr: String::new() },
        Err(Failure::Input(msg)) => CommandOutcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {msg}\n") },
        Err(Failure::Core(e)) if e.is_invariant_violation() => {
            let dump = json!({
                "invariant_violation": e.to_string(),
                "argv": argv.iter().map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>(),
            });
            CommandOutcome { code: EXIT_INVARIANT, stdout: String::new(), stderr: json::to_pretty(&dump) + "\n" }
        }
        Err(Failure::Core(e)) => CommandOutcome { code: EXIT_INPUT, stdout: String::new(), stderr: format!("error: {e}\n") },
    }
}
