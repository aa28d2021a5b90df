//! Command line front end for the trace checking library.
//!
//! Exit codes: 0 when the queried property holds, 1 when it fails, 2 when a
//! bounded search stayed inconclusive, 3 on usage or input errors.

mod format;
mod report;

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};
use hytrace_core::equivalence::{EquivalenceError, TraceEquivalence, WitnessBijection};
use hytrace_core::families::{FamilyError, GeneratedFamily};
use hytrace_core::hyperltl::HyperLtlError;
use hytrace_core::independence::{point_violation, segment_violation, IndependenceError};
use hytrace_core::syntax::SyntaxError;
use hytrace_core::traces::TraceError;
use hytrace_core::{
    async_family, hyperltl_eval, k_point_equivalent, kc_equivalent, min_index, parse_formula,
    point_family, state_change_example, two_state, ActionDiscipline, IndependenceSemantics,
    PropertySelector,
};
use thiserror::Error;

use format::{parse_traces, parse_witness_map, render_traces, NamedTraces};
use report::{
    eval_report, kc_report, kpoint_report, point_report, segment_report, two_state_report, Namer,
};

#[derive(Parser)]
#[command(
    name = "hytrace",
    version,
    about = "Checks over sets of finite and ultimately periodic traces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a trace-quantified formula over a trace file
    Eval {
        /// File holding one quantified formula
        formula: PathBuf,
        /// Trace file to evaluate over
        traces: PathBuf,
        /// Print one JSON object instead of plain text
        #[arg(long)]
        json: bool,
    },
    /// Run an independence check
    #[command(subcommand)]
    Check(CheckCommand),
    /// Generate a built-in example family of trace sets
    GenFamily {
        /// Which family to generate
        #[arg(long)]
        family: FamilyArg,
        /// Size parameter of the family
        #[arg(long)]
        n: Option<usize>,
        /// Where to write the base trace set
        #[arg(long)]
        out: PathBuf,
        /// Where to write the perturbed variant set
        #[arg(long)]
        out_prime: Option<PathBuf>,
        /// Where to write the name pairing between the two sets
        #[arg(long)]
        out_witness: Option<PathBuf>,
    },
    /// Project every trace onto the part before or after its first action
    Slice {
        /// Action variable to cut at
        #[arg(long)]
        a: String,
        /// Which side of the cut to keep
        #[arg(long)]
        part: PartArg,
        /// Trace file to slice
        traces: PathBuf,
    },
}

#[derive(Subcommand)]
enum CheckCommand {
    /// Independence of two variables before an action and of two after it
    TwoState {
        #[arg(long)]
        semantics: SemanticsArg,
        #[arg(long)]
        action: ActionArg,
        /// Variable checked in both phases
        #[arg(long)]
        x: String,
        /// Variable checked before the action
        #[arg(long)]
        y: String,
        /// Variable checked after the action
        #[arg(long)]
        z: String,
        /// Action variable; required for sync and async, forbidden for hidden
        #[arg(long)]
        a: Option<String>,
        /// Cap on the hidden cut search
        #[arg(long)]
        hidden_bound: Option<usize>,
        traces: PathBuf,
        /// Print one JSON object instead of plain text
        #[arg(long)]
        json: bool,
    },
    /// Independence of two variables over the whole set
    Independence {
        #[arg(long)]
        semantics: SemanticsArg,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        traces: PathBuf,
        /// Print one JSON object instead of plain text
        #[arg(long)]
        json: bool,
    },
    /// Equivalence of two trace sets
    Equiv {
        /// How to compare the sets
        #[arg(long)]
        kind: KindArg,
        /// Number of trace variables per assignment, or of positions per tuple
        #[arg(long)]
        k: usize,
        /// Redundancy width for --kind nstutter
        #[arg(long)]
        n: Option<usize>,
        /// File pairing trace names of the two sets
        #[arg(long)]
        witness: Option<PathBuf>,
        left: PathBuf,
        right: PathBuf,
        /// Print one JSON object instead of plain text
        #[arg(long)]
        json: bool,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SemanticsArg {
    Point,
    Segment,
}

impl SemanticsArg {
    fn core(self) -> IndependenceSemantics {
        match self {
            SemanticsArg::Point => IndependenceSemantics::Point,
            SemanticsArg::Segment => IndependenceSemantics::Segment,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ActionArg {
    Sync,
    Async,
    Hidden,
}

impl ActionArg {
    fn core(self) -> ActionDiscipline {
        match self {
            ActionArg::Sync => ActionDiscipline::Sync,
            ActionArg::Async => ActionDiscipline::Async,
            ActionArg::Hidden => ActionDiscipline::Hidden,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KindArg {
    Kc,
    Kpoint,
    Globally,
    Nstutter,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Point,
    Async,
    #[value(name = "table1")]
    Table1,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PartArg {
    Before,
    After,
}

#[derive(Error, Debug)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{source}")]
    Formula {
        path: String,
        #[source]
        source: SyntaxError,
    },
    #[error(transparent)]
    Format(#[from] format::FormatError),
    #[error(transparent)]
    Traces(#[from] TraceError),
    #[error(transparent)]
    Hyper(#[from] HyperLtlError),
    #[error(transparent)]
    Independence(#[from] IndependenceError),
    #[error(transparent)]
    Equivalence(#[from] EquivalenceError),
    #[error(transparent)]
    Family(#[from] FamilyError),
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, content: &str) -> Result<(), CliError> {
    std::fs::write(path, content).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn load_traces(path: &Path) -> Result<NamedTraces, CliError> {
    Ok(parse_traces(&read(path)?, &path.display().to_string())?)
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 3,
            };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    let started = Instant::now();
    match run(cli, started) {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(3);
        }
    }
}

fn run(cli: Cli, started: Instant) -> Result<i32, CliError> {
    match cli.command {
        Command::Eval {
            formula,
            traces,
            json,
        } => {
            let source = read(&formula)?;
            let parsed = parse_formula(&source).map_err(|source| CliError::Formula {
                path: formula.display().to_string(),
                source,
            })?;
            let named = load_traces(&traces)?;
            let verdict = hyperltl_eval(&parsed, &named.to_set()?)?;
            let namer = Namer::new(&named);
            let report = eval_report(verdict.holds, &verdict.evidence, &namer);
            Ok(report.print(json, started.elapsed()))
        }
        Command::Check(check) => run_check(check, started),
        Command::GenFamily {
            family,
            n,
            out,
            out_prime,
            out_witness,
        } => gen_family(family, n, &out, out_prime.as_deref(), out_witness.as_deref()),
        Command::Slice { a, part, traces } => slice(&a, part, &traces),
    }
}

fn run_check(check: CheckCommand, started: Instant) -> Result<i32, CliError> {
    match check {
        CheckCommand::TwoState {
            semantics,
            action,
            x,
            y,
            z,
            a,
            hidden_bound,
            traces,
            json,
        } => {
            match action {
                ActionArg::Hidden if a.is_some() => {
                    return Err(usage("--a does not apply to --action hidden"));
                }
                ActionArg::Sync | ActionArg::Async if a.is_none() => {
                    return Err(usage("--a is required with --action sync or async"));
                }
                _ => {}
            }
            let named = load_traces(&traces)?;
            let selector = PropertySelector {
                semantics: semantics.core(),
                action: action.core(),
                x,
                y,
                z,
                a,
            };
            let outcome = two_state(&named.to_set()?, &selector, hidden_bound)?;
            let namer = Namer::new(&named);
            let report = two_state_report(&outcome, &selector.x, &selector.y, &selector.z, &namer);
            Ok(report.print(json, started.elapsed()))
        }
        CheckCommand::Independence {
            semantics,
            x,
            y,
            traces,
            json,
        } => {
            let named = load_traces(&traces)?;
            let ts = named.to_set()?;
            let namer = Namer::new(&named);
            let report = match semantics {
                SemanticsArg::Point => {
                    point_report(point_violation(&ts, &x, &y)?.as_ref(), &x, &y, &namer)
                }
                SemanticsArg::Segment => {
                    segment_report(segment_violation(&ts, &x, &y)?.as_ref(), &x, &y, &namer)
                }
            };
            Ok(report.print(json, started.elapsed()))
        }
        CheckCommand::Equiv {
            kind,
            k,
            n,
            witness,
            left,
            right,
            json,
        } => {
            if kind != KindArg::Nstutter && n.is_some() {
                return Err(usage("--n only applies to --kind nstutter"));
            }
            let left_named = load_traces(&left)?;
            let right_named = load_traces(&right)?;
            let left_set = left_named.to_set()?;
            let right_set = right_named.to_set()?;
            let report = if kind == KindArg::Kpoint {
                if witness.is_some() {
                    return Err(usage("--witness does not apply to --kind kpoint"));
                }
                kpoint_report(&k_point_equivalent(&left_set, &right_set, k)?)
            } else {
                let eq = match kind {
                    KindArg::Kc => TraceEquivalence::Exact,
                    KindArg::Globally => TraceEquivalence::GloballyLetters,
                    KindArg::Nstutter => TraceEquivalence::NStutterOneStep(
                        n.ok_or_else(|| usage("--n is required with --kind nstutter"))?,
                    ),
                    KindArg::Kpoint => unreachable!(),
                };
                let witness = witness
                    .map(|path| {
                        load_witness(&path, &left_named, &right_named, &left_set, &right_set)
                    })
                    .transpose()?;
                let outcome = kc_equivalent(&left_set, &right_set, k, &eq, witness.as_ref())?;
                kc_report(&outcome, &Namer::new(&left_named), &Namer::new(&right_named))
            };
            Ok(report.print(json, started.elapsed()))
        }
    }
}

fn load_witness(
    path: &Path,
    left_named: &NamedTraces,
    right_named: &NamedTraces,
    left_set: &hytrace_core::TraceSet,
    right_set: &hytrace_core::TraceSet,
) -> Result<WitnessBijection, CliError> {
    let file = path.display().to_string();
    let mut resolved = Vec::new();
    for (left, right) in parse_witness_map(&read(path)?, &file)? {
        let left = left_named
            .trace_of(&left)
            .ok_or_else(|| usage(format!("{file}: `{left}` names no trace in the first set")))?;
        let right = right_named
            .trace_of(&right)
            .ok_or_else(|| usage(format!("{file}: `{right}` names no trace in the second set")))?;
        resolved.push((left.clone(), right.clone()));
    }
    Ok(WitnessBijection::new(left_set, right_set, resolved)?)
}

fn gen_family(
    family: FamilyArg,
    n: Option<usize>,
    out: &Path,
    out_prime: Option<&Path>,
    out_witness: Option<&Path>,
) -> Result<i32, CliError> {
    let generated: GeneratedFamily = match family {
        FamilyArg::Point => {
            point_family(n.ok_or_else(|| usage("--n is required for --family point"))?)?
        }
        FamilyArg::Async => {
            async_family(n.ok_or_else(|| usage("--n is required for --family async"))?)
        }
        FamilyArg::Table1 => state_change_example(),
    };
    let named = NamedTraces {
        alphabet: generated.alphabet.clone(),
        entries: generated.base.clone(),
    };
    write(out, &render_traces(&named))?;
    println!("wrote {}", out.display());
    if let Some(path) = out_prime {
        let entries = generated
            .variant
            .clone()
            .ok_or_else(|| usage("this family has no variant set"))?;
        let named = NamedTraces {
            alphabet: generated.alphabet.clone(),
            entries,
        };
        write(path, &render_traces(&named))?;
        println!("wrote {}", path.display());
    }
    if let Some(path) = out_witness {
        let pairs = generated
            .witness
            .clone()
            .ok_or_else(|| usage("this family has no witness map"))?;
        let content: String = pairs
            .iter()
            .map(|(l, r)| format!("{l} -> {r}\n"))
            .collect();
        write(path, &content)?;
        println!("wrote {}", path.display());
    }
    Ok(0)
}

fn slice(a: &str, part: PartArg, traces: &Path) -> Result<i32, CliError> {
    let named = load_traces(traces)?;
    if !named.alphabet.iter().any(|v| v == a) {
        return Err(usage(format!(
            "variable `{a}` is not declared in {}",
            traces.display()
        )));
    }
    let mut entries = Vec::new();
    for (name, trace) in &named.entries {
        match min_index(trace, a) {
            None => eprintln!("warning: trace {name} never sees {a}; dropped"),
            Some(first) => {
                let sliced = match part {
                    PartArg::Before => trace.prefix(first),
                    PartArg::After => trace.suffix(first),
                };
                entries.push((name.clone(), sliced));
            }
        }
    }
    print!(
        "{}",
        render_traces(&NamedTraces {
            alphabet: named.alphabet.clone(),
            entries,
        })
    );
    Ok(0)
}
