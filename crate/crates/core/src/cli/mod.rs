//! The `bcsgame` command line.
//!
//! Exit codes: 0 success, 1 an `--expect-perfect` expectation (or a `qsa
//! verify`) failed, 2 usage error, 3 input error.

mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use report::{render, AnalysisReport, ClassicalSection, Format, InstanceSummary, QuantumSection};

use crate::bcs::{
    brute_force_solve, builtin_instance, gf2_solve, parse_instance, serialize_instance, BcsInstance, BUILTIN_NAMES,
};
use crate::game::classical_value;
use crate::prover::{
    cancellation_bounds, render_certificate, search_contradiction, Budget, SearchOutcome, DEFAULT_MAX_SUBSTITUTIONS,
    DEFAULT_MAX_WORD_LENGTH,
};
use crate::quantum::{parse_observable_file, quantum_game_value, verify_qsa, ObservableFile, DEFAULT_TOL};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

/// Bundled observable files for the built-in instances that have one.
pub fn builtin_observables(name: &str) -> Option<&'static str> {
    match name {
        "magic-square" => Some(include_str!("../../data/magic-square.obs")),
        "magic-pentagram" => Some(include_str!("../../data/magic-pentagram.obs")),
        "chsh" => Some(include_str!("../../data/chsh.obs")),
        _ => None,
    }
}

#[derive(Debug, Parser)]
#[command(name = "bcsgame", version, about = "Analyze binary constraint system games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List or print the built-in instances.
    Instances {
        #[command(subcommand)]
        action: InstancesAction,
    },
    /// Decide classical satisfiability.
    Satisfiable(Common),
    /// Exact classical value of the game.
    ClassicalValue(Common),
    /// Operator assignment checks.
    Qsa {
        #[command(subcommand)]
        action: QsaAction,
    },
    /// Success probability of an observable strategy on the maximally entangled state.
    Simulate {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        quantum: QuantumArgs,
    },
    /// Search for an `I = -I` contradiction and derive value bounds.
    Prove {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Print the certificate file instead of the report.
        #[arg(long)]
        emit_cert: bool,
    },
    /// Run every applicable stage.
    Analyze {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        quantum: QuantumArgs,
        #[command(flatten)]
        budget: BudgetArgs,
        /// Also run the substitution prover.
        #[arg(long)]
        prove: bool,
    },
}

#[derive(Debug, Subcommand)]
enum InstancesAction {
    List,
    Show { name: String },
}

#[derive(Debug, Subcommand)]
enum QsaAction {
    /// Check a non-contextual operator assignment.
    Verify {
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        quantum: QuantumArgs,
    },
}

#[derive(Debug, Args)]
struct Common {
    /// Built-in instance name.
    #[arg(long, conflicts_with = "file", required_unless_present = "file")]
    builtin: Option<String>,
    /// Instance file.
    #[arg(long)]
    file: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "human")]
    format: Format,
    /// Exit with status 1 unless the result shows a perfect strategy.
    #[arg(long)]
    expect_perfect: bool,
}

#[derive(Debug, Args)]
struct QuantumArgs {
    /// Observable file; built-in instances fall back to their bundled file.
    #[arg(long)]
    obs: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOL)]
    tol: f64,
}

#[derive(Debug, Args)]
struct BudgetArgs {
    /// Maximum number of substitutions.
    #[arg(long, default_value_t = DEFAULT_MAX_SUBSTITUTIONS)]
    depth: usize,
    /// Maximum word length.
    #[arg(long, default_value_t = DEFAULT_MAX_WORD_LENGTH)]
    max_len: usize,
}

impl BudgetArgs {
    fn budget(&self) -> Budget {
        Budget {
            max_substitutions: self.depth,
            max_word_length: self.max_len,
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        }
    }

    fn input_error(msg: impl std::fmt::Display) -> Self {
        Outcome {
            code: EXIT_INPUT,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        }
    }
}

#[derive(Debug)]
enum Failure {
    Input(String),
}

impl<E: Into<Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.into().to_string())
    }
}

fn read(path: &PathBuf) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_instance(c: &Common) -> Result<BcsInstance, Failure> {
    match (&c.builtin, &c.file) {
        (Some(name), _) => Ok(builtin_instance(name)?),
        (None, Some(path)) => Ok(parse_instance(&read(path)?)?),
        (None, None) => unreachable!("clap requires a source"),
    }
}

fn load_observables(inst: &BcsInstance, q: &QuantumArgs, required: bool) -> Result<Option<ObservableFile>, Failure> {
    let text = match (&q.obs, inst.name().and_then(builtin_observables)) {
        (Some(path), _) => read(path)?,
        (None, Some(bundled)) => bundled.to_string(),
        (None, None) if required => {
            return Err(Failure::Input("no observable file given (use --obs)".into()));
        }
        (None, None) => return Ok(None),
    };
    Ok(Some(parse_observable_file(&text)?))
}

fn check_tol(tol: f64) -> Result<(), Failure> {
    if tol.is_finite() && tol > 0.0 {
        Ok(())
    } else {
        Err(Failure::Input(format!("tolerance must be positive, got {tol}")))
    }
}

/// Parses `argv` (program name first) and executes the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(text)
            };
        }
    };
    match execute(cli.command) {
        Ok(out) => out,
        Err(Failure::Input(msg)) => Outcome::input_error(msg),
    }
}

fn finish(report: &AnalysisReport, format: Format, perfect: bool, expect_perfect: bool) -> Outcome {
    Outcome {
        code: if expect_perfect && !perfect {
            EXIT_NEGATIVE
        } else {
            EXIT_OK
        },
        stdout: render(report, format),
        stderr: String::new(),
    }
}

fn solve(inst: &BcsInstance) -> Result<Option<crate::bcs::Assignment>, Failure> {
    Ok(if inst.is_parity() {
        gf2_solve(inst)?
    } else {
        brute_force_solve(inst)?
    })
}

fn execute(cmd: Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Instances { action } => match action {
            InstancesAction::List => Ok(Outcome::ok(BUILTIN_NAMES.iter().map(|n| format!("{n}\n")).collect())),
            InstancesAction::Show { name } => Ok(Outcome::ok(serialize_instance(&builtin_instance(&name)?))),
        },
        Command::Satisfiable(common) => {
            let inst = load_instance(&common)?;
            let mut report = AnalysisReport::new(&inst);
            let sol = solve(&inst)?;
            let perfect = sol.is_some();
            report.satisfiable = Some(sol);
            Ok(finish(&report, common.format, perfect, common.expect_perfect))
        }
        Command::ClassicalValue(common) => {
            let inst = load_instance(&common)?;
            let mut report = AnalysisReport::new(&inst);
            let value = classical_value(&inst)?;
            let perfect = value.overall == 1.into();
            report.classical = Some(ClassicalSection {
                value: value.overall,
                witness: value.witness,
            });
            Ok(finish(&report, common.format, perfect, common.expect_perfect))
        }
        Command::Qsa {
            action: QsaAction::Verify { common, quantum },
        } => {
            check_tol(quantum.tol)?;
            let inst = load_instance(&common)?;
            let obs = load_observables(&inst, &quantum, true)?.expect("required");
            let qsa = verify_qsa(&inst, &obs.to_assignment()?, quantum.tol)?;
            let pass = qsa.pass;
            let mut report = AnalysisReport::new(&inst);
            report.qsa = Some(qsa);
            Ok(finish(&report, common.format, pass, true))
        }
        Command::Simulate { common, quantum } => {
            check_tol(quantum.tol)?;
            let inst = load_instance(&common)?;
            let obs = load_observables(&inst, &quantum, true)?.expect("required");
            let section = simulate(&inst, &obs, quantum.tol)?;
            let perfect = section.value >= 1.0 - quantum.tol;
            let mut report = AnalysisReport::new(&inst);
            report.quantum = Some(section);
            Ok(finish(&report, common.format, perfect, common.expect_perfect))
        }
        Command::Prove {
            common,
            budget,
            emit_cert,
        } => {
            let inst = load_instance(&common)?;
            let mut report = AnalysisReport::new(&inst);
            let outcome = search_contradiction(&inst, budget.budget())?;
            let refuted = outcome.certificate().is_some();
            if let SearchOutcome::Certificate(d) = &outcome {
                report.bounds = Some(cancellation_bounds(&inst, d)?);
                if emit_cert {
                    let mut out = finish(&report, common.format, !refuted, common.expect_perfect);
                    out.stdout = render_certificate(d);
                    return Ok(out);
                }
            }
            report.prover = Some(outcome);
            Ok(finish(&report, common.format, !refuted, common.expect_perfect))
        }
        Command::Analyze {
            common,
            quantum,
            budget,
            prove,
        } => {
            check_tol(quantum.tol)?;
            let inst = load_instance(&common)?;
            analyze(&inst, &common, &quantum, prove.then(|| budget.budget()))
        }
    }
}

fn simulate(inst: &BcsInstance, obs: &ObservableFile, tol: f64) -> Result<QuantumSection, Failure> {
    let strat = obs.to_strategy()?;
    let value = quantum_game_value(inst, &strat, tol)?;
    Ok(QuantumSection {
        value: value.overall,
        min_question: value.per_question.iter().map(|(_, p)| *p).fold(f64::INFINITY, f64::min),
        dim: strat.dim(),
        contextual: strat.is_contextual(),
    })
}

fn analyze(
    inst: &BcsInstance,
    common: &Common,
    quantum: &QuantumArgs,
    budget: Option<Budget>,
) -> Result<Outcome, Failure> {
    let mut report = AnalysisReport::new(inst);
    let mut notes = String::new();
    let mut perfect = false;

    match solve(inst) {
        Ok(sol) => {
            perfect |= sol.is_some();
            report.satisfiable = Some(sol);
        }
        Err(Failure::Input(msg)) => notes.push_str(&format!("note: satisfiability skipped: {msg}\n")),
    }
    match classical_value(inst) {
        Ok(v) => {
            report.classical = Some(ClassicalSection {
                value: v.overall,
                witness: v.witness,
            })
        }
        Err(e) => notes.push_str(&format!("note: classical value skipped: {e}\n")),
    }

    let mut refuted = false;
    if let Some(obs) = load_observables(inst, quantum, false)? {
        if obs.contextual.is_empty() {
            let qsa = verify_qsa(inst, &obs.to_assignment()?, quantum.tol)?;
            perfect |= qsa.pass;
            report.qsa = Some(qsa);
        }
        match simulate(inst, &obs, quantum.tol) {
            Ok(section) => {
                perfect |= section.value >= 1.0 - quantum.tol;
                report.quantum = Some(section);
            }
            Err(Failure::Input(msg)) => notes.push_str(&format!("note: strategy value skipped: {msg}\n")),
        }
    }

    if let Some(budget) = budget {
        if inst.is_parity() {
            let outcome = search_contradiction(inst, budget)?;
            if let SearchOutcome::Certificate(d) = &outcome {
                refuted = true;
                report.bounds = Some(cancellation_bounds(inst, d)?);
            }
            report.prover = Some(outcome);
        } else {
            notes.push_str("note: prover skipped: instance has non-parity constraints\n");
        }
    }

    let mut out = finish(&report, common.format, perfect && !refuted, common.expect_perfect);
    out.stderr = notes;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &str) -> Outcome {
        run(std::iter::once("bcsgame").chain(args.split_whitespace()))
    }

    #[test]
    fn list() {
        let out = run_args("instances list");
        assert_eq!(out.code, 0);
        assert_eq!(out.stdout.lines().collect::<Vec<_>>(), BUILTIN_NAMES);
    }

    #[test]
    fn usage_errors() {
        assert_eq!(run_args("frobnicate").code, EXIT_USAGE);
        assert_eq!(run_args("satisfiable").code, EXIT_USAGE);
        assert_eq!(run_args("satisfiable --builtin chsh --file x").code, EXIT_USAGE);
        assert_eq!(run_args("prove --builtin chsh --depth x").code, EXIT_USAGE);
    }

    #[test]
    fn input_errors() {
        assert_eq!(run_args("satisfiable --builtin nope").code, EXIT_INPUT);
        assert_eq!(run_args("satisfiable --file /nonexistent/x.bcs").code, EXIT_INPUT);
        assert_eq!(run_args("prove --builtin chsh --depth 0").code, EXIT_INPUT);
        assert_eq!(run_args("qsa verify --builtin four-line").code, EXIT_INPUT);
        assert_eq!(run_args("simulate --builtin chsh --tol=-1").code, EXIT_INPUT);
    }

    #[test]
    fn expectations() {
        assert_eq!(
            run_args("satisfiable --builtin chsh --expect-perfect").code,
            EXIT_NEGATIVE
        );
        assert_eq!(run_args("satisfiable --builtin chsh").code, EXIT_OK);
        assert_eq!(run_args("qsa verify --builtin magic-square").code, EXIT_OK);
        assert_eq!(
            run_args("simulate --builtin magic-square --expect-perfect").code,
            EXIT_OK
        );
        assert_eq!(run_args("simulate --builtin chsh --expect-perfect").code, EXIT_NEGATIVE);
        assert_eq!(run_args("prove --builtin chsh --expect-perfect").code, EXIT_NEGATIVE);
    }
}
