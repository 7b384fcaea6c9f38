use std::fmt::Write as _;

use num_traits::ToPrimitive;

use crate::bcs::{answer_string, Assignment, BcsInstance};
use crate::game::{ClassicalStrategy, Rational};
use crate::prover::{BoundReport, SearchOutcome};
use crate::quantum::QsaReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Human,
    Machine,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceSummary {
    pub name: Option<String>,
    pub vars: usize,
    pub constraints: usize,
    pub parity: bool,
    pub arities: Vec<usize>,
}

impl InstanceSummary {
    pub fn of(inst: &BcsInstance) -> Self {
        InstanceSummary {
            name: inst.name().map(str::to_string),
            vars: inst.var_count(),
            constraints: inst.constraint_count(),
            parity: inst.is_parity(),
            arities: inst.constraints().iter().map(|c| c.arity()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSection {
    pub value: Rational,
    pub witness: Option<ClassicalStrategy>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumSection {
    pub value: f64,
    pub min_question: f64,
    pub dim: usize,
    pub contextual: bool,
}

/// Results of whichever pipeline stages ran. Absent sections are not rendered.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisReport {
    pub summary: InstanceSummary,
    /// `Some(witness)` or `None` when the stage ran; outer `None` when it did not.
    pub satisfiable: Option<Option<Assignment>>,
    pub classical: Option<ClassicalSection>,
    pub qsa: Option<QsaReport>,
    pub quantum: Option<QuantumSection>,
    pub prover: Option<SearchOutcome>,
    pub bounds: Option<BoundReport>,
}

impl AnalysisReport {
    pub fn new(inst: &BcsInstance) -> Self {
        AnalysisReport {
            summary: InstanceSummary::of(inst),
            satisfiable: None,
            classical: None,
            qsa: None,
            quantum: None,
            prover: None,
            bounds: None,
        }
    }
}

fn float(x: f64) -> String {
    let s = format!("{x:.6}");
    // avoid "-0.000000"
    if s.trim_start_matches('-').bytes().all(|b| b == b'0' || b == b'.') {
        s.trim_start_matches('-').to_string()
    } else {
        s
    }
}

fn rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn decimal(r: &Rational) -> String {
    float(r.to_f64().expect("finite rational"))
}

fn alice_answers(inst_arities: &[usize], w: &ClassicalStrategy) -> String {
    w.alice
        .0
        .iter()
        .zip(inst_arities)
        .map(|(&code, &arity)| answer_string(code, arity))
        .collect::<Vec<_>>()
        .join(",")
}

/// Machine keys, in output order:
///
/// `instance.name instance.vars instance.constraints instance.parity`
/// `satisfiable.value satisfiable.witness`
/// `classical.value classical.decimal classical.alice classical.bob`
/// `qsa.pass qsa.max_residual qsa.square_residual qsa.hermitian_residual
///  qsa.commutator_residual qsa.constraint_residual qsa.worst_constraint`
/// `quantum.value quantum.min_question quantum.dim quantum.contextual`
/// `prover.verdict prover.start prover.k prover.substitutions prover.moves
///  prover.max_substitutions prover.max_word_length`
/// `bound.k bound.theta_min bound.correlation bound.per_question_success
///  bound.q_min bound.game_value bound.epsilon bound.averaged`
pub fn render(report: &AnalysisReport, format: Format) -> String {
    match format {
        Format::Machine => machine_fields(report)
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect(),
        Format::Human => render_human(report),
    }
}

fn machine_fields(report: &AnalysisReport) -> Vec<(&'static str, String)> {
    let mut fields: Vec<(&'static str, String)> = Vec::new();
    let s = &report.summary;
    fields.push(("instance.name", s.name.clone().unwrap_or_else(|| "-".into())));
    fields.push(("instance.vars", s.vars.to_string()));
    fields.push(("instance.constraints", s.constraints.to_string()));
    fields.push(("instance.parity", s.parity.to_string()));
    if let Some(sat) = &report.satisfiable {
        fields.push(("satisfiable.value", sat.is_some().to_string()));
        if let Some(w) = sat {
            fields.push(("satisfiable.witness", w.to_string()));
        }
    }
    if let Some(c) = &report.classical {
        fields.push(("classical.value", rational(&c.value)));
        fields.push(("classical.decimal", decimal(&c.value)));
        if let Some(w) = &c.witness {
            fields.push(("classical.alice", alice_answers(&s.arities, w)));
            fields.push(("classical.bob", w.bob.to_string()));
        }
    }
    if let Some(q) = &report.qsa {
        fields.push(("qsa.pass", q.pass.to_string()));
        fields.push(("qsa.max_residual", float(q.max_residual())));
        fields.push(("qsa.square_residual", float(q.square_residual)));
        fields.push(("qsa.hermitian_residual", float(q.hermitian_residual)));
        fields.push(("qsa.commutator_residual", float(q.commutator_residual)));
        fields.push(("qsa.constraint_residual", float(q.constraint_residual)));
        if let Some(wc) = q.worst_constraint {
            fields.push(("qsa.worst_constraint", wc.to_string()));
        }
    }
    if let Some(q) = &report.quantum {
        fields.push(("quantum.value", float(q.value)));
        fields.push(("quantum.min_question", float(q.min_question)));
        fields.push(("quantum.dim", q.dim.to_string()));
        fields.push(("quantum.contextual", q.contextual.to_string()));
    }
    match &report.prover {
        Some(SearchOutcome::Certificate(d)) => {
            fields.push(("prover.verdict", "certificate".into()));
            fields.push(("prover.start", d.start.to_string()));
            fields.push(("prover.k", d.k.to_string()));
            fields.push(("prover.substitutions", d.substitution_count().to_string()));
            fields.push(("prover.moves", d.moves.len().to_string()));
        }
        Some(SearchOutcome::Inconclusive { budget }) => {
            fields.push(("prover.verdict", "inconclusive".into()));
            fields.push(("prover.max_substitutions", budget.max_substitutions.to_string()));
            fields.push(("prover.max_word_length", budget.max_word_length.to_string()));
        }
        None => {}
    }
    if let Some(b) = &report.bounds {
        fields.push(("bound.k", b.k.to_string()));
        fields.push(("bound.theta_min", float(b.theta_min)));
        fields.push(("bound.correlation", float(b.per_question_correlation_bound)));
        fields.push(("bound.per_question_success", float(b.per_question_success_bound)));
        fields.push(("bound.q_min", rational(&b.q_min)));
        fields.push(("bound.game_value", float(b.game_value_bound)));
        fields.push(("bound.epsilon", float(b.epsilon)));
        if let Some(a) = b.averaged_bound {
            fields.push(("bound.averaged", float(a)));
        }
    }
    fields
}

fn render_human(r: &AnalysisReport) -> String {
    let mut out = String::new();
    let s = &r.summary;
    let kind = if s.parity { "parity" } else { "general" };
    let _ = writeln!(
        out,
        "instance {}: {} variables, {} constraints ({kind})",
        s.name.as_deref().unwrap_or("(unnamed)"),
        s.vars,
        s.constraints
    );

    if let Some(sat) = &r.satisfiable {
        let _ = writeln!(out, "\n[classical satisfiability]");
        match sat {
            Some(w) => {
                let _ = writeln!(out, "  satisfiable: yes");
                let _ = writeln!(out, "  witness: {w}");
            }
            None => {
                let _ = writeln!(out, "  satisfiable: no");
            }
        }
    }
    if let Some(c) = &r.classical {
        let _ = writeln!(out, "\n[classical value]");
        let _ = writeln!(out, "  value: {} ({})", rational(&c.value), decimal(&c.value));
        if let Some(w) = &c.witness {
            let _ = writeln!(out, "  alice: {}", alice_answers(&s.arities, w));
            let _ = writeln!(out, "  bob: {}", w.bob);
        }
    }
    if let Some(q) = &r.qsa {
        let _ = writeln!(out, "\n[operator assignment]");
        let _ = writeln!(out, "  verdict: {}", if q.pass { "pass" } else { "fail" });
        let _ = writeln!(out, "  tolerance: {:e}", q.tolerance);
        let _ = writeln!(out, "  square residual: {:e}", q.square_residual);
        let _ = writeln!(out, "  hermitian residual: {:e}", q.hermitian_residual);
        let _ = writeln!(out, "  commutator residual: {:e}", q.commutator_residual);
        let _ = writeln!(out, "  constraint residual: {:e}", q.constraint_residual);
        if let Some(wc) = q.worst_constraint {
            let _ = writeln!(out, "  worst constraint: {wc}");
        }
    }
    if let Some(q) = &r.quantum {
        let _ = writeln!(out, "\n[quantum strategy]");
        let _ = writeln!(
            out,
            "  dimension: {}{}",
            q.dim,
            if q.contextual { " (contextual)" } else { "" }
        );
        let _ = writeln!(out, "  value: {}", float(q.value));
        let _ = writeln!(out, "  weakest question: {}", float(q.min_question));
    }
    if let Some(p) = &r.prover {
        let _ = writeln!(out, "\n[substitution prover]");
        match p {
            SearchOutcome::Certificate(d) => {
                let _ = writeln!(out, "  verdict: contradiction I = -I");
                let _ = writeln!(
                    out,
                    "  start: constraint {}, {} substitutions, {} moves",
                    d.start,
                    d.substitution_count(),
                    d.moves.len()
                );
                let _ = writeln!(out, "  cross-context cancellations k: {}", d.k);
            }
            SearchOutcome::Inconclusive { budget } => {
                let _ = writeln!(
                    out,
                    "  verdict: inconclusive (up to {} substitutions, words of at most {} letters)",
                    budget.max_substitutions, budget.max_word_length
                );
            }
        }
    }
    if let Some(b) = &r.bounds {
        let _ = writeln!(out, "\n[entangled value bounds]");
        let _ = writeln!(out, "  k: {}", b.k);
        let _ = writeln!(out, "  minimum angle: {}", float(b.theta_min));
        let _ = writeln!(
            out,
            "  per-question correlation: <= {}",
            float(b.per_question_correlation_bound)
        );
        let _ = writeln!(
            out,
            "  per-question success: <= {}",
            float(b.per_question_success_bound)
        );
        let _ = writeln!(out, "  smallest question probability: {}", rational(&b.q_min));
        let _ = writeln!(out, "  game value: <= {}", float(b.game_value_bound));
        let _ = writeln!(out, "  gap: >= {}", float(b.epsilon));
        if let Some(a) = b.averaged_bound {
            let _ = writeln!(out, "  game value, averaged consistency: <= {}", float(a));
        }
    }
    out
}
