//! Binary constraint systems: the instance model, the text format, classical
//! solvers and the multilinear-polynomial view of a constraint.
//!
//! Variables are 1-based throughout, matching the file format. A bit value of
//! `1` corresponds to the `±1` value `V = -1`, and a constraint polynomial
//! evaluates to `-1` exactly on the satisfying assignments.

mod builtin;
mod parse;
mod poly;
mod solve;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use builtin::{builtin_instance, BUILTIN_NAMES};
pub use parse::{parse_instance, serialize_instance};
pub use poly::{constraint_polynomial, MultilinearPoly};
pub use solve::{brute_force_solve, brute_force_solve_with_limit, gf2_solve, DEFAULT_BRUTE_FORCE_LIMIT};

/// Largest constraint arity accepted.
pub const MAX_ARITY: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BcsError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("line {line}: variable index {index} out of range 1..={var_count}")]
    IndexOutOfRange {
        line: usize,
        index: usize,
        var_count: usize,
    },
    #[error("line {line}: variable {index} appears twice in one scope")]
    DuplicateIndex { line: usize, index: usize },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("gf2_solve requires parity constraints; constraint {0} is general")]
    NotParity(usize),
    #[error("instance has {var_count} variables, above the brute-force limit of {limit}")]
    TooLarge { var_count: usize, limit: usize },
    #[error("unknown built-in instance `{name}`; valid names: {}", BUILTIN_NAMES.join(", "))]
    UnknownBuiltin { name: String },
}

/// What a constraint requires of the variables in its scope.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConstraintKind {
    /// XOR of the scope equals `rhs`.
    Parity { rhs: u8 },
    /// Explicit satisfying set. Each code holds one bitstring with the first
    /// scope variable in the most significant position, so numeric order is
    /// string order.
    General { satisfying: BTreeSet<u32> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Constraint {
    pub scope: Vec<usize>,
    pub kind: ConstraintKind,
}

/// Bit `j` (0-based position in scope) of an answer code over `r` variables.
#[inline]
pub fn answer_bit(code: u32, arity: usize, j: usize) -> u8 {
    ((code >> (arity - 1 - j)) & 1) as u8
}

/// Formats an answer code as a bitstring, first scope variable first.
pub fn answer_string(code: u32, arity: usize) -> String {
    (0..arity)
        .map(|j| if answer_bit(code, arity, j) == 1 { '1' } else { '0' })
        .collect()
}

impl Constraint {
    pub fn parity(scope: Vec<usize>, rhs: u8) -> Self {
        Constraint {
            scope,
            kind: ConstraintKind::Parity { rhs: rhs & 1 },
        }
    }

    /// Builds a general constraint from bitstrings such as `"01"`.
    pub fn general<S: AsRef<str>>(scope: Vec<usize>, satisfying: &[S]) -> Result<Self, BcsError> {
        let arity = scope.len();
        let mut set = BTreeSet::new();
        for s in satisfying {
            let code = parse_bits(s.as_ref(), arity).map_err(BcsError::Invalid)?;
            if !set.insert(code) {
                return Err(BcsError::Invalid(format!(
                    "satisfying string {} listed twice",
                    s.as_ref()
                )));
            }
        }
        Ok(Constraint {
            scope,
            kind: ConstraintKind::General { satisfying: set },
        })
    }

    pub fn arity(&self) -> usize {
        self.scope.len()
    }

    pub fn is_parity(&self) -> bool {
        matches!(self.kind, ConstraintKind::Parity { .. })
    }

    pub fn position_of(&self, var: usize) -> Option<usize> {
        self.scope.iter().position(|&v| v == var)
    }

    /// Whether an answer code (one bit per scope variable) satisfies this constraint.
    pub fn accepts(&self, code: u32) -> bool {
        match &self.kind {
            ConstraintKind::Parity { rhs } => (code.count_ones() & 1) as u8 == *rhs,
            ConstraintKind::General { satisfying } => satisfying.contains(&code),
        }
    }

    /// All satisfying answer codes in ascending order.
    pub fn satisfying_answers(&self) -> Vec<u32> {
        match &self.kind {
            ConstraintKind::Parity { .. } => (0..1u32 << self.arity()).filter(|&c| self.accepts(c)).collect(),
            ConstraintKind::General { satisfying } => satisfying.iter().copied().collect(),
        }
    }

    /// Restriction of a global assignment to this scope, as an answer code.
    pub fn restrict(&self, a: &Assignment) -> u32 {
        self.scope.iter().fold(0u32, |acc, &v| (acc << 1) | a.get(v) as u32)
    }
}

pub(crate) fn parse_bits(s: &str, arity: usize) -> Result<u32, String> {
    if s.len() != arity {
        return Err(format!(
            "bitstring `{s}` has length {} but the scope has {arity} variables",
            s.len()
        ));
    }
    s.chars().try_fold(0u32, |acc, c| match c {
        '0' => Ok(acc << 1),
        '1' => Ok((acc << 1) | 1),
        _ => Err(format!("bitstring `{s}` contains `{c}`")),
    })
}

/// Returns 1 if the assignment satisfies the constraint, 0 otherwise.
pub fn evaluate_constraint(c: &Constraint, a: &Assignment) -> u8 {
    c.accepts(c.restrict(a)) as u8
}

/// A binary constraint system.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BcsInstance {
    var_count: usize,
    constraints: Vec<Constraint>,
    name: Option<String>,
}

impl BcsInstance {
    pub fn new(var_count: usize, constraints: Vec<Constraint>) -> Result<Self, BcsError> {
        if var_count == 0 {
            return Err(BcsError::Invalid("instance needs at least one variable".into()));
        }
        if constraints.is_empty() {
            return Err(BcsError::Invalid("instance needs at least one constraint".into()));
        }
        for (i, c) in constraints.iter().enumerate() {
            if c.scope.is_empty() {
                return Err(BcsError::Invalid(format!("constraint {} has an empty scope", i + 1)));
            }
            if c.arity() > MAX_ARITY {
                return Err(BcsError::Invalid(format!(
                    "constraint {} has arity {} above {MAX_ARITY}",
                    i + 1,
                    c.arity()
                )));
            }
            let mut seen = BTreeSet::new();
            for &v in &c.scope {
                if v == 0 || v > var_count {
                    return Err(BcsError::IndexOutOfRange {
                        line: 0,
                        index: v,
                        var_count,
                    });
                }
                if !seen.insert(v) {
                    return Err(BcsError::DuplicateIndex { line: 0, index: v });
                }
            }
            if let ConstraintKind::General { satisfying } = &c.kind {
                if satisfying.iter().any(|&s| (s as u64) >= 1u64 << c.arity()) {
                    return Err(BcsError::Invalid(format!(
                        "constraint {} has a satisfying string longer than its scope",
                        i + 1
                    )));
                }
            }
        }
        Ok(BcsInstance {
            var_count,
            constraints,
            name: None,
        })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn var_count(&self) -> usize {
        self.var_count
    }

    pub fn constraint_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Constraint `s`, 1-based.
    pub fn constraint(&self, s: usize) -> Option<&Constraint> {
        s.checked_sub(1).and_then(|i| self.constraints.get(i))
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn is_parity(&self) -> bool {
        self.constraints.iter().all(Constraint::is_parity)
    }

    /// Constraints (1-based) whose scope contains `var`.
    pub fn constraints_containing(&self, var: usize) -> Vec<usize> {
        self.constraints
            .iter()
            .enumerate()
            .filter(|(_, c)| c.scope.contains(&var))
            .map(|(i, _)| i + 1)
            .collect()
    }

    pub fn is_satisfied_by(&self, a: &Assignment) -> bool {
        self.constraints.iter().all(|c| evaluate_constraint(c, a) == 1)
    }

    /// The same instance without constraint `s` (1-based). Fails if it is the last one.
    pub fn without_constraint(&self, s: usize) -> Result<Self, BcsError> {
        let mut constraints = self.constraints.clone();
        if s == 0 || s > constraints.len() {
            return Err(BcsError::Invalid(format!("no constraint {s}")));
        }
        constraints.remove(s - 1);
        BcsInstance::new(self.var_count, constraints)
    }
}

/// A truth assignment to all variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    bits: Vec<u8>,
}

impl Assignment {
    pub fn zeros(n: usize) -> Self {
        Assignment { bits: vec![0; n] }
    }

    pub fn from_bits(bits: Vec<u8>) -> Self {
        Assignment {
            bits: bits.into_iter().map(|b| b & 1).collect(),
        }
    }

    /// Variable `t` (1-based).
    pub fn get(&self, t: usize) -> u8 {
        self.bits[t - 1]
    }

    pub fn set(&mut self, t: usize, bit: u8) {
        self.bits[t - 1] = bit & 1;
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}
