//! Substitution proofs of quantum unsatisfiability for parity systems.
//!
//! A [`Word`] records an operator equation `A_{t1,s1} A_{t2,s2} ... = sign * I`
//! over contextual binary observables: letter `(t, s)` stands for Alice's
//! observable for variable `t` when asked constraint `s`. Three moves rewrite
//! such equations soundly:
//!
//! * **substitute** uses constraint `s'` to replace `A_{t,s}` by
//!   `A_{t,s} A_{t,s'} (product of the rest of s')`, picking up `(-1)^{rhs}`;
//! * **swap** commutes two adjacent letters of the same context;
//! * **cancel** deletes two adjacent letters of the same variable. When the
//!   contexts differ the deletion is only approximately valid for strategies
//!   that are not perfect, and each such step is counted in `k`.
//!
//! Reaching the empty word with sign `-1` proves `I = -I` for any perfect
//! strategy, and `k` turns into an explicit upper bound below 1 on the
//! entangled value (see [`cancellation_bounds`]).

mod bounds;
mod certificate;
mod reduce;
mod search;
mod word;

use std::fmt;

use thiserror::Error;

pub use bounds::{bounds_for_k, cancellation_bounds, BoundReport};
pub use certificate::{check_derivation, parse_certificate, render_certificate};
pub use reduce::{empty_word_reduction, reduces_to_contradiction, Reduction, MAX_REDUCIBLE_LENGTH};
pub use search::{search_contradiction, Budget, SearchOutcome, DEFAULT_MAX_SUBSTITUTIONS, DEFAULT_MAX_WORD_LENGTH};
pub use word::{cancel, relation_of, substitute, swap};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProverError {
    #[error("constraint {0} is not a parity constraint")]
    NotParity(usize),
    #[error("no constraint {0}")]
    NoSuchConstraint(usize),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("move {index}: {reason}")]
    InvalidCertificate { index: usize, reason: String },
    #[error("certificate: {0}")]
    BadCertificate(String),
    #[error("search budget must be positive")]
    BadBudget,
    #[error("certificate file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Occurrence of variable `var` measured in the context of constraint `ctx`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Letter {
    pub var: usize,
    pub ctx: usize,
}

impl Letter {
    pub fn new(var: usize, ctx: usize) -> Self {
        Letter { var, ctx }
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "A{}@{}", self.var, self.ctx)
    }
}

/// The equation `letters[0] * letters[1] * ... = sign * I`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub letters: Vec<Letter>,
    pub sign: i8,
}

impl Word {
    pub fn new(letters: Vec<Letter>, sign: i8) -> Self {
        debug_assert!(sign == 1 || sign == -1);
        Word { letters, sign }
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `I = -I`.
    pub fn is_contradiction(&self) -> bool {
        self.letters.is_empty() && self.sign == -1
    }

    /// Whether the equation holds for the scalar observables `A_t = (-1)^{v_t}`.
    pub fn holds_under(&self, a: &crate::bcs::Assignment) -> bool {
        let parity = self.letters.iter().map(|l| a.get(l.var) as u32).sum::<u32>() & 1;
        let product: i8 = if parity == 0 { 1 } else { -1 };
        product == self.sign
    }

    /// Representative of the word's class under same-context swaps: every
    /// maximal same-context run sorted by variable.
    pub fn canonical(&self) -> Word {
        let mut letters = self.letters.clone();
        for run in letters.chunk_by_mut(|a, b| a.ctx == b.ctx) {
            run.sort_unstable();
        }
        Word::new(letters, self.sign)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            write!(f, "I")?;
        }
        for (i, l) in self.letters.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, " = {}I", if self.sign < 0 { "-" } else { "" })
    }
}

/// One rewriting step. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    Substitute {
        pos: usize,
        constraint: usize,
        perm: Vec<usize>,
    },
    Swap {
        pos: usize,
    },
    Cancel {
        pos: usize,
    },
}

/// A replayable derivation starting from the relation of constraint `start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation {
    pub start: usize,
    pub moves: Vec<Move>,
    pub final_word: Word,
    /// Number of cross-context cancellations.
    pub k: usize,
}

impl Derivation {
    pub fn is_certificate(&self) -> bool {
        self.final_word.is_contradiction() && self.k >= 1
    }

    pub fn substitution_count(&self) -> usize {
        self.moves
            .iter()
            .filter(|m| matches!(m, Move::Substitute { .. }))
            .count()
    }
}
