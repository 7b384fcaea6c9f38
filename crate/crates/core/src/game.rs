//! The BCS game: question law, deterministic strategies and exact classical value.
//!
//! The verifier picks a constraint uniformly, then a variable of that
//! constraint uniformly, so question `(s, t)` has probability `1/(m * r_s)`.
//! All classical values are exact rationals; internally they are integer
//! weights over the common denominator `m * lcm(r_1, ..., r_m)`.

use num_integer::Integer;
use num_rational::Ratio;
use rayon::prelude::*;
use thiserror::Error;

use crate::bcs::{answer_bit, Assignment, BcsInstance};

pub type Rational = Ratio<i64>;

pub const DEFAULT_ENUMERATION_LIMIT: u64 = 1 << 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GameError {
    #[error("classical value needs {required} Alice strategies, above the limit of {limit}")]
    EnumerationLimit { required: u128, limit: u64 },
    #[error("malformed strategy: {0}")]
    Malformed(String),
}

/// Alice receives constraint `s`, Bob receives variable `t` from its scope. Both 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Question {
    pub s: usize,
    pub t: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuestionDistribution {
    pub entries: Vec<(Question, Rational)>,
}

impl QuestionDistribution {
    pub fn min_probability(&self) -> Rational {
        self.entries
            .iter()
            .map(|(_, p)| *p)
            .min()
            .expect("instances have at least one question")
    }

    pub fn probability(&self, q: Question) -> Option<Rational> {
        self.entries.iter().find(|(e, _)| *e == q).map(|(_, p)| *p)
    }
}

pub fn question_distribution(inst: &BcsInstance) -> QuestionDistribution {
    let m = inst.constraint_count() as i64;
    let entries = inst
        .constraints()
        .iter()
        .enumerate()
        .flat_map(|(i, c)| {
            let p = Rational::new(1, m * c.arity() as i64);
            c.scope.iter().map(move |&t| (Question { s: i + 1, t }, p))
        })
        .collect();
    QuestionDistribution { entries }
}

/// Alice's answers, one code per constraint (first scope variable most significant).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AliceAnswers(pub Vec<u32>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassicalStrategy {
    pub alice: AliceAnswers,
    pub bob: Assignment,
}

impl ClassicalStrategy {
    fn check(&self, inst: &BcsInstance) -> Result<(), GameError> {
        if self.alice.0.len() != inst.constraint_count() {
            return Err(GameError::Malformed(format!(
                "Alice answers {} constraints, instance has {}",
                self.alice.0.len(),
                inst.constraint_count()
            )));
        }
        if self.bob.len() != inst.var_count() {
            return Err(GameError::Malformed(format!(
                "Bob answers {} variables, instance has {}",
                self.bob.len(),
                inst.var_count()
            )));
        }
        for (c, &a) in inst.constraints().iter().zip(&self.alice.0) {
            if (a as u64) >= 1u64 << c.arity() {
                return Err(GameError::Malformed(format!("answer {a} too long for scope")));
            }
        }
        Ok(())
    }
}

/// Per-question and overall success probabilities. `V` is [`Rational`] for
/// classical evaluation and `f64` for quantum strategies.
#[derive(Debug, Clone, PartialEq)]
pub struct GameValueReport<V> {
    pub per_question: Vec<(Question, V)>,
    pub overall: V,
    pub witness: Option<ClassicalStrategy>,
}

/// Integer question weights over the common denominator.
struct Weights {
    per_constraint: Vec<i64>,
    total: i64,
}

impl Weights {
    fn new(inst: &BcsInstance) -> Self {
        let lcm = inst
            .constraints()
            .iter()
            .fold(1i64, |acc, c| acc.lcm(&(c.arity() as i64)));
        Weights {
            per_constraint: inst.constraints().iter().map(|c| lcm / c.arity() as i64).collect(),
            total: lcm * inst.constraint_count() as i64,
        }
    }

    fn ratio(&self, score: i64) -> Rational {
        Rational::new(score, self.total)
    }
}

pub fn evaluate_deterministic(
    inst: &BcsInstance,
    strat: &ClassicalStrategy,
) -> Result<GameValueReport<Rational>, GameError> {
    strat.check(inst)?;
    let weights = Weights::new(inst);
    let mut per_question = Vec::new();
    let mut score = 0i64;
    for (i, c) in inst.constraints().iter().enumerate() {
        let answer = strat.alice.0[i];
        let satisfied = c.accepts(answer);
        for (j, &t) in c.scope.iter().enumerate() {
            let win = satisfied && answer_bit(answer, c.arity(), j) == strat.bob.get(t);
            if win {
                score += weights.per_constraint[i];
            }
            per_question.push((Question { s: i + 1, t }, Rational::from_integer(win as i64)));
        }
    }
    Ok(GameValueReport {
        per_question,
        overall: weights.ratio(score),
        witness: Some(strat.clone()),
    })
}

/// Per-variable weight of Alice saying 0 / 1, counting only satisfied constraints.
fn vote_tallies(inst: &BcsInstance, weights: &Weights, alice: &[u32]) -> Vec<[i64; 2]> {
    let mut tally = vec![[0i64; 2]; inst.var_count()];
    for (i, c) in inst.constraints().iter().enumerate() {
        if !c.accepts(alice[i]) {
            continue;
        }
        for (j, &t) in c.scope.iter().enumerate() {
            tally[t - 1][answer_bit(alice[i], c.arity(), j) as usize] += weights.per_constraint[i];
        }
    }
    tally
}

/// Bob's optimal reply to a fixed Alice half: each variable independently
/// follows the heavier side of Alice's answers (ties go to 0).
pub fn best_bob_response(inst: &BcsInstance, alice: &AliceAnswers) -> Result<(Assignment, Rational), GameError> {
    if alice.0.len() != inst.constraint_count() {
        return Err(GameError::Malformed(format!(
            "Alice answers {} constraints, instance has {}",
            alice.0.len(),
            inst.constraint_count()
        )));
    }
    let weights = Weights::new(inst);
    let tally = vote_tallies(inst, &weights, &alice.0);
    let bits = tally.iter().map(|[w0, w1]| (w1 > w0) as u8).collect();
    let score: i64 = tally.iter().map(|[w0, w1]| *w0.max(w1)).sum();
    Ok((Assignment::from_bits(bits), weights.ratio(score)))
}

pub fn classical_value(inst: &BcsInstance) -> Result<GameValueReport<Rational>, GameError> {
    classical_value_with_limit(inst, DEFAULT_ENUMERATION_LIMIT)
}

/// Exact classical value by enumerating Alice's constraint-satisfying answers
/// and letting Bob best-respond.
pub fn classical_value_with_limit(inst: &BcsInstance, limit: u64) -> Result<GameValueReport<Rational>, GameError> {
    // a constraint with no satisfying answer gets one placeholder answer that always loses
    let choices: Vec<Vec<u32>> = inst
        .constraints()
        .iter()
        .map(|c| {
            let sat = c.satisfying_answers();
            if sat.is_empty() {
                vec![0]
            } else {
                sat
            }
        })
        .collect();
    let required = choices
        .iter()
        .try_fold(1u128, |acc, ch| acc.checked_mul(ch.len() as u128))
        .unwrap_or(u128::MAX);
    if required > limit as u128 {
        return Err(GameError::EnumerationLimit { required, limit });
    }
    let total = required as u64;
    let weights = Weights::new(inst);

    let chunk = (total / (4 * rayon::current_num_threads() as u64).max(1)).max(1024);
    let starts: Vec<u64> = (0..total).step_by(chunk as usize).collect();
    let (best_score, best_index) = starts
        .par_iter()
        .map(|&start| {
            let end = (start + chunk).min(total);
            scan_range(inst, &weights, &choices, start, end)
        })
        .reduce(
            || (i64::MIN, u64::MAX),
            |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a },
        );
    debug_assert!(best_index < total);

    let digits = decode_index(&choices, best_index);
    let alice = AliceAnswers(digits.iter().zip(&choices).map(|(&d, ch)| ch[d]).collect());
    let (bob, value) = best_bob_response(inst, &alice)?;
    debug_assert_eq!(value, weights.ratio(best_score));
    evaluate_deterministic(inst, &ClassicalStrategy { alice, bob })
}

/// Mixed-radix digits of an enumeration index; constraint 1 is most significant.
fn decode_index(choices: &[Vec<u32>], mut index: u64) -> Vec<usize> {
    let mut digits = vec![0; choices.len()];
    for (d, ch) in digits.iter_mut().zip(choices).rev() {
        let radix = ch.len() as u64;
        *d = (index % radix) as usize;
        index /= radix;
    }
    digits
}

/// Best (score, index) over enumeration indices `start..end`, first index on ties.
fn scan_range(inst: &BcsInstance, weights: &Weights, choices: &[Vec<u32>], start: u64, end: u64) -> (i64, u64) {
    let constraints = inst.constraints();
    let mut digits = decode_index(choices, start);
    let alice: Vec<u32> = digits.iter().zip(choices).map(|(&d, ch)| ch[d]).collect();
    let mut tally = vote_tallies(inst, weights, &alice);

    let apply = |tally: &mut Vec<[i64; 2]>, i: usize, answer: u32, sign: i64| {
        let c = &constraints[i];
        if !c.accepts(answer) {
            return;
        }
        for (j, &t) in c.scope.iter().enumerate() {
            tally[t - 1][answer_bit(answer, c.arity(), j) as usize] += sign * weights.per_constraint[i];
        }
    };

    let mut best = (i64::MIN, u64::MAX);
    let mut index = start;
    loop {
        let score: i64 = tally.iter().map(|[a, b]| *a.max(b)).sum();
        if score > best.0 {
            best = (score, index);
        }
        index += 1;
        if index >= end {
            break;
        }
        // odometer step, least significant digit last
        let mut pos = choices.len() - 1;
        loop {
            let ch = &choices[pos];
            apply(&mut tally, pos, ch[digits[pos]], -1);
            digits[pos] += 1;
            if digits[pos] < ch.len() {
                apply(&mut tally, pos, ch[digits[pos]], 1);
                break;
            }
            digits[pos] = 0;
            apply(&mut tally, pos, ch[0], 1);
            pos -= 1;
        }
    }
    best
}
