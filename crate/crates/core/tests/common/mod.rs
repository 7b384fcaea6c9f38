#![allow(dead_code)]

use std::collections::{HashMap, VecDeque};

use bcsgame::bcs::{
    answer_bit, constraint_polynomial, parse_instance, serialize_instance, Assignment, BcsInstance, Constraint,
};
use bcsgame::bcs::{brute_force_solve, gf2_solve};
use bcsgame::game::{classical_value, Rational};
use bcsgame::prover::{cancel, empty_word_reduction, relation_of, substitute, swap, Letter, Word};
use bcsgame::quantum::{
    correlation, joint_projectors, observables_from_projectors, ComplexMatrix, ObservableAssignment,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

pub const TOL: f64 = 1e-9;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

fn random_scope(rng: &mut StdRng, n: usize, max_arity: usize) -> Vec<usize> {
    let arity = rng.gen_range(1..=max_arity.min(n));
    let mut vars: Vec<usize> = (1..=n).collect();
    vars.shuffle(rng);
    vars.truncate(arity);
    vars
}

/// Random parity system whose right-hand sides are read off a hidden
/// assignment, so it is satisfiable by construction.
pub fn consistent_parity_instance(rng: &mut StdRng, n: usize, m: usize, max_arity: usize) -> (BcsInstance, Assignment) {
    let hidden = Assignment::from_bits((0..n).map(|_| rng.gen_range(0..=1)).collect());
    let constraints = (0..m)
        .map(|_| {
            let scope = random_scope(rng, n, max_arity);
            let rhs = scope.iter().map(|&t| hidden.get(t)).fold(0, |a, b| a ^ b);
            Constraint::parity(scope, rhs)
        })
        .collect();
    (BcsInstance::new(n, constraints).unwrap(), hidden)
}

pub fn random_parity_instance(rng: &mut StdRng, n: usize, m: usize, max_arity: usize) -> BcsInstance {
    let constraints = (0..m)
        .map(|_| Constraint::parity(random_scope(rng, n, max_arity), rng.gen_range(0..=1)))
        .collect();
    BcsInstance::new(n, constraints).unwrap()
}

/// Mix of parity and general constraints. General constraints accept a
/// random non-empty subset of answers.
pub fn random_instance(rng: &mut StdRng, n: usize, m: usize, max_arity: usize) -> BcsInstance {
    let constraints = (0..m)
        .map(|_| {
            let scope = random_scope(rng, n, max_arity);
            if rng.gen_bool(0.5) {
                return Constraint::parity(scope, rng.gen_range(0..=1));
            }
            let r = scope.len();
            let mut answers: Vec<String> = (0..1u32 << r)
                .filter(|_| rng.gen_bool(0.4))
                .map(|code| (0..r).map(|j| char::from(b'0' + answer_bit(code, r, j))).collect())
                .collect();
            if answers.is_empty() {
                answers.push("0".repeat(r));
            }
            Constraint::general(scope, &answers).unwrap()
        })
        .collect();
    BcsInstance::new(n, constraints).unwrap()
}

/// Classical value straight from the definition: every deterministic pair of
/// strategies, question `(s, t)` drawn with probability `1 / (m * r_s)`.
pub fn brute_force_classical_value(inst: &BcsInstance) -> Rational {
    let n = inst.var_count();
    let m = inst.constraint_count();
    let cs = inst.constraints();
    let alice_count: usize = cs.iter().map(|c| 1usize << c.arity()).product();
    let mut best = Rational::from_integer(0);
    for mut code in 0..alice_count {
        let mut alice = Vec::with_capacity(m);
        for c in cs {
            alice.push((code % (1 << c.arity())) as u32);
            code >>= c.arity();
        }
        for bob in 0..1u32 << n {
            let mut v = Rational::from_integer(0);
            for (c, &a) in cs.iter().zip(&alice) {
                for (j, &t) in c.scope.iter().enumerate() {
                    let bob_bit = (bob >> (t - 1) & 1) as u8;
                    if c.accepts(a) && answer_bit(a, c.arity(), j) == bob_bit {
                        v += Rational::new(1, (m * c.arity()) as i64);
                    }
                }
            }
            best = best.max(v);
        }
    }
    best
}

/// Product of the word's letters under context-free operators `ops[var]`.
pub fn word_operator(w: &Word, ops: &ObservableAssignment) -> ComplexMatrix {
    let mut acc = ComplexMatrix::identity(ops.dim());
    for l in &w.letters {
        acc = &acc * ops.get(l.var).unwrap();
    }
    acc
}

/// `|| prod(w) - sign * I ||`.
pub fn word_residual(w: &Word, ops: &ObservableAssignment) -> f64 {
    let id = ComplexMatrix::identity(ops.dim());
    (&word_operator(w, ops) - &id.scale(w.sign as f64)).spectral_norm()
}

/// Random legal rewriting walk from a constraint relation. Each step is a
/// substitution, swap or cancel chosen uniformly among the legal ones of a
/// random kind; the visitor sees every word on the way.
pub fn random_walk(inst: &BcsInstance, rng: &mut StdRng, steps: usize, max_len: usize, mut visit: impl FnMut(&Word)) {
    let start = rng.gen_range(1..=inst.constraint_count());
    let mut w = relation_of(inst, start).unwrap();
    visit(&w);
    for _ in 0..steps {
        let mut options: Vec<Word> = Vec::new();
        match rng.gen_range(0..3) {
            0 if w.len() < max_len => {
                for pos in 1..=w.len() {
                    let l = w.letters[pos - 1];
                    for s in inst.constraints_containing(l.var) {
                        if s == l.ctx {
                            continue;
                        }
                        let mut rest: Vec<usize> = inst
                            .constraint(s)
                            .unwrap()
                            .scope
                            .iter()
                            .copied()
                            .filter(|&v| v != l.var)
                            .collect();
                        rest.shuffle(rng);
                        options.push(substitute(inst, &w, pos, s, &rest).unwrap());
                    }
                }
            }
            1 => options.extend((1..w.len()).filter_map(|p| swap(&w, p).ok())),
            _ => options.extend((1..w.len()).filter_map(|p| cancel(&w, p).ok().map(|(x, _)| x))),
        }
        if let Some(next) = options.choose(rng) {
            w = next.clone();
            visit(&w);
        }
    }
}

/// Fewest cross-context cancels that empty `w` by swaps and cancels, found by
/// 0-1 breadth-first search over raw words. `None` if the empty word is
/// unreachable.
pub fn min_k_by_search(w: &[Letter]) -> Option<usize> {
    let mut dist: HashMap<Vec<Letter>, usize> = HashMap::new();
    let mut queue = VecDeque::new();
    dist.insert(w.to_vec(), 0);
    queue.push_back((w.to_vec(), 0));
    while let Some((cur, d)) = queue.pop_front() {
        if dist[&cur] < d {
            continue;
        }
        if cur.is_empty() {
            return Some(d);
        }
        for p in 0..cur.len().saturating_sub(1) {
            let (a, b) = (cur[p], cur[p + 1]);
            let mut moves = Vec::new();
            if a.ctx == b.ctx && a != b {
                let mut next = cur.clone();
                next.swap(p, p + 1);
                moves.push((next, 0));
            }
            if a.var == b.var {
                let mut next = cur.clone();
                next.drain(p..=p + 1);
                moves.push((next, (a.ctx != b.ctx) as usize));
            }
            for (next, cost) in moves {
                let nd = d + cost;
                if dist.get(&next).is_none_or(|&old| nd < old) {
                    dist.insert(next.clone(), nd);
                    if cost == 0 {
                        queue.push_front((next, nd));
                    } else {
                        queue.push_back((next, nd));
                    }
                }
            }
        }
    }
    None
}

/// Random unitary from the QR factor of a random complex matrix.
pub fn random_unitary(rng: &mut StdRng, d: usize) -> DMatrix<Complex64> {
    let m = DMatrix::from_fn(d, d, |_, _| {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    m.qr().q()
}

/// `r` commuting binary observables, diagonal in a shared random basis.
pub fn random_commuting_observables(rng: &mut StdRng, d: usize, r: usize) -> Vec<ComplexMatrix> {
    let u = random_unitary(rng, d);
    (0..r)
        .map(|_| {
            let diag = DMatrix::from_fn(d, d, |i, j| {
                if i == j {
                    Complex64::new(if rng.gen_bool(0.5) { 1.0 } else { -1.0 }, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
            ComplexMatrix(&u * diag * u.adjoint())
        })
        .collect()
}

fn norm(m: &ComplexMatrix) -> f64 {
    m.spectral_norm()
}

pub fn check_round_trip(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let (n, m) = (r.gen_range(1..=8), r.gen_range(1..=6));
    let inst = random_instance(&mut r, n, m, 4);
    let text = serialize_instance(&inst);
    prop_assert_eq!(parse_instance(&text).unwrap(), inst.clone());
    let named = inst.with_name("probe");
    prop_assert_eq!(parse_instance(&serialize_instance(&named)).unwrap(), named);
    Ok(())
}

pub fn check_solvers_agree(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let (n, m) = (r.gen_range(1..=8), r.gen_range(1..=8));
    let inst = random_parity_instance(&mut r, n, m, 4);
    let gf2 = gf2_solve(&inst).unwrap();
    let brute = brute_force_solve(&inst).unwrap();
    prop_assert_eq!(gf2.is_some(), brute.is_some());
    if let Some(a) = gf2 {
        prop_assert!(inst.is_satisfied_by(&a));
    }
    Ok(())
}

pub fn check_polynomial_truth_table(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let inst = random_instance(&mut r, 6, 1, 6);
    let c = &inst.constraints()[0];
    let p = constraint_polynomial(c);
    let arity = c.arity();
    for code in 0..1u32 << arity {
        let signs: Vec<i8> = (0..arity).map(|j| 1 - 2 * answer_bit(code, arity, j) as i8).collect();
        let expected = if c.accepts(code) { -1 } else { 1 };
        prop_assert_eq!(p.eval_signs(&signs), Rational::from_integer(expected));
    }
    if c.is_parity() {
        // one monomial over the whole scope
        prop_assert_eq!(p.coeffs.len(), 1);
        let full = (1u32 << arity) - 1;
        prop_assert!(p.coeffs.contains_key(&full));
        let rhs = (c.accepts(0) as u8) ^ 1;
        let flipped = Constraint::parity(c.scope.clone(), rhs ^ 1);
        prop_assert_eq!(constraint_polynomial(&flipped), p.neg());
    }
    Ok(())
}

pub fn check_classical_value(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let (n, m) = (r.gen_range(1..=4), r.gen_range(1..=3));
    let inst = random_instance(&mut r, n, m, 3);
    let report = classical_value(&inst).unwrap();
    prop_assert_eq!(report.overall, brute_force_classical_value(&inst));
    let satisfiable = brute_force_solve(&inst).unwrap().is_some();
    prop_assert_eq!(report.overall == Rational::from_integer(1), satisfiable);
    Ok(())
}

pub fn check_self_correlation(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let d = r.gen_range(1..=8);
    let a = &random_commuting_observables(&mut r, d, 1)[0];
    let c = correlation(a, &a.transpose()).unwrap();
    prop_assert!((c.re - 1.0).abs() < 1e-12 && c.im.abs() < 1e-12, "corr = {}", c);
    Ok(())
}

pub fn check_projector_identities(seed: u64) -> Result<(), TestCaseError> {
    let mut r = rng(seed);
    let d = r.gen_range(1..=8);
    let k = r.gen_range(1..=3);
    let obs = random_commuting_observables(&mut r, d, k);
    let pis = joint_projectors(&obs, TOL).unwrap();
    prop_assert_eq!(pis.len(), 1 << k);
    let id = ComplexMatrix::identity(d);
    let mut sum = ComplexMatrix::zeros(d);
    for (a, pa) in pis.iter().enumerate() {
        prop_assert!(norm(&(&(pa * pa) - pa)) < 1e-10);
        prop_assert!(norm(&(pa - &pa.adjoint())) < 1e-10);
        for pb in &pis[a + 1..] {
            prop_assert!(norm(&(pa * pb)) < 1e-10);
        }
        sum = &sum + pa;
    }
    prop_assert!(norm(&(&sum - &id)) < 1e-10);
    for (j, a) in obs.iter().enumerate() {
        let mut rebuilt = ComplexMatrix::zeros(d);
        for (code, pa) in pis.iter().enumerate() {
            let sign = if answer_bit(code as u32, k, j) == 0 { 1.0 } else { -1.0 };
            rebuilt = &rebuilt + &pa.scale(sign);
        }
        prop_assert!(norm(&(&rebuilt - a)) < 1e-10);
        let back = observables_from_projectors(&pis, j, TOL).unwrap();
        prop_assert!(norm(&(&back - a)) < 1e-10);
    }
    Ok(())
}

/// Words built from pairs of equal variables with random contexts, shuffled.
pub fn paired_word() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1usize..=3, 1usize..=3, 1usize..=3), 1..=5).prop_flat_map(|pairs| {
        let letters: Vec<Letter> = pairs
            .iter()
            .flat_map(|&(v, c1, c2)| [Letter::new(v, c1), Letter::new(v, c2)])
            .collect();
        Just(letters).prop_shuffle()
    })
}

pub fn check_min_k(letters: Vec<Letter>) -> Result<(), TestCaseError> {
    let w = Word::new(letters.clone(), -1);
    let dp = empty_word_reduction(&w);
    prop_assert_eq!(dp.as_ref().map(|r| r.k), min_k_by_search(&letters), "word {}", w);
    if let Some(red) = dp {
        let mut cur = w.clone();
        let mut k = 0;
        for m in &red.moves {
            cur = match m {
                bcsgame::prover::Move::Swap { pos } => swap(&cur, *pos).unwrap(),
                bcsgame::prover::Move::Cancel { pos } => {
                    let (next, cross) = cancel(&cur, *pos).unwrap();
                    k += cross as usize;
                    next
                }
                other => return Err(TestCaseError::fail(format!("unexpected move {other:?}"))),
            };
        }
        prop_assert!(cur.letters.is_empty());
        prop_assert_eq!(k, red.k);
    }
    Ok(())
}

/// Applies swaps and same-context cancels in an order drawn from `seed`
/// until none applies to any swap-equivalent word.
fn free_reduce(w: &Word, seed: u64) -> Word {
    let mut r = rng(seed);
    let mut cur = w.clone();
    loop {
        // pairs i < j of equal letters separated only by letters they commute with
        let mut candidates = Vec::new();
        for i in 0..cur.len() {
            for j in i + 1..cur.len() {
                let (a, b) = (cur.letters[i], cur.letters[j]);
                if a == b {
                    candidates.push((i, j));
                    break;
                }
                if b.ctx != a.ctx {
                    break;
                }
            }
        }
        let Some(&(i, j)) = candidates.choose(&mut r) else {
            return cur.canonical();
        };
        for p in (i + 1..j).rev() {
            cur = swap(&cur, p + 1).unwrap();
        }
        let (next, cross) = cancel(&cur, i + 1).unwrap();
        assert!(!cross);
        cur = next;
    }
}

pub fn check_free_reduction_confluent(letters: Vec<Letter>, seeds: (u64, u64)) -> Result<(), TestCaseError> {
    let w = Word::new(letters, 1);
    let a = free_reduce(&w, seeds.0);
    let b = free_reduce(&w, seeds.1);
    prop_assert_eq!(&a, &b, "word {}", w);
    // swapping first does not change the outcome
    let mut r = rng(seeds.0 ^ seeds.1);
    let mut shuffled = w.clone();
    for _ in 0..w.len() {
        if w.len() < 2 {
            break;
        }
        if let Ok(x) = swap(&shuffled, r.gen_range(1..w.len())) {
            shuffled = x;
        }
    }
    prop_assert_eq!(shuffled.canonical(), w.canonical());
    prop_assert_eq!(free_reduce(&shuffled, seeds.1), a);
    Ok(())
}

pub fn any_word() -> impl Strategy<Value = Vec<Letter>> {
    prop::collection::vec((1usize..=3, 1usize..=2).prop_map(|(v, c)| Letter::new(v, c)), 0..=10)
}
