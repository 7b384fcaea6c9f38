use std::collections::hash_map::Entry;

use rustc_hash::FxHashMap;

use super::reduce::reduces_to_contradiction;
use super::word::{parity_constraint, relation_of, substitute};
use super::{Derivation, Move, ProverError, Word};
use crate::bcs::BcsInstance;

pub const DEFAULT_MAX_SUBSTITUTIONS: usize = 8;
pub const DEFAULT_MAX_WORD_LENGTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_substitutions: usize,
    pub max_word_length: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_substitutions: DEFAULT_MAX_SUBSTITUTIONS,
            max_word_length: DEFAULT_MAX_WORD_LENGTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    Certificate(Derivation),
    /// No contradiction within the budget. Says nothing about satisfiability.
    Inconclusive {
        budget: Budget,
    },
}

impl SearchOutcome {
    pub fn certificate(&self) -> Option<&Derivation> {
        match self {
            SearchOutcome::Certificate(d) => Some(d),
            SearchOutcome::Inconclusive { .. } => None,
        }
    }
}

/// Iterative deepening on the number of substitutions. Within one depth the
/// DFS runs over start constraint, then position, then constraint, with the
/// remaining scope inserted in ascending order (every other order is
/// swap-equivalent). Substitutions at distinct letters commute, so positions
/// are only tried in non-decreasing order. Nodes are memoized on the word
/// together with that lower position bound, and dropped when too far from
/// the identity in a group where every reducible word is trivial, or when
/// their letter parities and sign cannot be balanced by the substitutions
/// left. Among the certificates of the first successful depth, the one with
/// the smallest `k` wins, ties going to the first found.
pub fn search_contradiction(inst: &BcsInstance, budget: Budget) -> Result<SearchOutcome, ProverError> {
    search_with(inst, budget, true)
}

fn search_with(inst: &BcsInstance, budget: Budget, parity_prune: bool) -> Result<SearchOutcome, ProverError> {
    if budget.max_substitutions == 0 || budget.max_word_length == 0 {
        return Err(ProverError::BadBudget);
    }
    for s in 1..=inst.constraint_count() {
        parity_constraint(inst, s)?;
    }
    // substitution targets per variable, ascending
    let mut targets: Vec<Vec<usize>> = vec![Vec::new(); inst.var_count() + 1];
    for (i, c) in inst.constraints().iter().enumerate() {
        for &t in &c.scope {
            targets[t].push(i + 1);
        }
    }

    let n = inst.var_count();
    let mut commutes = vec![false; (n + 1) * (n + 1)];
    for c in inst.constraints() {
        for &a in &c.scope {
            for &b in &c.scope {
                commutes[a * (n + 1) + b] = true;
            }
        }
    }
    let max_arity = inst.constraints().iter().map(|c| c.arity()).max().unwrap_or(1);
    let parity = parity_prune.then(|| ParityDistance::new(inst, budget.max_substitutions));

    for depth in 0..=budget.max_substitutions {
        let mut dfs = Dfs {
            inst,
            targets: &targets,
            commutes: &commutes,
            max_arity,
            parity: parity.as_ref(),
            depth,
            max_len: budget.max_word_length,
            seen: FxHashMap::default(),
            path: Vec::new(),
            best: None,
            start: 0,
        };
        for s in 1..=inst.constraint_count() {
            let w = relation_of(inst, s)?;
            if w.len() <= budget.max_word_length {
                dfs.start = s;
                dfs.visit(&w, 0, 1);
            }
        }
        if let Some(d) = dfs.best {
            return Ok(SearchOutcome::Certificate(d));
        }
    }
    Ok(SearchOutcome::Inconclusive { budget })
}

struct Dfs<'a> {
    inst: &'a BcsInstance,
    targets: &'a [Vec<usize>],
    commutes: &'a [bool],
    max_arity: usize,
    parity: Option<&'a ParityDistance>,
    depth: usize,
    max_len: usize,
    seen: FxHashMap<Box<[u64]>, usize>,
    path: Vec<Move>,
    best: Option<Derivation>,
    start: usize,
}

/// Memo entries kept before the memo is flushed. The memo only saves work,
/// so flushing never changes the result.
const MEMO_CAPACITY: usize = 1 << 21;

/// Vectors over GF(2) with bit 0 for the sign and bit `t` for variable `t`.
type Parity = Box<[u64]>;

/// Swaps and cancels keep every variable's letter count parity and the sign;
/// substituting through `c` flips the parities of `c`'s scope and flips the
/// sign when `c`'s right-hand side is 1. Reaching the empty word with sign -1
/// in `r` more substitutions therefore needs the word's vector plus that of
/// `I = -I` to be a sum of at most `r` constraint vectors. This table holds
/// the fewest constraints needed per vector, up to the budget.
struct ParityDistance {
    words: usize,
    dist: FxHashMap<Parity, usize>,
    /// Levels explored completely; absent vectors need more than this.
    complete: usize,
}

const PARITY_TABLE_CAPACITY: usize = 1 << 20;

impl ParityDistance {
    fn new(inst: &BcsInstance, max_level: usize) -> Self {
        let words = (inst.var_count() + 1).div_ceil(64);
        let generators: Vec<Parity> = inst
            .constraints()
            .iter()
            .map(|c| {
                let mut v = vec![0u64; words];
                for &t in &c.scope {
                    v[t / 64] ^= 1 << (t % 64);
                }
                if !c.accepts(0) {
                    v[0] ^= 1;
                }
                v.into_boxed_slice()
            })
            .collect();
        let zero: Parity = vec![0u64; words].into_boxed_slice();
        let mut dist = FxHashMap::default();
        dist.insert(zero.clone(), 0);
        let mut frontier = vec![zero];
        let mut complete = 0;
        while complete < max_level && !frontier.is_empty() && dist.len() < PARITY_TABLE_CAPACITY {
            let mut next = Vec::new();
            for v in &frontier {
                for g in &generators {
                    let sum: Parity = v.iter().zip(g.iter()).map(|(a, b)| a ^ b).collect();
                    if let Entry::Vacant(e) = dist.entry(sum.clone()) {
                        e.insert(complete + 1);
                        next.push(sum);
                    }
                }
            }
            frontier = next;
            complete += 1;
        }
        if frontier.is_empty() {
            // every reachable vector is in the table
            complete = usize::MAX;
        }
        ParityDistance { words, dist, complete }
    }

    /// Lower bound on the substitutions needed to turn `w` into `I = -I`.
    fn lower_bound(&self, w: &Word) -> usize {
        let mut v = vec![0u64; self.words];
        v[0] = (w.sign > 0) as u64;
        for l in &w.letters {
            v[l.var / 64] ^= 1 << (l.var % 64);
        }
        match self.dist.get(v.as_slice()) {
            Some(&d) => d,
            None => self.complete.saturating_add(1),
        }
    }
}

fn state_key(w: &Word, from: usize) -> Box<[u64]> {
    let head = ((w.sign < 0) as u64) << 63 | from as u64;
    std::iter::once(head)
        .chain(w.letters.iter().map(|l| (l.var as u64) << 32 | l.ctx as u64))
        .collect()
}

impl Dfs<'_> {
    /// Reduced length of `w` in the right-angled Coxeter group on the
    /// variables where two variables commute when they share a constraint.
    /// Every reducible word is trivial there, and one substitution changes
    /// the length by at most the largest arity.
    fn group_length(&self, w: &Word) -> usize {
        let n = self.inst.var_count() + 1;
        let mut word: Vec<usize> = w.letters.iter().map(|l| l.var).collect();
        'scan: loop {
            for i in 0..word.len() {
                let v = word[i];
                for j in i + 1..word.len() {
                    if word[j] == v {
                        word.remove(j);
                        word.remove(i);
                        continue 'scan;
                    }
                    if !self.commutes[v * n + word[j]] {
                        break;
                    }
                }
            }
            return word.len();
        }
    }

    fn visit(&mut self, w: &Word, level: usize, from: usize) {
        let remaining = self.depth - level;
        if self.group_length(w) > remaining * self.max_arity {
            return;
        }
        if self.parity.is_some_and(|p| p.lower_bound(w) > remaining) {
            return;
        }
        // leaves are only tested for reduction, which ignores `from`
        let key = state_key(w, if level == self.depth { 0 } else { from });
        if self.seen.len() >= MEMO_CAPACITY {
            self.seen.clear();
        }
        match self.seen.entry(key) {
            Entry::Occupied(mut e) => {
                if *e.get() <= level {
                    return;
                }
                e.insert(level);
            }
            Entry::Vacant(e) => {
                e.insert(level);
            }
        }

        if level == self.depth {
            if let Some(red) = reduces_to_contradiction(w) {
                if red.k >= 1 && self.best.as_ref().is_none_or(|b| red.k < b.k) {
                    let mut moves = self.path.clone();
                    moves.extend(red.moves);
                    self.best = Some(Derivation {
                        start: self.start,
                        moves,
                        final_word: Word::new(vec![], -1),
                        k: red.k,
                    });
                }
            }
            return;
        }

        for pos in from..=w.len() {
            let letter = w.letters[pos - 1];
            for &c in &self.targets[letter.var] {
                if c == letter.ctx {
                    continue;
                }
                let scope = &self.inst.constraints()[c - 1].scope;
                if w.len() + scope.len() > self.max_len {
                    continue;
                }
                let mut perm: Vec<usize> = scope.iter().copied().filter(|&v| v != letter.var).collect();
                perm.sort_unstable();
                let next = substitute(self.inst, w, pos, c, &perm).expect("legal substitution");
                self.path.push(Move::Substitute {
                    pos,
                    constraint: c,
                    perm,
                });
                self.visit(&next, level + 1, pos);
                self.path.pop();
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::{builtin_instance, parse_instance};
    use crate::prover::check_derivation;

    #[test]
    fn chsh_certificate() {
        let inst = builtin_instance("chsh").unwrap();
        let out = search_contradiction(&inst, Budget::default()).unwrap();
        let d = out.certificate().unwrap();
        assert_eq!(d.k, 2);
        assert_eq!(d.substitution_count(), 1);
        check_derivation(&inst, d).unwrap();
    }

    #[test]
    fn four_line_certificate() {
        let inst = builtin_instance("four-line").unwrap();
        let budget = Budget {
            max_substitutions: 3,
            ..Budget::default()
        };
        let d = search_contradiction(&inst, budget)
            .unwrap()
            .certificate()
            .cloned()
            .unwrap();
        assert_eq!(d.k, 6);
        assert_eq!(d.substitution_count(), 3);
        check_derivation(&inst, &d).unwrap();
    }

    #[test]
    fn satisfiable_is_inconclusive() {
        let inst = parse_instance("vars 3\nparity 1 2 = 1\nparity 2 3 = 0\nparity 1 3 = 1").unwrap();
        let budget = Budget {
            max_substitutions: 4,
            max_word_length: 20,
        };
        assert_eq!(
            search_contradiction(&inst, budget).unwrap(),
            SearchOutcome::Inconclusive { budget }
        );
    }

    #[test]
    fn parity_pruning_keeps_outcomes() {
        use crate::bcs::{gf2_solve, Constraint};
        use rand::rngs::StdRng;
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};

        let mut rng = StdRng::seed_from_u64(7);
        let mut compared = 0;
        let mut found = 0;
        while compared < 40 {
            let n = rng.gen_range(2..=5);
            let m = rng.gen_range(2..=5);
            let constraints = (0..m)
                .map(|_| {
                    let mut vars: Vec<usize> = (1..=n).collect();
                    vars.shuffle(&mut rng);
                    vars.truncate(rng.gen_range(1..=3.min(n)));
                    Constraint::parity(vars, rng.gen_range(0..=1))
                })
                .collect();
            let inst = BcsInstance::new(n, constraints).unwrap();
            if gf2_solve(&inst).unwrap().is_some() {
                continue;
            }
            let budget = Budget {
                max_substitutions: 3,
                max_word_length: 16,
            };
            let pruned = search_with(&inst, budget, true).unwrap();
            assert_eq!(pruned, search_with(&inst, budget, false).unwrap());
            found += pruned.certificate().is_some() as usize;
            compared += 1;
        }
        assert!(found > 0);
    }

    #[test]
    fn unpruned_search_finds_nothing_on_satisfiable_systems() {
        use crate::bcs::{Assignment, Constraint};
        use rand::rngs::StdRng;
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};

        let mut rng = StdRng::seed_from_u64(11);
        for _ in 0..40 {
            let n = rng.gen_range(2..=6);
            let hidden = Assignment::from_bits((0..n).map(|_| rng.gen_range(0..=1)).collect());
            let constraints = (0..rng.gen_range(2..=5))
                .map(|_| {
                    let mut vars: Vec<usize> = (1..=n).collect();
                    vars.shuffle(&mut rng);
                    vars.truncate(rng.gen_range(1..=3.min(n)));
                    let rhs = vars.iter().map(|&t| hidden.get(t)).fold(0, |a, b| a ^ b);
                    Constraint::parity(vars, rhs)
                })
                .collect();
            let inst = BcsInstance::new(n, constraints).unwrap();
            let budget = Budget {
                max_substitutions: 3,
                max_word_length: 16,
            };
            assert_eq!(
                search_with(&inst, budget, false).unwrap(),
                SearchOutcome::Inconclusive { budget }
            );
        }
    }

    #[test]
    fn parity_table_distances() {
        let inst = builtin_instance("magic-square").unwrap();
        let table = ParityDistance::new(&inst, 8);
        // a bare relation word needs its own constraint plus the five others
        let w = relation_of(&inst, 1).unwrap();
        assert_eq!(table.lower_bound(&w), 5);
        assert_eq!(table.lower_bound(&Word::new(vec![], -1)), 0);
        assert_eq!(table.lower_bound(&Word::new(vec![], 1)), 6);
        let sat = parse_instance("vars 2\nparity 1 2 = 1\nparity 1 = 0").unwrap();
        let table = ParityDistance::new(&sat, 8);
        assert!(table.lower_bound(&relation_of(&sat, 1).unwrap()) > 8);
    }

    #[test]
    fn bad_budget() {
        let inst = builtin_instance("chsh").unwrap();
        let budget = Budget {
            max_substitutions: 0,
            max_word_length: 40,
        };
        assert_eq!(search_contradiction(&inst, budget), Err(ProverError::BadBudget));
    }

    #[test]
    fn general_constraints_rejected() {
        let inst = parse_instance("vars 2\ngeneral 1 2 : 01,10").unwrap();
        assert_eq!(
            search_contradiction(&inst, Budget::default()),
            Err(ProverError::NotParity(1))
        );
    }
}
