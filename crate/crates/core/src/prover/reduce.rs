use std::collections::HashMap;

use rustc_hash::FxHashMap;

use super::{Letter, Move, Word};

/// Longest word the reducer accepts (one bit per letter in the state mask).
pub const MAX_REDUCIBLE_LENGTH: usize = 128;

/// Swap/cancel moves that empty a word, with the number of cross-context cancels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub moves: Vec<Move>,
    pub k: usize,
}

/// Decides whether `w` reduces to `I = -I` by same-context swaps and
/// cancellations, returning a move list with the fewest cross-context cancels.
pub fn reduces_to_contradiction(w: &Word) -> Option<Reduction> {
    if w.sign != -1 {
        return None;
    }
    empty_word_reduction(w)
}

/// Same as [`reduces_to_contradiction`] but ignores the sign.
///
/// Swaps never change which letters remain, and the current word is always
/// swap-equivalent to the original letters at the surviving positions in
/// their original order. So the search runs over sets of surviving
/// positions. Letters `i < j` can be brought together exactly when the
/// survivors between them are some letters of `i`'s context followed by some
/// letters of `j`'s context.
pub fn empty_word_reduction(w: &Word) -> Option<Reduction> {
    let n = w.len();
    if n > MAX_REDUCIBLE_LENGTH || n % 2 == 1 {
        return None;
    }
    let mut counts: HashMap<usize, usize> = HashMap::new();
    for l in &w.letters {
        *counts.entry(l.var).or_default() += 1;
    }
    if counts.values().any(|c| c % 2 == 1) || !trivial_in_coxeter_group(&w.letters) {
        return None;
    }
    let full: u128 = if n == 128 { u128::MAX } else { (1u128 << n) - 1 };
    let mut solver = Solver {
        letters: &w.letters,
        memo: FxHashMap::default(),
        pairs: Vec::new(),
    };
    let k = solver.solve(full)? as usize;

    let mut pairs = Vec::with_capacity(n / 2);
    let mut mask = full;
    while mask != 0 {
        let (_, i, j) = solver.memo[&mask].expect("solved state");
        pairs.push((i as usize, j as usize));
        mask &= !(1u128 << i) & !(1u128 << j);
    }
    let moves = realize(&w.letters, &pairs);
    Some(Reduction { moves, k })
}

/// Necessary condition: with contexts erased, the word is the identity in the
/// right-angled Coxeter group where two variables commute when they occur
/// under a common context in the word. Swaps and cancels are valid there, and
/// its word problem is solved by deleting pairs `v ... v` whose interior
/// commutes with `v`, in any order.
fn trivial_in_coxeter_group(letters: &[Letter]) -> bool {
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut word: Vec<usize> = Vec::with_capacity(letters.len());
    for l in letters {
        let next = ids.len();
        word.push(*ids.entry(l.var).or_insert(next));
    }
    let mut by_ctx: HashMap<usize, u128> = HashMap::new();
    for (l, &v) in letters.iter().zip(&word) {
        *by_ctx.entry(l.ctx).or_default() |= 1u128 << v;
    }
    let mut commutes = vec![0u128; ids.len()];
    for &set in by_ctx.values() {
        for (v, row) in commutes.iter_mut().enumerate() {
            if set >> v & 1 == 1 {
                *row |= set;
            }
        }
    }
    'scan: loop {
        for i in 0..word.len() {
            let v = word[i];
            for j in i + 1..word.len() {
                if word[j] == v {
                    word.remove(j);
                    word.remove(i);
                    continue 'scan;
                }
                if commutes[v] >> word[j] & 1 == 0 {
                    break;
                }
            }
        }
        return word.is_empty();
    }
}

struct Solver<'a> {
    letters: &'a [Letter],
    /// mask -> (cost, chosen pair)
    memo: FxHashMap<u128, Option<(u32, u8, u8)>>,
    /// Stack of candidate pairs, one segment per recursion level.
    pairs: Vec<(u8, u8)>,
}

impl Solver<'_> {
    fn solve(&mut self, mask: u128) -> Option<u32> {
        if mask == 0 {
            return Some(0);
        }
        if let Some(hit) = self.memo.get(&mask) {
            return hit.map(|(c, _, _)| c);
        }
        let base = self.pairs.len();
        legal_pairs(self.letters, mask, &mut self.pairs);
        let letters = self.letters;
        // free cancellations first
        self.pairs[base..].sort_by_key(|&(i, j)| letters[i as usize].ctx != letters[j as usize].ctx);
        let mut best: Option<(u32, u8, u8)> = None;
        for idx in base..self.pairs.len() {
            let (i, j) = self.pairs[idx];
            let step = (self.letters[i as usize].ctx != self.letters[j as usize].ctx) as u32;
            if best.is_some_and(|(b, _, _)| step >= b) {
                continue;
            }
            let rest = mask & !(1u128 << i) & !(1u128 << j);
            if let Some(cost) = self.solve(rest) {
                let total = cost + step;
                if best.is_none_or(|(b, _, _)| total < b) {
                    best = Some((total, i, j));
                    if total == 0 {
                        break;
                    }
                }
            }
        }
        self.pairs.truncate(base);
        self.memo.insert(mask, best);
        best.map(|(c, _, _)| c)
    }
}

fn positions(mask: u128) -> impl Iterator<Item = usize> {
    let mut m = mask;
    std::iter::from_fn(move || {
        if m == 0 {
            return None;
        }
        let p = m.trailing_zeros() as usize;
        m &= m - 1;
        Some(p)
    })
}

/// Appends the pairs `(i, j)` of surviving positions that can be made
/// adjacent and cancelled.
fn legal_pairs(letters: &[Letter], mask: u128, out: &mut Vec<(u8, u8)>) {
    let mut live = [0u8; MAX_REDUCIBLE_LENGTH];
    let mut n = 0;
    for p in positions(mask) {
        live[n] = p as u8;
        n += 1;
    }
    for a in 0..n {
        let i = live[a] as usize;
        let (vi, ci) = (letters[i].var, letters[i].ctx);
        // context of the first survivor after `i` that does not commute with it
        let mut tail: Option<usize> = None;
        for &j in &live[a + 1..n] {
            let lj = letters[j as usize];
            if lj.var == vi && tail.is_none_or(|c| c == lj.ctx) {
                out.push((i as u8, j));
            }
            match tail {
                None if lj.ctx == ci => {}
                None => tail = Some(lj.ctx),
                Some(c) if c == lj.ctx => {}
                Some(_) => break,
            }
        }
    }
}

/// Turns a cancellation order over original positions into concrete moves.
fn realize(letters: &[Letter], pairs: &[(usize, usize)]) -> Vec<Move> {
    let mut word: Vec<(usize, Letter)> = letters.iter().copied().enumerate().collect();
    let mut moves = Vec::new();
    for &(i, j) in pairs {
        let mut ci = word.iter().position(|(p, _)| *p == i).expect("live letter");
        let mut cj = word.iter().position(|(p, _)| *p == j).expect("live letter");
        while cj - ci > 1 {
            if word[ci + 1].1.ctx == word[ci].1.ctx {
                word.swap(ci, ci + 1);
                moves.push(Move::Swap { pos: ci + 1 });
                ci += 1;
            } else {
                debug_assert_eq!(word[cj - 1].1.ctx, word[cj].1.ctx);
                word.swap(cj - 1, cj);
                moves.push(Move::Swap { pos: cj });
                cj -= 1;
            }
        }
        moves.push(Move::Cancel { pos: ci + 1 });
        word.drain(ci..=cj);
    }
    debug_assert!(word.is_empty());
    moves
}
