use super::{Assignment, BcsError, BcsInstance, ConstraintKind};

pub const DEFAULT_BRUTE_FORCE_LIMIT: usize = 24;

/// Dense row over GF(2): variable bits followed by the right-hand side.
#[derive(Clone)]
struct Row {
    words: Vec<u64>,
}

impl Row {
    fn new(width: usize) -> Self {
        Row {
            words: vec![0; width.div_ceil(64)],
        }
    }

    #[inline]
    fn get(&self, i: usize) -> bool {
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    fn flip(&mut self, i: usize) {
        self.words[i / 64] ^= 1 << (i % 64);
    }

    fn xor_assign(&mut self, other: &Row) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }
}

/// Solves a parity system by Gauss-Jordan elimination over GF(2).
///
/// Pivots are chosen in ascending variable order and free variables are set
/// to 0, so the returned solution is deterministic.
pub fn gf2_solve(inst: &BcsInstance) -> Result<Option<Assignment>, BcsError> {
    let n = inst.var_count();
    let rhs_col = n;
    let mut rows = Vec::with_capacity(inst.constraint_count());
    for (i, c) in inst.constraints().iter().enumerate() {
        let ConstraintKind::Parity { rhs } = c.kind else {
            return Err(BcsError::NotParity(i + 1));
        };
        let mut row = Row::new(n + 1);
        for &v in &c.scope {
            row.flip(v - 1);
        }
        if rhs == 1 {
            row.flip(rhs_col);
        }
        rows.push(row);
    }

    let mut pivots: Vec<(usize, usize)> = Vec::new(); // (row, column)
    let mut next_row = 0;
    for col in 0..n {
        let Some(found) = (next_row..rows.len()).find(|&r| rows[r].get(col)) else {
            continue;
        };
        rows.swap(next_row, found);
        let pivot = rows[next_row].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != next_row && row.get(col) {
                row.xor_assign(&pivot);
            }
        }
        pivots.push((next_row, col));
        next_row += 1;
        if next_row == rows.len() {
            break;
        }
    }

    // remaining rows have no variable bits left; any 0 = 1 is a contradiction
    if rows[next_row..].iter().any(|r| r.get(rhs_col)) {
        return Ok(None);
    }
    let mut a = Assignment::zeros(n);
    for (r, col) in pivots {
        a.set(col + 1, rows[r].get(rhs_col) as u8);
    }
    debug_assert!(inst.is_satisfied_by(&a));
    Ok(Some(a))
}

/// Exhaustive search for the lexicographically smallest satisfying assignment
/// (`v_1` most significant).
pub fn brute_force_solve(inst: &BcsInstance) -> Result<Option<Assignment>, BcsError> {
    brute_force_solve_with_limit(inst, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn brute_force_solve_with_limit(inst: &BcsInstance, limit: usize) -> Result<Option<Assignment>, BcsError> {
    let n = inst.var_count();
    if n > limit || n >= 64 {
        return Err(BcsError::TooLarge { var_count: n, limit });
    }
    // per constraint: the bit shift of each scope variable within the global code
    let shifts: Vec<Vec<usize>> = inst
        .constraints()
        .iter()
        .map(|c| c.scope.iter().map(|&v| n - v).collect())
        .collect();
    for x in 0u64..(1u64 << n) {
        let ok = inst.constraints().iter().zip(&shifts).all(|(c, sh)| {
            let code = sh.iter().fold(0u32, |acc, &s| (acc << 1) | ((x >> s) & 1) as u32);
            c.accepts(code)
        });
        if ok {
            let bits = (1..=n).map(|v| ((x >> (n - v)) & 1) as u8).collect();
            return Ok(Some(Assignment::from_bits(bits)));
        }
    }
    Ok(None)
}
