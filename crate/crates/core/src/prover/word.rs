use super::{Letter, ProverError, Word};
use crate::bcs::{BcsInstance, Constraint, ConstraintKind};

fn illegal(msg: impl Into<String>) -> ProverError {
    ProverError::IllegalMove(msg.into())
}

pub(crate) fn parity_constraint(inst: &BcsInstance, s: usize) -> Result<(&Constraint, u8), ProverError> {
    let c = inst.constraint(s).ok_or(ProverError::NoSuchConstraint(s))?;
    match c.kind {
        ConstraintKind::Parity { rhs } => Ok((c, rhs)),
        ConstraintKind::General { .. } => Err(ProverError::NotParity(s)),
    }
}

/// The relation `prod_{t in scope(c_s)} A_{t,s} = (-1)^{rhs} I`.
pub fn relation_of(inst: &BcsInstance, s: usize) -> Result<Word, ProverError> {
    let (c, rhs) = parity_constraint(inst, s)?;
    let letters = c.scope.iter().map(|&t| Letter::new(t, s)).collect();
    Ok(Word::new(letters, if rhs == 1 { -1 } else { 1 }))
}

/// Expands the letter at `pos` (1-based) through constraint `constraint`:
/// `A_{t,s}` becomes `A_{t,s} A_{t,s'} A_{u1,s'} ... A_{uk,s'}` where `perm`
/// lists the other variables of `s'`.
pub fn substitute(
    inst: &BcsInstance,
    w: &Word,
    pos: usize,
    constraint: usize,
    perm: &[usize],
) -> Result<Word, ProverError> {
    let idx = pos
        .checked_sub(1)
        .filter(|&i| i < w.len())
        .ok_or_else(|| illegal(format!("position {pos} outside word of length {}", w.len())))?;
    let letter = w.letters[idx];
    let (c, rhs) = parity_constraint(inst, constraint)?;
    if letter.ctx == constraint {
        return Err(illegal(format!(
            "letter {letter} already belongs to constraint {constraint}"
        )));
    }
    if !c.scope.contains(&letter.var) {
        return Err(illegal(format!(
            "variable {} is not in constraint {constraint}",
            letter.var
        )));
    }
    let mut rest: Vec<usize> = c.scope.iter().copied().filter(|&v| v != letter.var).collect();
    let mut given = perm.to_vec();
    rest.sort_unstable();
    given.sort_unstable();
    if rest != given {
        return Err(illegal(format!(
            "{perm:?} does not order the remaining variables of constraint {constraint}"
        )));
    }

    let mut letters = Vec::with_capacity(w.len() + c.arity());
    letters.extend_from_slice(&w.letters[..=idx]);
    letters.push(Letter::new(letter.var, constraint));
    letters.extend(perm.iter().map(|&v| Letter::new(v, constraint)));
    letters.extend_from_slice(&w.letters[idx + 1..]);
    let sign = if rhs == 1 { -w.sign } else { w.sign };
    Ok(Word::new(letters, sign))
}

/// Exchanges the letters at `pos` and `pos + 1`; they must share a context.
pub fn swap(w: &Word, pos: usize) -> Result<Word, ProverError> {
    let (a, b) = adjacent(w, pos)?;
    if a.ctx != b.ctx {
        return Err(illegal(format!("{a} and {b} are in different contexts")));
    }
    let mut out = w.clone();
    out.letters.swap(pos - 1, pos);
    Ok(out)
}

/// Deletes the equal-variable letters at `pos` and `pos + 1`. The flag is true
/// when their contexts differ.
pub fn cancel(w: &Word, pos: usize) -> Result<(Word, bool), ProverError> {
    let (a, b) = adjacent(w, pos)?;
    if a.var != b.var {
        return Err(illegal(format!("{a} and {b} are different variables")));
    }
    let mut out = w.clone();
    out.letters.drain(pos - 1..=pos);
    Ok((out, a.ctx != b.ctx))
}

fn adjacent(w: &Word, pos: usize) -> Result<(Letter, Letter), ProverError> {
    if pos == 0 || pos >= w.len() {
        return Err(illegal(format!(
            "positions {pos} and {} are not both inside a word of length {}",
            pos + 1,
            w.len()
        )));
    }
    Ok((w.letters[pos - 1], w.letters[pos]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::{builtin_instance, parse_instance};

    fn l(var: usize, ctx: usize) -> Letter {
        Letter::new(var, ctx)
    }

    #[test]
    fn relations() {
        let inst = builtin_instance("four-line").unwrap();
        let w = relation_of(&inst, 1).unwrap();
        assert_eq!(w, Word::new(vec![l(1, 1), l(2, 1), l(3, 1)], 1));
        let w = relation_of(&inst, 4).unwrap();
        assert_eq!(w, Word::new(vec![l(2, 4), l(4, 4), l(6, 4)], -1));
        let single = parse_instance("vars 1\nparity 1 = 0").unwrap();
        assert_eq!(relation_of(&single, 1).unwrap(), Word::new(vec![l(1, 1)], 1));
    }

    #[test]
    fn general_constraints_rejected() {
        let inst = parse_instance("vars 2\ngeneral 1 2 : 01").unwrap();
        assert_eq!(relation_of(&inst, 1), Err(ProverError::NotParity(1)));
        assert_eq!(relation_of(&inst, 2), Err(ProverError::NoSuchConstraint(2)));
    }

    #[test]
    fn four_line_substitution_chain() {
        let inst = builtin_instance("four-line").unwrap();
        let w = relation_of(&inst, 1).unwrap();
        let w = substitute(&inst, &w, 3, 2, &[4, 5]).unwrap();
        assert_eq!(
            w,
            Word::new(vec![l(1, 1), l(2, 1), l(3, 1), l(3, 2), l(4, 2), l(5, 2)], 1)
        );
        let w = substitute(&inst, &w, 5, 4, &[2, 6]).unwrap();
        assert_eq!(w.sign, -1);
        assert_eq!(&w.letters[4..8], &[l(4, 2), l(4, 4), l(2, 4), l(6, 4)]);
    }

    #[test]
    fn substitution_legality() {
        let inst = builtin_instance("four-line").unwrap();
        let w = relation_of(&inst, 1).unwrap();
        // own context
        assert!(substitute(&inst, &w, 3, 1, &[1, 2]).is_err());
        // variable 3 is not in constraint 4
        assert!(substitute(&inst, &w, 3, 4, &[2, 6]).is_err());
        // wrong permutation
        assert!(substitute(&inst, &w, 3, 2, &[4]).is_err());
        assert!(substitute(&inst, &w, 3, 2, &[4, 6]).is_err());
        assert!(substitute(&inst, &w, 4, 2, &[4, 5]).is_err());
        // any order of the remaining scope is fine
        assert!(substitute(&inst, &w, 3, 2, &[5, 4]).is_ok());
    }

    #[test]
    fn swaps() {
        let w = Word::new(vec![l(4, 2), l(5, 2)], 1);
        assert_eq!(swap(&w, 1).unwrap().letters, vec![l(5, 2), l(4, 2)]);
        let w = Word::new(vec![l(3, 1), l(3, 2)], 1);
        assert!(swap(&w, 1).is_err());
        let w = Word::new(vec![l(1, 3), l(2, 3), l(4, 3)], -1);
        assert_eq!(swap(&w, 2).unwrap().letters, vec![l(1, 3), l(4, 3), l(2, 3)]);
        assert!(swap(&w, 3).is_err());
    }

    #[test]
    fn cancels() {
        let w = Word::new(vec![l(2, 1), l(2, 4)], -1);
        let (out, cross) = cancel(&w, 1).unwrap();
        assert!(out.is_contradiction() && cross);
        let w = Word::new(vec![l(4, 2), l(4, 2)], 1);
        assert!(!cancel(&w, 1).unwrap().1);
        let w = Word::new(vec![l(1, 1), l(2, 1), l(1, 2)], 1);
        assert!(cancel(&w, 1).is_err());
        assert!(cancel(&w, 0).is_err());
    }
}
