use std::collections::BTreeMap;

use rayon::prelude::*;

use super::projectors::joint_projectors;
use super::{correlation, require_binary, verify_qsa, ComplexMatrix, ObservableAssignment, QuantumError, MAX_DIM};
use crate::bcs::{answer_bit, BcsInstance};
use crate::game::{question_distribution, GameValueReport, Question};

/// Observable strategy on the maximally entangled state of dimension `d`.
///
/// Alice measures `A_{t,s}` for variable `t` when asked constraint `s`. A
/// context-specific entry takes precedence over the default `A_t`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumStrategy {
    dim: usize,
    alice_default: BTreeMap<usize, ComplexMatrix>,
    alice_context: BTreeMap<(usize, usize), ComplexMatrix>,
    bob: BTreeMap<usize, ComplexMatrix>,
}

impl QuantumStrategy {
    /// `alice_context` is keyed by `(constraint, variable)`.
    pub fn new(
        dim: usize,
        alice_default: BTreeMap<usize, ComplexMatrix>,
        alice_context: BTreeMap<(usize, usize), ComplexMatrix>,
        bob: BTreeMap<usize, ComplexMatrix>,
    ) -> Result<Self, QuantumError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(QuantumError::BadDimension(dim));
        }
        for m in alice_default.values().chain(alice_context.values()).chain(bob.values()) {
            if !m.is_square() || m.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: m.0.nrows().max(m.0.ncols()),
                });
            }
        }
        Ok(QuantumStrategy {
            dim,
            alice_default,
            alice_context,
            bob,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alice(&self, s: usize, t: usize) -> Option<&ComplexMatrix> {
        self.alice_context.get(&(s, t)).or_else(|| self.alice_default.get(&t))
    }

    pub fn bob(&self, t: usize) -> Option<&ComplexMatrix> {
        self.bob.get(&t)
    }

    pub fn is_contextual(&self) -> bool {
        !self.alice_context.is_empty()
    }
}

/// Alice uses the assignment directly, Bob uses transposes in the
/// computational basis.
pub fn build_perfect_strategy(
    inst: &BcsInstance,
    qsa: &ObservableAssignment,
    tol: f64,
) -> Result<QuantumStrategy, QuantumError> {
    let report = verify_qsa(inst, qsa, tol)?;
    if !report.pass {
        return Err(QuantumError::QsaFailed(format!(
            "worst residual {:.3e} exceeds tolerance {tol:.1e}",
            report.max_residual()
        )));
    }
    let alice = qsa.observables().clone();
    let bob = alice.iter().map(|(&t, a)| (t, a.transpose())).collect();
    QuantumStrategy::new(qsa.dim(), alice, BTreeMap::new(), bob)
}

fn clamp_probability(p: f64, tol: f64, what: impl FnOnce() -> String) -> Result<f64, QuantumError> {
    if !(-tol..=1.0 + tol).contains(&p) || !p.is_finite() {
        return Err(QuantumError::OutOfRange { what: what(), value: p });
    }
    Ok(p.clamp(0.0, 1.0))
}

/// Exact success probabilities of an observable strategy.
///
/// For question `(s, t)` Alice's outcome `a` comes from the joint
/// eigenprojectors of her context-`s` observables and Bob's bit from
/// `(I +/- B_t)/2`; the round is won when `a` satisfies `c_s` and Bob's bit
/// equals `a`'s bit for `t`.
pub fn quantum_game_value(
    inst: &BcsInstance,
    strat: &QuantumStrategy,
    tol: f64,
) -> Result<GameValueReport<f64>, QuantumError> {
    let d = strat.dim();
    let id = ComplexMatrix::identity(d);
    let dist = question_distribution(inst);

    let mut bob_projectors = BTreeMap::new();
    for c in inst.constraints() {
        for &t in &c.scope {
            if bob_projectors.contains_key(&t) {
                continue;
            }
            let b = strat.bob(t).ok_or(QuantumError::MissingVariable(t))?;
            require_binary(b, tol, format!("Bob's observable for v{t}"))?;
            bob_projectors.insert(t, [(&id + b).scale(0.5), (&id - b).scale(0.5)]);
        }
    }

    let per_constraint: Vec<Vec<(Question, f64)>> = inst
        .constraints()
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let s = i + 1;
            let r = c.arity();
            let ops = c
                .scope
                .iter()
                .map(|&t| strat.alice(s, t).cloned().ok_or(QuantumError::MissingVariable(t)))
                .collect::<Result<Vec<_>, _>>()?;
            let projectors = joint_projectors(&ops, tol)?;
            // per scope position: sum of satisfying Pi_a split by Alice's bit
            let mut by_bit = vec![[ComplexMatrix::zeros(d), ComplexMatrix::zeros(d)]; r];
            for (code, pi) in projectors.iter().enumerate() {
                if !c.accepts(code as u32) {
                    continue;
                }
                for (j, slot) in by_bit.iter_mut().enumerate() {
                    let bit = answer_bit(code as u32, r, j) as usize;
                    slot[bit] = &slot[bit] + pi;
                }
            }
            c.scope
                .iter()
                .enumerate()
                .map(|(j, &t)| {
                    let q = &bob_projectors[&t];
                    let raw = correlation(&by_bit[j][0], &q[0])? + correlation(&by_bit[j][1], &q[1])?;
                    let what = || format!("question (s={s}, t={t})");
                    if raw.im.abs() > tol {
                        return Err(QuantumError::OutOfRange {
                            what: what(),
                            value: raw.im,
                        });
                    }
                    Ok((Question { s, t }, clamp_probability(raw.re, tol, what)?))
                })
                .collect()
        })
        .collect::<Result<_, QuantumError>>()?;

    let per_question: Vec<(Question, f64)> = per_constraint.into_iter().flatten().collect();
    let overall: f64 = per_question
        .iter()
        .zip(&dist.entries)
        .map(|((q, p), (dq, w))| {
            debug_assert_eq!(q, dq);
            p * (*w.numer() as f64 / *w.denom() as f64)
        })
        .sum();
    Ok(GameValueReport {
        per_question,
        overall: overall.clamp(0.0, 1.0),
        witness: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bcs::{builtin_instance, gf2_solve, parse_instance};
    use crate::quantum::{parse_pauli, DEFAULT_TOL};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn magic_square_perfect_strategy() {
        let inst = builtin_instance("magic-square").unwrap();
        let qsa = ObservableAssignment::from_paulis(
            2,
            &[
                (1, "ZI"),
                (2, "IZ"),
                (3, "ZZ"),
                (4, "IX"),
                (5, "XI"),
                (6, "XX"),
                (7, "ZX"),
                (8, "XZ"),
                (9, "YY"),
            ],
        )
        .unwrap();
        let strat = build_perfect_strategy(&inst, &qsa, DEFAULT_TOL).unwrap();
        assert_eq!(strat.dim(), 4);
        let rep = quantum_game_value(&inst, &strat, DEFAULT_TOL).unwrap();
        assert!(rep.per_question.iter().all(|(_, p)| (p - 1.0).abs() < 1e-10));
        assert!((rep.overall - 1.0).abs() < 1e-10);
    }

    #[test]
    fn scalar_strategy_from_solution() {
        let inst = parse_instance("vars 3\nparity 1 2 = 1\nparity 2 3 = 0").unwrap();
        let sol = gf2_solve(&inst).unwrap().unwrap();
        let strat = build_perfect_strategy(&inst, &ObservableAssignment::from_classical(&sol), DEFAULT_TOL).unwrap();
        assert_eq!(strat.dim(), 1);
        let rep = quantum_game_value(&inst, &strat, DEFAULT_TOL).unwrap();
        assert!((rep.overall - 1.0).abs() < 1e-12);
    }

    #[test]
    fn perfect_strategy_requires_qsa() {
        let inst = builtin_instance("chsh").unwrap();
        let qsa = ObservableAssignment::from_paulis(1, &[(1, "Z"), (2, "Z")]).unwrap();
        assert!(matches!(
            build_perfect_strategy(&inst, &qsa, DEFAULT_TOL),
            Err(QuantumError::QsaFailed(_))
        ));
    }

    #[test]
    fn chsh_contextual_strategy() {
        let inst = builtin_instance("chsh").unwrap();
        let z = parse_pauli("Z", 1).unwrap();
        let x = parse_pauli("X", 1).unwrap();
        let alice = [
            ((1, 1), z.clone()),
            ((1, 2), z.clone()),
            ((2, 1), x.clone()),
            ((2, 2), -&x),
        ]
        .into_iter()
        .collect();
        let bob = [(1, (&z + &x).scale(FRAC_1_SQRT_2)), (2, (&z - &x).scale(FRAC_1_SQRT_2))]
            .into_iter()
            .collect();
        let strat = QuantumStrategy::new(2, BTreeMap::new(), alice, bob).unwrap();
        let rep = quantum_game_value(&inst, &strat, DEFAULT_TOL).unwrap();
        let expect = (2.0 + 2f64.sqrt()) / 4.0;
        assert!((rep.overall - expect).abs() < 1e-12);
        assert!(rep.per_question.iter().all(|(_, p)| (p - expect).abs() < 1e-12));
    }

    #[test]
    fn rejects_non_commuting_context() {
        let inst = builtin_instance("chsh").unwrap();
        let z = parse_pauli("Z", 1).unwrap();
        let x = parse_pauli("X", 1).unwrap();
        let alice = [(1, z.clone()), (2, x.clone())].into_iter().collect();
        let bob = [(1, z), (2, x)].into_iter().collect();
        let strat = QuantumStrategy::new(2, alice, BTreeMap::new(), bob).unwrap();
        assert!(matches!(
            quantum_game_value(&inst, &strat, DEFAULT_TOL),
            Err(QuantumError::NonCommuting { .. })
        ));
    }
}
