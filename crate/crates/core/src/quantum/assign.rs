use std::collections::BTreeMap;

use num_traits::ToPrimitive;

use super::{is_binary_observable, ComplexMatrix, QuantumError, MAX_DIM};
use crate::bcs::{constraint_polynomial, BcsInstance, MultilinearPoly};

/// Non-contextual operator assignment: one observable per variable.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservableAssignment {
    dim: usize,
    observables: BTreeMap<usize, ComplexMatrix>,
}

impl ObservableAssignment {
    pub fn new(dim: usize, observables: BTreeMap<usize, ComplexMatrix>) -> Result<Self, QuantumError> {
        if dim == 0 || dim > MAX_DIM {
            return Err(QuantumError::BadDimension(dim));
        }
        for m in observables.values() {
            if !m.is_square() || m.dim() != dim {
                return Err(QuantumError::DimensionMismatch {
                    expected: dim,
                    found: m.0.nrows().max(m.0.ncols()),
                });
            }
        }
        Ok(ObservableAssignment { dim, observables })
    }

    /// Signed Pauli strings keyed by variable, all on `qubits` qubits.
    pub fn from_paulis(qubits: usize, specs: &[(usize, &str)]) -> Result<Self, QuantumError> {
        let observables = specs
            .iter()
            .map(|&(v, s)| Ok((v, super::parse_pauli(s, qubits)?)))
            .collect::<Result<_, QuantumError>>()?;
        Self::new(1 << qubits, observables)
    }

    /// One-dimensional assignment `A_t = (-1)^{v_t}`.
    pub fn from_classical(bits: &crate::bcs::Assignment) -> Self {
        let observables = (1..=bits.len())
            .map(|t| {
                let sign = if bits.get(t) == 1 { -1.0 } else { 1.0 };
                (t, ComplexMatrix::from_diagonal(&[sign]))
            })
            .collect();
        ObservableAssignment { dim: 1, observables }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, t: usize) -> Option<&ComplexMatrix> {
        self.observables.get(&t)
    }

    pub fn observables(&self) -> &BTreeMap<usize, ComplexMatrix> {
        &self.observables
    }
}

/// Worst residual for each condition of a quantum satisfying assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct QsaReport {
    pub pass: bool,
    /// max `||A_t^2 - I||`
    pub square_residual: f64,
    /// max `||A_t - A_t^dagger||`
    pub hermitian_residual: f64,
    /// max `||[A_i, A_j]||` over pairs sharing a constraint
    pub commutator_residual: f64,
    /// max `||c_s(A) + I||`
    pub constraint_residual: f64,
    pub tolerance: f64,
    /// First constraint (1-based) with the worst constraint residual.
    pub worst_constraint: Option<usize>,
}

impl QsaReport {
    pub fn max_residual(&self) -> f64 {
        self.square_residual
            .max(self.hermitian_residual)
            .max(self.commutator_residual)
            .max(self.constraint_residual)
    }
}

fn polynomial_unchecked(p: &MultilinearPoly, ops: &[&ComplexMatrix], dim: usize) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(dim);
    for (&mask, coeff) in &p.coeffs {
        let c = coeff.to_f64().expect("finite rational");
        let mut term = ComplexMatrix::identity(dim);
        for (j, op) in ops.iter().enumerate() {
            if mask >> j & 1 == 1 {
                term = &term * op;
            }
        }
        acc = &acc + &term.scale(c);
    }
    acc
}

/// Evaluates a constraint polynomial on operators, after checking that they
/// pairwise commute. Monomials multiply in scope order.
pub fn apply_polynomial(p: &MultilinearPoly, ops: &[ComplexMatrix], tol: f64) -> Result<ComplexMatrix, QuantumError> {
    if ops.len() != p.scope.len() {
        return Err(QuantumError::DimensionMismatch {
            expected: p.scope.len(),
            found: ops.len(),
        });
    }
    let dim = ops.first().map(ComplexMatrix::dim).unwrap_or(1);
    for op in ops {
        if !op.is_square() || op.dim() != dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
    }
    for i in 0..ops.len() {
        for j in i + 1..ops.len() {
            let norm = ops[i].commutator(&ops[j]).spectral_norm();
            if norm > tol {
                return Err(QuantumError::NonCommuting {
                    what: format!("operators for V{} and V{}", p.scope[i], p.scope[j]),
                    norm,
                });
            }
        }
    }
    let refs: Vec<&ComplexMatrix> = ops.iter().collect();
    Ok(polynomial_unchecked(p, &refs, dim))
}

/// Checks binary observables, same-constraint commutation and `c_s(A) = -I`.
pub fn verify_qsa(inst: &BcsInstance, assign: &ObservableAssignment, tol: f64) -> Result<QsaReport, QuantumError> {
    let dim = assign.dim();
    let mut report = QsaReport {
        pass: false,
        square_residual: 0.0,
        hermitian_residual: 0.0,
        commutator_residual: 0.0,
        constraint_residual: 0.0,
        tolerance: tol,
        worst_constraint: None,
    };

    let mut used: Vec<usize> = inst
        .constraints()
        .iter()
        .flat_map(|c| c.scope.iter().copied())
        .collect();
    used.sort_unstable();
    used.dedup();
    for &t in &used {
        let a = assign.get(t).ok_or(QuantumError::MissingVariable(t))?;
        let check = is_binary_observable(a, tol);
        report.square_residual = report.square_residual.max(check.square_residual);
        report.hermitian_residual = report.hermitian_residual.max(check.hermitian_residual);
    }

    for (i, c) in inst.constraints().iter().enumerate() {
        let ops: Vec<&ComplexMatrix> = c.scope.iter().map(|t| &assign.observables[t]).collect();
        for a in 0..ops.len() {
            for b in a + 1..ops.len() {
                let norm = ops[a].commutator(ops[b]).spectral_norm();
                report.commutator_residual = report.commutator_residual.max(norm);
            }
        }
        let value = polynomial_unchecked(&constraint_polynomial(c), &ops, dim);
        let residual = (&value + &ComplexMatrix::identity(dim)).spectral_norm();
        if residual > report.constraint_residual || report.worst_constraint.is_none() {
            report.constraint_residual = report.constraint_residual.max(residual);
            report.worst_constraint = Some(i + 1);
        }
    }
    report.pass = report.max_residual() <= tol;
    Ok(report)
}
