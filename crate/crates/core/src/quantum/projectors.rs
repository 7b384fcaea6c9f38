use super::{require_binary, ComplexMatrix, QuantumError};

/// Joint eigenprojectors of commuting binary observables `A_1..A_r`:
/// `Pi_a = prod_j (I + (-1)^{a_j} A_j) / 2`.
///
/// The result is indexed by the outcome code `a`, with `A_1`'s bit most
/// significant (the same convention as constraint answer codes).
pub fn joint_projectors(observables: &[ComplexMatrix], tol: f64) -> Result<Vec<ComplexMatrix>, QuantumError> {
    let r = observables.len();
    if r == 0 {
        return Err(QuantumError::ProjectorAxioms("no observables".into()));
    }
    if r > 16 {
        return Err(QuantumError::ProjectorAxioms(format!("{r} observables is too many")));
    }
    let d = observables[0].dim();
    for (j, a) in observables.iter().enumerate() {
        if a.dim() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: a.dim(),
            });
        }
        require_binary(a, tol, format!("observable {}", j + 1))?;
    }
    for i in 0..r {
        for j in i + 1..r {
            let norm = observables[i].commutator(&observables[j]).spectral_norm();
            if norm > tol {
                return Err(QuantumError::NonCommuting {
                    what: format!("observables {} and {}", i + 1, j + 1),
                    norm,
                });
            }
        }
    }
    let id = ComplexMatrix::identity(d);
    let halves: Vec<[ComplexMatrix; 2]> = observables
        .iter()
        .map(|a| [(&id + a).scale(0.5), (&id - a).scale(0.5)])
        .collect();
    Ok((0..1u32 << r)
        .map(|code| {
            (0..r).fold(id.clone(), |acc, j| {
                let bit = ((code >> (r - 1 - j)) & 1) as usize;
                &acc * &halves[j][bit]
            })
        })
        .collect())
}

/// Checks that a family is Hermitian, idempotent, pairwise orthogonal and
/// resolves the identity.
pub(crate) fn check_projector_family(projectors: &[ComplexMatrix], tol: f64) -> Result<(), QuantumError> {
    let d = projectors[0].dim();
    let mut sum = ComplexMatrix::zeros(d);
    for (i, p) in projectors.iter().enumerate() {
        if p.dim() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: p.dim(),
            });
        }
        let herm = (p - &p.adjoint()).spectral_norm();
        let idem = (&(p * p) - p).spectral_norm();
        if herm > tol || idem > tol {
            return Err(QuantumError::ProjectorAxioms(format!(
                "element {i} is not an orthogonal projector (hermiticity {herm:.3e}, idempotence {idem:.3e})"
            )));
        }
        for (j, q) in projectors.iter().enumerate().skip(i + 1) {
            let overlap = (p * q).spectral_norm();
            if overlap > tol {
                return Err(QuantumError::ProjectorAxioms(format!(
                    "elements {i} and {j} overlap ({overlap:.3e})"
                )));
            }
        }
        sum = &sum + p;
    }
    let completeness = (&sum - &ComplexMatrix::identity(d)).spectral_norm();
    if completeness > tol {
        return Err(QuantumError::ProjectorAxioms(format!(
            "projectors sum to I only within {completeness:.3e}"
        )));
    }
    Ok(())
}

/// Binary observable for output bit `j` (0-based, most significant first) of a
/// projective measurement with `2^r` outcomes: `sum_a (-1)^{a_j} Pi_a`.
pub fn observables_from_projectors(
    projectors: &[ComplexMatrix],
    j: usize,
    tol: f64,
) -> Result<ComplexMatrix, QuantumError> {
    let count = projectors.len();
    if count < 2 || !count.is_power_of_two() {
        return Err(QuantumError::ProjectorAxioms(format!(
            "{count} outcomes is not a power of two"
        )));
    }
    let r = count.trailing_zeros() as usize;
    if j >= r {
        return Err(QuantumError::ProjectorAxioms(format!(
            "bit {j} out of range for {r}-bit outcomes"
        )));
    }
    check_projector_family(projectors, tol)?;
    let d = projectors[0].dim();
    Ok(projectors
        .iter()
        .enumerate()
        .fold(ComplexMatrix::zeros(d), |acc, (code, p)| {
            if (code >> (r - 1 - j)) & 1 == 1 {
                &acc - p
            } else {
                &acc + p
            }
        }))
}
