use num_complex::Complex64;

use super::{ComplexMatrix, QuantumError, MAX_DIM};

fn pauli_factor(c: char) -> Option<ComplexMatrix> {
    let (o, l, i) = (
        Complex64::new(0.0, 0.0),
        Complex64::new(1.0, 0.0),
        Complex64::new(0.0, 1.0),
    );
    let m = match c {
        'I' => [[l, o], [o, l]],
        'X' => [[o, l], [l, o]],
        'Y' => [[o, -i], [i, o]],
        'Z' => [[l, o], [o, -l]],
        _ => return None,
    };
    Some(ComplexMatrix(nalgebra::DMatrix::from_fn(2, 2, |r, c| m[r][c])))
}

/// Parses a signed Pauli string such as `-XZI`. The leftmost character is the
/// first tensor factor (most significant qubit).
pub fn parse_pauli(spec: &str, qubits: usize) -> Result<ComplexMatrix, QuantumError> {
    let bad = |msg: String| QuantumError::BadPauli {
        spec: spec.to_string(),
        msg,
    };
    let (negate, body) = match spec.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, spec.strip_prefix('+').unwrap_or(spec)),
    };
    if body.chars().count() != qubits {
        return Err(bad(format!(
            "expected {qubits} factors, found {}",
            body.chars().count()
        )));
    }
    if qubits == 0 || (1usize << qubits.min(63)) > MAX_DIM {
        return Err(bad(format!("{qubits} qubits is outside the supported range")));
    }
    let mut out = ComplexMatrix::identity(1);
    for c in body.chars() {
        let f = pauli_factor(c).ok_or_else(|| bad(format!("`{c}` is not one of I, X, Y, Z")))?;
        out = out.kron(&f);
    }
    Ok(if negate { -&out } else { out })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z_tensor_i_is_diagonal() {
        let m = parse_pauli("ZI", 2).unwrap();
        assert_eq!(m, ComplexMatrix::from_diagonal(&[1.0, 1.0, -1.0, -1.0]));
        assert_eq!(parse_pauli("II", 2).unwrap(), ComplexMatrix::identity(4));
    }

    #[test]
    fn minus_yy_equals_zz_times_xx() {
        let lhs = parse_pauli("-YY", 2).unwrap();
        let rhs = &parse_pauli("ZZ", 2).unwrap() * &parse_pauli("XX", 2).unwrap();
        assert!((&lhs - &rhs).spectral_norm() < 1e-15);
    }

    #[test]
    fn rejects_malformed() {
        assert!(matches!(parse_pauli("ZA", 2), Err(QuantumError::BadPauli { .. })));
        assert!(matches!(parse_pauli("ZZZ", 2), Err(QuantumError::BadPauli { .. })));
        assert!(parse_pauli("", 0).is_err());
        assert!(parse_pauli("IIIIIII", 7).is_err());
    }
}
