use std::collections::BTreeMap;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};

use super::{Constraint, ConstraintKind};

/// Multilinear polynomial in the `±1` variables `V_i = (-1)^{v_i}` of a scope.
///
/// Monomials are keyed by a bit mask over scope positions (bit `j` is the
/// `j`-th scope variable). Only nonzero coefficients are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultilinearPoly {
    pub scope: Vec<usize>,
    pub coeffs: BTreeMap<u32, Ratio<i64>>,
}

impl MultilinearPoly {
    /// Evaluates at a point given as one `±1` value per scope position.
    pub fn eval_signs(&self, signs: &[i8]) -> Ratio<i64> {
        self.coeffs
            .iter()
            .map(|(&mask, &c)| {
                let prod: i64 = (0..self.scope.len())
                    .filter(|j| mask >> j & 1 == 1)
                    .map(|j| signs[j] as i64)
                    .product();
                c * prod
            })
            .fold(Ratio::zero(), |a, b| a + b)
    }

    pub fn neg(&self) -> Self {
        MultilinearPoly {
            scope: self.scope.clone(),
            coeffs: self.coeffs.iter().map(|(&m, &c)| (m, -c)).collect(),
        }
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        // higher-degree monomials first, constant last
        let mut terms: Vec<_> = self.coeffs.iter().collect();
        terms.sort_by_key(|(m, _)| (std::cmp::Reverse(m.count_ones()), **m));
        for (i, (&mask, c)) in terms.into_iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let vars: String = (0..self.scope.len())
                .filter(|j| mask >> j & 1 == 1)
                .map(|j| format!("V{}", self.scope[j]))
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{vars}")?;
            } else {
                write!(f, "{mag}*{vars}")?;
            }
        }
        Ok(())
    }
}

/// Fourier expansion of a constraint, normalised so that the polynomial is
/// `-1` on satisfying points and `+1` elsewhere.
pub fn constraint_polynomial(c: &Constraint) -> MultilinearPoly {
    let r = c.arity();
    let mut coeffs = BTreeMap::new();
    match &c.kind {
        ConstraintKind::Parity { rhs } => {
            let full = (1u32 << r) - 1;
            let sign = if *rhs == 0 { -1 } else { 1 };
            coeffs.insert(full, Ratio::from_integer(sign));
        }
        ConstraintKind::General { .. } => {
            // table[x] = 1 - 2 f(x), x indexed by position mask
            let size = 1usize << r;
            let mut table: Vec<i64> = (0..size)
                .map(|x| {
                    let code = (0..r).fold(0u32, |acc, j| (acc << 1) | ((x >> j) & 1) as u32);
                    if c.accepts(code) {
                        -1
                    } else {
                        1
                    }
                })
                .collect();
            // in-place Walsh-Hadamard transform
            let mut h = 1;
            while h < size {
                for block in (0..size).step_by(2 * h) {
                    for i in block..block + h {
                        let (a, b) = (table[i], table[i + h]);
                        table[i] = a + b;
                        table[i + h] = a - b;
                    }
                }
                h *= 2;
            }
            let denom = size as i64;
            for (mask, &sum) in table.iter().enumerate() {
                if sum != 0 {
                    coeffs.insert(mask as u32, Ratio::new(sum, denom));
                }
            }
        }
    }
    MultilinearPoly {
        scope: c.scope.clone(),
        coeffs,
    }
}
