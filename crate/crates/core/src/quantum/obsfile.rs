//! Text format for operator assignments and strategies.
//!
//! ```text
//! qubits 2                 # or: dim <d>
//! obs 1 ZI                 # default observable for v1
//! obs 3@2 -XX              # v3 when asked constraint 2
//! bob 1 matrix             # explicit d x d matrix follows
//! 1 0 0 0
//! ...
//! ```
//! Matrix entries are `a`, `a+bi` or `a-bi` (also `bi`, `i`, `-i`).

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{parse_pauli, ComplexMatrix, ObservableAssignment, QuantumError, QuantumStrategy, MAX_DIM};

#[derive(Debug, Clone, PartialEq)]
pub struct ObservableFile {
    pub dim: usize,
    pub alice: BTreeMap<usize, ComplexMatrix>,
    /// Keyed by `(constraint, variable)`.
    pub contextual: BTreeMap<(usize, usize), ComplexMatrix>,
    pub bob: BTreeMap<usize, ComplexMatrix>,
}

fn syntax(line: usize, msg: impl Into<String>) -> QuantumError {
    QuantumError::Syntax { line, msg: msg.into() }
}

fn parse_real(s: &str) -> Option<f64> {
    match s {
        "" | "+" => Some(1.0),
        "-" => Some(-1.0),
        _ => s.parse().ok(),
    }
}

pub(crate) fn parse_complex(tok: &str) -> Option<Complex64> {
    let Some(body) = tok.strip_suffix('i') else {
        return tok.parse().ok().map(|re| Complex64::new(re, 0.0));
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| matches!(bytes[k], b'+' | b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    match split {
        Some(k) => {
            let re: f64 = body[..k].parse().ok()?;
            Some(Complex64::new(re, parse_real(&body[k..])?))
        }
        None => Some(Complex64::new(0.0, parse_real(body)?)),
    }
}

enum Target {
    Alice(usize),
    Context(usize, usize),
    Bob(usize),
}

pub fn parse_observable_file(text: &str) -> Result<ObservableFile, QuantumError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (line, header) = lines.next().ok_or_else(|| syntax(1, "empty observable file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (dim, qubits) = match tokens.as_slice() {
        ["qubits", q] => {
            let q: usize = q.parse().map_err(|_| syntax(line, format!("bad qubit count `{q}`")))?;
            if q == 0 || q > 6 {
                return Err(syntax(line, format!("{q} qubits is outside 1..=6")));
            }
            (1usize << q, Some(q))
        }
        ["dim", d] => {
            let d: usize = d.parse().map_err(|_| syntax(line, format!("bad dimension `{d}`")))?;
            if d == 0 || d > MAX_DIM {
                return Err(syntax(line, format!("dimension {d} is outside 1..={MAX_DIM}")));
            }
            let q = d
                .is_power_of_two()
                .then(|| d.trailing_zeros() as usize)
                .filter(|&q| q > 0);
            (d, q)
        }
        _ => return Err(syntax(line, "expected `qubits <q>` or `dim <d>`")),
    };

    let mut file = ObservableFile {
        dim,
        alice: BTreeMap::new(),
        contextual: BTreeMap::new(),
        bob: BTreeMap::new(),
    };

    while let Some((line, content)) = lines.next() {
        let tokens: Vec<&str> = content.split_whitespace().collect();
        if tokens.len() != 3 {
            return Err(syntax(line, "expected `obs|bob <var>[@<constraint>] <pauli>|matrix`"));
        }
        let parse_index = |s: &str| -> Result<usize, QuantumError> {
            s.parse::<usize>()
                .ok()
                .filter(|&v| v > 0)
                .ok_or_else(|| syntax(line, format!("bad index `{s}`")))
        };
        let target = match (tokens[0], tokens[1].split_once('@')) {
            ("obs", None) => Target::Alice(parse_index(tokens[1])?),
            ("obs", Some((v, s))) => Target::Context(parse_index(s)?, parse_index(v)?),
            ("bob", None) => Target::Bob(parse_index(tokens[1])?),
            ("bob", Some(_)) => return Err(syntax(line, "Bob's observables are not contextual")),
            (other, _) => return Err(syntax(line, format!("unknown directive `{other}`"))),
        };
        let matrix = if tokens[2] == "matrix" {
            let mut entries = Vec::with_capacity(dim * dim);
            for _ in 0..dim {
                let (row_line, row) = lines
                    .next()
                    .ok_or_else(|| syntax(line, format!("matrix needs {dim} rows")))?;
                let row: Vec<&str> = row.split_whitespace().collect();
                if row.len() != dim {
                    return Err(syntax(row_line, format!("expected {dim} entries, found {}", row.len())));
                }
                for tok in row {
                    entries.push(parse_complex(tok).ok_or_else(|| syntax(row_line, format!("bad entry `{tok}`")))?);
                }
            }
            ComplexMatrix(DMatrix::from_row_slice(dim, dim, &entries))
        } else {
            let q = qubits
                .ok_or_else(|| syntax(line, format!("Pauli strings need a power-of-two dimension, not {dim}")))?;
            parse_pauli(tokens[2], q).map_err(|e| syntax(line, e.to_string()))?
        };
        let duplicate = match target {
            Target::Alice(t) => file.alice.insert(t, matrix).is_some(),
            Target::Context(s, t) => file.contextual.insert((s, t), matrix).is_some(),
            Target::Bob(t) => file.bob.insert(t, matrix).is_some(),
        };
        if duplicate {
            return Err(syntax(line, "observable defined twice"));
        }
    }
    Ok(file)
}

impl ObservableFile {
    /// The non-contextual assignment `obs <var>` lines describe.
    pub fn to_assignment(&self) -> Result<ObservableAssignment, QuantumError> {
        if !self.contextual.is_empty() {
            return Err(QuantumError::QsaFailed(
                "contextual observables do not define a single assignment".into(),
            ));
        }
        ObservableAssignment::new(self.dim, self.alice.clone())
    }

    /// The strategy described by the file. Variables without a `bob` line use
    /// the transpose of Alice's default observable.
    pub fn to_strategy(&self) -> Result<QuantumStrategy, QuantumError> {
        let mut bob = self.bob.clone();
        for (&t, a) in &self.alice {
            bob.entry(t).or_insert_with(|| a.transpose());
        }
        QuantumStrategy::new(self.dim, self.alice.clone(), self.contextual.clone(), bob)
    }
}
