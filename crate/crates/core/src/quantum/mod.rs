//! Finite-dimensional operator algebra for quantum strategies.
//!
//! The shared state is always the maximally entangled state
//! `|psi> = d^{-1/2} sum_j |j>|j>`. It is never built as a vector: for `M` on
//! Alice's side and `N` on Bob's, `<psi| M (x) N |psi> = tr(M N^T) / d`.

mod assign;
mod obsfile;
mod pauli;
mod projectors;
mod strategy;

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

pub use assign::{apply_polynomial, verify_qsa, ObservableAssignment, QsaReport};
pub use obsfile::{parse_observable_file, ObservableFile};
pub use pauli::parse_pauli;
pub use projectors::{joint_projectors, observables_from_projectors};
pub use strategy::{build_perfect_strategy, quantum_game_value, QuantumStrategy};

/// Default spectral-norm tolerance for operator identities.
pub const DEFAULT_TOL: f64 = 1e-9;
/// Largest supported Hilbert-space dimension.
pub const MAX_DIM: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("dimension {0} is outside 1..={MAX_DIM}")]
    BadDimension(usize),
    #[error("bad Pauli string `{spec}`: {msg}")]
    BadPauli { spec: String, msg: String },
    #[error("{what} is not a binary observable (hermiticity {hermitian:.3e}, square {square:.3e})")]
    NotBinary { what: String, hermitian: f64, square: f64 },
    #[error("{what} do not commute (commutator norm {norm:.3e})")]
    NonCommuting { what: String, norm: f64 },
    #[error("no observable for variable {0}")]
    MissingVariable(usize),
    #[error("projector family invalid: {0}")]
    ProjectorAxioms(String),
    #[error("not a two-outcome POVM: {0}")]
    NotPovm(String),
    #[error("probability {value} for {what} is outside [0, 1] beyond tolerance")]
    OutOfRange { what: String, value: f64 },
    #[error("quantum satisfying assignment check failed: {0}")]
    QsaFailed(String),
    #[error("observable file line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Dense square complex matrix.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix(pub DMatrix<Complex64>);

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ComplexMatrix{}", self.0)
    }
}

impl ComplexMatrix {
    pub fn identity(d: usize) -> Self {
        ComplexMatrix(DMatrix::identity(d, d))
    }

    pub fn zeros(d: usize) -> Self {
        ComplexMatrix(DMatrix::zeros(d, d))
    }

    /// Real matrix from row-major entries.
    pub fn from_real_rows(rows: &[&[f64]]) -> Self {
        let d = rows.len();
        ComplexMatrix(DMatrix::from_fn(d, d, |i, j| Complex64::new(rows[i][j], 0.0)))
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let d = diag.len();
        ComplexMatrix(DMatrix::from_fn(d, d, |i, j| {
            Complex64::new(if i == j { diag[i] } else { 0.0 }, 0.0)
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn is_square(&self) -> bool {
        self.0.nrows() == self.0.ncols()
    }

    pub fn scale(&self, c: f64) -> Self {
        ComplexMatrix(self.0.map(|z| z * c))
    }

    pub fn scale_complex(&self, c: Complex64) -> Self {
        ComplexMatrix(self.0.map(|z| z * c))
    }

    pub fn transpose(&self) -> Self {
        ComplexMatrix(self.0.transpose())
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix(self.0.adjoint())
    }

    pub fn kron(&self, other: &Self) -> Self {
        ComplexMatrix(self.0.kronecker(&other.0))
    }

    pub fn commutator(&self, other: &Self) -> Self {
        &(self * other) - &(other * self)
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    /// Largest singular value.
    pub fn spectral_norm(&self) -> f64 {
        if self.0.is_empty() {
            return 0.0;
        }
        self.0
            .clone()
            .svd(false, false)
            .singular_values
            .iter()
            .fold(0.0f64, |a, &b| a.max(b))
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let herm = (&self.0 + self.0.adjoint()) * Complex64::new(0.5, 0.0);
        let mut ev: Vec<f64> = herm.symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: Self) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        ComplexMatrix(-&self.0)
    }
}

/// Residuals of the binary-observable check, in spectral norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryCheck {
    pub is_binary: bool,
    /// `||M - M^dagger||`
    pub hermitian_residual: f64,
    /// `||M^2 - I||`
    pub square_residual: f64,
}

pub fn is_binary_observable(m: &ComplexMatrix, tol: f64) -> BinaryCheck {
    if !m.is_square() || !m.is_finite() {
        return BinaryCheck {
            is_binary: false,
            hermitian_residual: f64::INFINITY,
            square_residual: f64::INFINITY,
        };
    }
    let hermitian_residual = (m - &m.adjoint()).spectral_norm();
    let square_residual = (&(m * m) - &ComplexMatrix::identity(m.dim())).spectral_norm();
    BinaryCheck {
        is_binary: hermitian_residual <= tol && square_residual <= tol,
        hermitian_residual,
        square_residual,
    }
}

pub(crate) fn require_binary(m: &ComplexMatrix, tol: f64, what: impl Into<String>) -> Result<(), QuantumError> {
    let check = is_binary_observable(m, tol);
    if check.is_binary {
        Ok(())
    } else {
        Err(QuantumError::NotBinary {
            what: what.into(),
            hermitian: check.hermitian_residual,
            square: check.square_residual,
        })
    }
}

/// `<psi| M (x) N |psi>` for the `d`-dimensional maximally entangled state.
pub fn correlation(m: &ComplexMatrix, n: &ComplexMatrix) -> Result<Complex64, QuantumError> {
    let d = m.dim();
    for x in [m, n] {
        if !x.is_square() || x.dim() != d {
            return Err(QuantumError::DimensionMismatch {
                expected: d,
                found: x.0.nrows().max(x.0.ncols()),
            });
        }
    }
    // tr(M N^T) = sum_ij M_ij N_ij
    let sum: Complex64 = m.0.iter().zip(n.0.iter()).map(|(a, b)| a * b).sum();
    Ok(sum / d as f64)
}

/// Whether a two-outcome POVM `(E0, E1)` is projective.
pub fn is_projective_pair(e0: &ComplexMatrix, e1: &ComplexMatrix, tol: f64) -> Result<bool, QuantumError> {
    if e0.dim() != e1.dim() || !e0.is_square() || !e1.is_square() {
        return Err(QuantumError::DimensionMismatch {
            expected: e0.dim(),
            found: e1.dim(),
        });
    }
    for (name, e) in [("E0", e0), ("E1", e1)] {
        let herm = (e - &e.adjoint()).spectral_norm();
        if herm > tol {
            return Err(QuantumError::NotPovm(format!("{name} is not Hermitian ({herm:.3e})")));
        }
        let min = e.hermitian_eigenvalues().first().copied().unwrap_or(0.0);
        if min < -tol {
            return Err(QuantumError::NotPovm(format!("{name} has eigenvalue {min:.3e} < 0")));
        }
    }
    let completeness = (&(e0 + e1) - &ComplexMatrix::identity(e0.dim())).spectral_norm();
    if completeness > tol {
        return Err(QuantumError::NotPovm(format!(
            "E0 + E1 differs from I by {completeness:.3e}"
        )));
    }
    Ok(e0
        .hermitian_eigenvalues()
        .iter()
        .all(|&l| l.abs() <= tol || (l - 1.0).abs() <= tol))
}
