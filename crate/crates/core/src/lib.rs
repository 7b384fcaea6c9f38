//! Analysis of binary constraint system (BCS) nonlocal games.
//!
//! * [`bcs`]: instances, the text format, classical solvers, constraint polynomials.
//! * [`game`]: the verifier's question law and exact classical values.
//! * [`quantum`]: operator assignments, perfect-strategy construction and
//!   success probabilities on the maximally entangled state.
//! * [`prover`]: the substitution search for `I = -I` contradictions and the
//!   value bounds that follow from a contradiction certificate.
//! * [`cli`]: the `bcsgame` command-line front end.

pub mod bcs;
pub mod cli;
pub mod game;
pub mod prover;
pub mod quantum;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Bcs(#[from] bcs::BcsError),
    #[error(transparent)]
    Game(#[from] game::GameError),
    #[error(transparent)]
    Quantum(#[from] quantum::QuantumError),
    #[error(transparent)]
    Prover(#[from] prover::ProverError),
}
