use std::f64::consts::PI;

use num_traits::ToPrimitive;

use super::{check_derivation, Derivation, ProverError};
use crate::bcs::BcsInstance;
use crate::game::{question_distribution, Rational};

/// Upper bounds on entangled success implied by a contradiction with `k`
/// cross-context cancellations, for strategies on maximally entangled states.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub k: usize,
    /// Smallest consistency angle compatible with the contradiction, `pi / 2k`.
    pub theta_min: f64,
    /// `cos(pi / 2k)`: bound on the weakest question's correlation.
    pub per_question_correlation_bound: f64,
    /// `(1 + cos(pi / 2k)) / 2 = cos^2(pi / 4k)`: bound on the weakest question's success.
    pub per_question_success_bound: f64,
    /// Smallest question probability.
    pub q_min: Rational,
    /// `1 - q_min * sin^2(pi / 4k)`.
    pub game_value_bound: f64,
    /// `1 - game_value_bound`.
    pub epsilon: f64,
    /// Sharper game value bound from averaging consistency probabilities,
    /// where one is known (the built-in four-line system only; no general
    /// formula is implemented).
    pub averaged_bound: Option<f64>,
}

/// Bounds for an arbitrary cancellation count.
pub fn bounds_for_k(k: usize, q_min: Rational) -> BoundReport {
    assert!(k >= 1);
    let theta_min = PI / (2.0 * k as f64);
    let corr = theta_min.cos();
    let success = (1.0 + corr) / 2.0;
    let q = q_min.to_f64().expect("finite");
    let game = 1.0 - q * (PI / (4.0 * k as f64)).sin().powi(2);
    BoundReport {
        k,
        theta_min,
        per_question_correlation_bound: corr,
        per_question_success_bound: success,
        q_min,
        game_value_bound: game,
        epsilon: 1.0 - game,
        averaged_bound: None,
    }
}

/// Replays the certificate and derives the value bounds from its `k`.
pub fn cancellation_bounds(inst: &BcsInstance, deriv: &Derivation) -> Result<BoundReport, ProverError> {
    check_derivation(inst, deriv)?;
    if !deriv.is_certificate() {
        return Err(ProverError::BadCertificate(
            "derivation does not end in I = -I with at least one cross-context cancel".into(),
        ));
    }
    let mut report = bounds_for_k(deriv.k, question_distribution(inst).min_probability());
    if inst.name() == Some("four-line") {
        report.averaged_bound = Some((PI / 24.0).cos().powi(2));
    }
    Ok(report)
}
