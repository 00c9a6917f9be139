//! The loss-to-accuracy bound: expected next-token accuracy is at least
//! the exponential of negative training loss.

use super::AnalysisError;

const ABS_TOL: f64 = 1e-12;

/// Per-token probabilities with their loss and the implied accuracy bound.
#[derive(Debug, Clone, PartialEq)]
pub struct LossBoundCheck {
    pub probs: Vec<f64>,
    /// Cross-entropy in nats: -mean(ln p_i).
    pub loss: f64,
    /// exp(-loss); never exceeds mean_p.
    pub bound: f64,
    pub mean_p: f64,
}

/// Compute loss, bound, and mean probability, enforcing the bound.
pub fn loss_accuracy_bound(probs: &[f64]) -> Result<LossBoundCheck, AnalysisError> {
    if probs.is_empty() {
        return Err(AnalysisError::EmptyProbabilities);
    }
    for &p in probs {
        if !(p > 0.0 && p <= 1.0) {
            return Err(AnalysisError::ProbabilityOutOfRange(p));
        }
    }
    let n = probs.len() as f64;
    let loss = -probs.iter().map(|p| p.ln()).sum::<f64>() / n;
    let bound = (-loss).exp();
    let mean_p = probs.iter().sum::<f64>() / n;

    if mean_p + ABS_TOL < bound {
        return Err(AnalysisError::BoundViolation(format!(
            "mean probability {mean_p} below exp(-loss) {bound}"
        )));
    }

    Ok(LossBoundCheck {
        probs: probs.to_vec(),
        loss,
        bound,
        mean_p,
    })
}
