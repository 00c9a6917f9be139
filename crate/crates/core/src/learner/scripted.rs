//! A learner whose evaluation losses follow a fixed script, for driving
//! the pacing function through hand-derived traces.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::{Learner, LearnerError};

/// Replays a scripted eval-loss sequence; sample losses are constant.
///
/// `eval_loss` pops the next scripted value on every call. Snapshots share
/// the script cursor with the original, so scoring from a snapshot does
/// not disturb the replay.
pub struct ScriptedLearner {
    eval_losses: Vec<f64>,
    cursor: Arc<AtomicUsize>,
    sample_loss: f64,
    fit_calls: Arc<AtomicUsize>,
}

impl ScriptedLearner {
    pub fn new(eval_losses: Vec<f64>) -> Self {
        ScriptedLearner {
            eval_losses,
            cursor: Arc::new(AtomicUsize::new(0)),
            sample_loss: 1.0,
            fit_calls: Arc::new(AtomicUsize::new(0)),
        }
    }

    pub fn with_sample_loss(mut self, loss: f64) -> Self {
        self.sample_loss = loss;
        self
    }

    pub fn fit_calls(&self) -> usize {
        self.fit_calls.load(Ordering::SeqCst)
    }
}

impl Learner for ScriptedLearner {
    fn fit_step(&mut self, _batch: &[Vec<u32>]) -> Result<(), LearnerError> {
        self.fit_calls.fetch_add(1, Ordering::SeqCst);
        Ok(())
    }

    fn sample_loss(&self, sequence: &[u32]) -> Result<f64, LearnerError> {
        if sequence.is_empty() {
            return Err(LearnerError::EmptySequence);
        }
        Ok(self.sample_loss)
    }

    fn eval_loss(&self, _dataset: &[Vec<u32>]) -> Result<f64, LearnerError> {
        let idx = self.cursor.fetch_add(1, Ordering::SeqCst);
        self.eval_losses
            .get(idx)
            .copied()
            .ok_or(LearnerError::ScriptExhausted)
    }

    fn snapshot(&self) -> Box<dyn Learner> {
        Box::new(ScriptedLearner {
            eval_losses: self.eval_losses.clone(),
            cursor: Arc::clone(&self.cursor),
            sample_loss: self.sample_loss,
            fit_calls: Arc::clone(&self.fit_calls),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn replays_losses_in_order_then_errors() {
        let learner = ScriptedLearner::new(vec![2.0, 1.5]);
        assert_eq!(learner.eval_loss(&[]).unwrap(), 2.0);
        assert_eq!(learner.eval_loss(&[]).unwrap(), 1.5);
        assert!(matches!(
            learner.eval_loss(&[]),
            Err(LearnerError::ScriptExhausted)
        ));
    }

    #[test]
    fn counts_fit_calls() {
        let mut learner = ScriptedLearner::new(vec![]);
        learner.fit_step(&[vec![1]]).unwrap();
        learner.fit_step(&[]).unwrap();
        assert_eq!(learner.fit_calls(), 2);
    }
}
