//! The trainable-learner contract and its deterministic reference
//! implementation.
//!
//! The curriculum scheduler only needs four behaviors: fit on a batch,
//! report loss per sample, report loss over a dataset, and produce an
//! immutable snapshot for scoring. Neural learners slot in behind the
//! same trait; the bundled reference is an interpolated add-k n-gram
//! model whose losses have closed forms.

mod ngram;
mod scripted;

pub use ngram::NgramLearner;
pub use scripted::ScriptedLearner;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnerError {
    #[error("token id {0} outside model vocabulary of size {1}")]
    TokenOutOfRange(u32, usize),
    #[error("cannot score an empty sequence")]
    EmptySequence,
    #[error("cannot evaluate an empty dataset")]
    EmptyDataset,
    #[error("scripted learner ran out of evaluation losses")]
    ScriptExhausted,
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("state file error: {0}")]
    Format(String),
}

/// A trainable language model, as seen by the curriculum scheduler.
pub trait Learner: Send {
    /// Consume one batch of token sequences. Two identical calls are two
    /// updates, not one.
    fn fit_step(&mut self, batch: &[Vec<u32>]) -> Result<(), LearnerError>;

    /// Mean negative log-likelihood of the sequence, nats per token.
    fn sample_loss(&self, sequence: &[u32]) -> Result<f64, LearnerError>;

    /// Token-weighted loss over a dataset, nats per token. A one-sequence
    /// dataset evaluates exactly to that sequence's sample loss.
    fn eval_loss(&self, dataset: &[Vec<u32>]) -> Result<f64, LearnerError> {
        if dataset.is_empty() {
            return Err(LearnerError::EmptyDataset);
        }
        let mut total_nats = 0.0;
        let mut total_tokens = 0u64;
        for sequence in dataset {
            let per_token = self.sample_loss(sequence)?;
            total_nats += per_token * sequence.len() as f64;
            total_tokens += sequence.len() as u64;
        }
        Ok(total_nats / total_tokens as f64)
    }

    /// An immutable copy unaffected by later `fit_step`s on the original.
    fn snapshot(&self) -> Box<dyn Learner>;
}
