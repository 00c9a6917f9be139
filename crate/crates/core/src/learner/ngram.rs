//! Interpolated add-k n-gram language model.
//!
//! For a token at position i the model averages add-k estimates over all
//! context lengths available at that position, up to order-1. Every
//! conditional distribution sums to one, so losses obey the
//! exp(-loss) accuracy bound by construction.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Learner, LearnerError};

/// Deterministic reference learner with closed-form probabilities.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NgramLearner {
    order: usize,
    add_k: f64,
    vocab_size: usize,
    /// (context, next-token) counts per context length 0..order-1.
    counts: Vec<HashMap<Vec<u32>, ContextCounts>>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
struct ContextCounts {
    next: HashMap<u32, u64>,
    total: u64,
}

impl NgramLearner {
    /// `order` >= 1 is the maximum n-gram order; `add_k` > 0 the smoothing
    /// constant; `vocab_size` the closed token universe.
    pub fn new(order: usize, add_k: f64, vocab_size: usize) -> Self {
        assert!(order >= 1, "order must be >= 1");
        assert!(add_k > 0.0, "add_k must be positive");
        assert!(vocab_size >= 1, "vocab_size must be >= 1");
        NgramLearner {
            order,
            add_k,
            vocab_size,
            counts: (0..order).map(|_| HashMap::new()).collect(),
        }
    }

    /// The conventional defaults: trigram, add-0.1.
    pub fn with_defaults(vocab_size: usize) -> Self {
        NgramLearner::new(3, 0.1, vocab_size)
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    fn check_tokens(&self, sequence: &[u32]) -> Result<(), LearnerError> {
        for &tok in sequence {
            if tok as usize >= self.vocab_size {
                return Err(LearnerError::TokenOutOfRange(tok, self.vocab_size));
            }
        }
        Ok(())
    }

    /// Add-k estimate of P(token | context of length `ctx_len`).
    fn order_probability(&self, context: &[u32], token: u32, ctx_len: usize) -> f64 {
        let key = &context[context.len() - ctx_len..];
        let (count, total) = match self.counts[ctx_len].get(key) {
            Some(c) => (c.next.get(&token).copied().unwrap_or(0), c.total),
            None => (0, 0),
        };
        (count as f64 + self.add_k) / (total as f64 + self.add_k * self.vocab_size as f64)
    }

    /// Uniform interpolation over the context lengths available at this
    /// position: shorter-than-order histories back off automatically.
    pub fn probability(&self, context: &[u32], token: u32) -> f64 {
        let max_ctx = context.len().min(self.order - 1);
        let mut p = 0.0;
        for ctx_len in 0..=max_ctx {
            p += self.order_probability(context, token, ctx_len);
        }
        p / (max_ctx + 1) as f64
    }

    /// Serialize the full model state to one JSON file, for use as a
    /// pre-trained reference scorer.
    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LearnerError> {
        let path = path.as_ref();
        // HashMap key order is unstable; serialize through sorted pairs so
        // saved state is byte-reproducible.
        let stable: Vec<Vec<(Vec<u32>, Vec<(u32, u64)>, u64)>> = self
            .counts
            .iter()
            .map(|level| {
                let mut entries: Vec<_> = level
                    .iter()
                    .map(|(ctx, c)| {
                        let mut next: Vec<(u32, u64)> =
                            c.next.iter().map(|(&t, &n)| (t, n)).collect();
                        next.sort_unstable();
                        (ctx.clone(), next, c.total)
                    })
                    .collect();
                entries.sort();
                entries
            })
            .collect();
        let doc = serde_json::json!({
            "order": self.order,
            "add_k": self.add_k,
            "vocab_size": self.vocab_size,
            "counts": stable,
        });
        fs::write(path, serde_json::to_string(&doc).expect("serializable")).map_err(|source| {
            LearnerError::Io {
                path: path.display().to_string(),
                source,
            }
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LearnerError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| LearnerError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let doc: serde_json::Value =
            serde_json::from_str(&text).map_err(|e| LearnerError::Format(e.to_string()))?;
        let order = doc["order"]
            .as_u64()
            .ok_or_else(|| LearnerError::Format("missing order".into()))? as usize;
        let add_k = doc["add_k"]
            .as_f64()
            .ok_or_else(|| LearnerError::Format("missing add_k".into()))?;
        let vocab_size = doc["vocab_size"]
            .as_u64()
            .ok_or_else(|| LearnerError::Format("missing vocab_size".into()))?
            as usize;
        let stable: Vec<Vec<(Vec<u32>, Vec<(u32, u64)>, u64)>> =
            serde_json::from_value(doc["counts"].clone())
                .map_err(|e| LearnerError::Format(e.to_string()))?;
        let counts = stable
            .into_iter()
            .map(|level| {
                level
                    .into_iter()
                    .map(|(ctx, next, total)| {
                        (
                            ctx,
                            ContextCounts {
                                next: next.into_iter().collect(),
                                total,
                            },
                        )
                    })
                    .collect()
            })
            .collect();
        Ok(NgramLearner {
            order,
            add_k,
            vocab_size,
            counts,
        })
    }
}

impl Learner for NgramLearner {
    fn fit_step(&mut self, batch: &[Vec<u32>]) -> Result<(), LearnerError> {
        for sequence in batch {
            self.check_tokens(sequence)?;
        }
        for sequence in batch {
            for (i, &token) in sequence.iter().enumerate() {
                let max_ctx = i.min(self.order - 1);
                for ctx_len in 0..=max_ctx {
                    let key = sequence[i - ctx_len..i].to_vec();
                    let entry = self.counts[ctx_len].entry(key).or_default();
                    *entry.next.entry(token).or_insert(0) += 1;
                    entry.total += 1;
                }
            }
        }
        Ok(())
    }

    fn sample_loss(&self, sequence: &[u32]) -> Result<f64, LearnerError> {
        if sequence.is_empty() {
            return Err(LearnerError::EmptySequence);
        }
        self.check_tokens(sequence)?;
        let mut nats = 0.0;
        for (i, &token) in sequence.iter().enumerate() {
            let context = &sequence[..i];
            nats -= self.probability(context, token).ln();
        }
        Ok(nats / sequence.len() as f64)
    }

    fn snapshot(&self) -> Box<dyn Learner> {
        Box::new(self.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn untrained_learner_is_uniform() {
        let learner = NgramLearner::new(3, 0.1, 4);
        for seq in [vec![0u32], vec![1, 2, 3], vec![0, 0, 0, 0]] {
            let loss = learner.sample_loss(&seq).unwrap();
            assert!((loss - 4f64.ln()).abs() < 1e-12, "loss {loss}");
        }
    }

    #[test]
    fn closed_form_after_fitting_single_symbol() {
        // Vocabulary of one symbol: every conditional is (c+k)/(c+k*1) = 1.
        let mut learner = NgramLearner::new(2, 0.1, 1);
        learner.fit_step(&[vec![0, 0, 0, 0]]).unwrap();
        assert!((learner.probability(&[0], 0) - 1.0).abs() < 1e-12);
        let loss = learner.sample_loss(&[0, 0]).unwrap();
        assert!(loss.abs() < 1e-12);
    }

    #[test]
    fn closed_form_unigram_add_k() {
        // Pure unigram model: P(t) = (c_t + k) / (N + kV).
        let mut learner = NgramLearner::new(1, 0.1, 3);
        learner.fit_step(&[vec![0, 0, 1]]).unwrap();
        let k = 0.1;
        let p0 = (2.0 + k) / (3.0 + k * 3.0);
        let p1 = (1.0 + k) / (3.0 + k * 3.0);
        assert!((learner.probability(&[], 0) - p0).abs() < 1e-12);
        let loss = learner.sample_loss(&[0, 1]).unwrap();
        let expected = -(p0.ln() + p1.ln()) / 2.0;
        assert!((loss - expected).abs() < 1e-12);
    }

    #[test]
    fn empty_batch_is_a_no_op() {
        let mut learner = NgramLearner::new(3, 0.1, 4);
        let before = learner.sample_loss(&[1, 2]).unwrap();
        learner.fit_step(&[]).unwrap();
        assert_eq!(learner.sample_loss(&[1, 2]).unwrap(), before);
    }

    #[test]
    fn two_fits_double_counts() {
        let mut once = NgramLearner::new(2, 0.5, 3);
        once.fit_step(&[vec![0, 1, 0]]).unwrap();
        let mut twice = NgramLearner::new(2, 0.5, 3);
        twice.fit_step(&[vec![0, 1, 0]]).unwrap();
        twice.fit_step(&[vec![0, 1, 0]]).unwrap();
        // Doubling counts moves probabilities; the learners differ.
        assert_ne!(
            once.sample_loss(&[0, 1]).unwrap(),
            twice.sample_loss(&[0, 1]).unwrap()
        );
        // And the doubled state matches fitting the doubled batch.
        let mut doubled = NgramLearner::new(2, 0.5, 3);
        doubled
            .fit_step(&[vec![0, 1, 0], vec![0, 1, 0]])
            .unwrap();
        assert_eq!(
            twice.sample_loss(&[0, 1]).unwrap(),
            doubled.sample_loss(&[0, 1]).unwrap()
        );
    }

    #[test]
    fn distributions_sum_to_one() {
        let mut learner = NgramLearner::new(3, 0.1, 5);
        learner
            .fit_step(&[vec![0, 1, 2, 3, 4, 0, 1, 2]])
            .unwrap();
        for context in [vec![], vec![0], vec![0, 1], vec![4, 4]] {
            let sum: f64 = (0..5).map(|t| learner.probability(&context, t)).sum();
            assert!((sum - 1.0).abs() < 1e-9, "context {context:?} sums to {sum}");
        }
    }

    #[test]
    fn loss_is_pure() {
        let mut learner = NgramLearner::new(3, 0.1, 4);
        learner.fit_step(&[vec![0, 1, 2, 3]]).unwrap();
        let a = learner.sample_loss(&[0, 1, 2]).unwrap();
        let b = learner.sample_loss(&[0, 1, 2]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn out_of_range_token_is_an_error() {
        let mut learner = NgramLearner::new(2, 0.1, 4);
        assert!(matches!(
            learner.fit_step(&[vec![4]]),
            Err(LearnerError::TokenOutOfRange(4, 4))
        ));
        assert!(matches!(
            learner.sample_loss(&[9]),
            Err(LearnerError::TokenOutOfRange(9, 4))
        ));
        assert!(matches!(
            learner.sample_loss(&[]),
            Err(LearnerError::EmptySequence)
        ));
    }

    #[test]
    fn snapshot_is_isolated_from_later_training() {
        let mut learner = NgramLearner::new(3, 0.1, 4);
        learner.fit_step(&[vec![0, 1, 2]]).unwrap();
        let snap = learner.snapshot();
        let frozen = snap.sample_loss(&[0, 1, 2, 3]).unwrap();
        learner.fit_step(&[vec![3, 3, 3, 3]]).unwrap();
        assert_eq!(snap.sample_loss(&[0, 1, 2, 3]).unwrap(), frozen);
        assert_ne!(learner.sample_loss(&[0, 1, 2, 3]).unwrap(), frozen);
    }

    #[test]
    fn loss_bound_consistency_with_mean_probability() {
        let mut learner = NgramLearner::new(3, 0.1, 6);
        learner
            .fit_step(&[vec![0, 1, 2, 3, 4, 5, 0, 1, 2]])
            .unwrap();
        let seq = vec![0u32, 1, 2, 0, 5];
        let loss = learner.sample_loss(&seq).unwrap();
        let mean_p: f64 = seq
            .iter()
            .enumerate()
            .map(|(i, &t)| learner.probability(&seq[..i], t))
            .sum::<f64>()
            / seq.len() as f64;
        assert!(mean_p + 1e-12 >= (-loss).exp());
    }

    #[test]
    fn save_load_round_trip_preserves_losses() {
        let mut learner = NgramLearner::new(3, 0.1, 8);
        learner
            .fit_step(&[vec![0, 1, 2, 3, 4, 5, 6, 7, 0, 1]])
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("reference.json");
        learner.save(&path).unwrap();
        let loaded = NgramLearner::load(&path).unwrap();
        let seq = vec![0u32, 1, 2, 3];
        assert_eq!(
            learner.sample_loss(&seq).unwrap(),
            loaded.sample_loss(&seq).unwrap()
        );
        // Re-saving produces identical bytes.
        let path2 = dir.path().join("reference2.json");
        loaded.save(&path2).unwrap();
        assert_eq!(fs::read(&path).unwrap(), fs::read(&path2).unwrap());
    }
}
