//! Per-sample difficulty scoring.

use rand::Rng;

use crate::learner::Learner;
use crate::seeding::seeded_rng;

use super::{CurriculumError, DifficultyMetric, DifficultyScore, TrainSample};

/// What a metric needs beyond the samples themselves.
pub enum ScorerContext<'a> {
    /// SentLen has no external dependency.
    None,
    /// Self-loss wants the live learner's snapshot; LM-loss a loaded
    /// reference learner.
    Learner(&'a dyn Learner),
    Seed(u64),
}

/// Whitespace-token lengths of the complete sentences in `text`.
///
/// A sentence ends with a run of `.`, `!`, or `?` followed by whitespace
/// or the end of the text; a trailing fragment without a terminator is
/// not a sentence.
pub fn sentence_lengths(text: &str) -> Vec<u64> {
    let mut lengths = Vec::new();
    let mut start = 0usize;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut i = 0usize;
    while i < chars.len() {
        if matches!(chars[i].1, '.' | '!' | '?') {
            let mut j = i;
            while j + 1 < chars.len() && matches!(chars[j + 1].1, '.' | '!' | '?') {
                j += 1;
            }
            let at_end = j + 1 >= chars.len();
            let followed_by_ws = !at_end && chars[j + 1].1.is_whitespace();
            if at_end || followed_by_ws {
                let end = if at_end { text.len() } else { chars[j + 1].0 };
                let sentence = &text[start..end];
                let tokens = sentence.split_whitespace().count() as u64;
                if tokens > 0 {
                    lengths.push(tokens);
                }
                start = end;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    lengths
}

fn sentlen_value(sample: &TrainSample) -> f64 {
    let lengths = sentence_lengths(&sample.text);
    if lengths.is_empty() {
        log::debug!(
            "sample '{}' has no complete sentences; falling back to total token count",
            sample.id
        );
        return sample.text.split_whitespace().count() as f64;
    }
    lengths.iter().sum::<u64>() as f64 / lengths.len() as f64
}

/// Score every sample under one metric. Scores for one scheduling pass
/// all share that metric, and the output is deterministic given inputs.
pub fn score_samples(
    samples: &[TrainSample],
    metric: DifficultyMetric,
    ctx: &ScorerContext<'_>,
) -> Result<Vec<DifficultyScore>, CurriculumError> {
    let mut scores = Vec::with_capacity(samples.len());
    match (metric, ctx) {
        (DifficultyMetric::SentLen, _) => {
            for sample in samples {
                scores.push(DifficultyScore {
                    sample_id: sample.id.clone(),
                    metric,
                    value: sentlen_value(sample),
                });
            }
        }
        (DifficultyMetric::SelfLoss | DifficultyMetric::LmLoss, ScorerContext::Learner(model)) => {
            for sample in samples {
                if sample.tokens.is_empty() {
                    return Err(CurriculumError::EmptyTokens(sample.id.clone()));
                }
                scores.push(DifficultyScore {
                    sample_id: sample.id.clone(),
                    metric,
                    value: model.sample_loss(&sample.tokens)?,
                });
            }
        }
        (DifficultyMetric::SelfLoss, _) => {
            return Err(CurriculumError::MissingContext {
                metric,
                requirement: "the live learner snapshot",
            })
        }
        (DifficultyMetric::LmLoss, _) => {
            return Err(CurriculumError::MissingContext {
                metric,
                requirement: "a loaded reference learner",
            })
        }
        (DifficultyMetric::Random, ScorerContext::Seed(seed)) => {
            let mut rng = seeded_rng(*seed, "score:random");
            for sample in samples {
                scores.push(DifficultyScore {
                    sample_id: sample.id.clone(),
                    metric,
                    value: rng.gen::<f64>(),
                });
            }
        }
        (DifficultyMetric::Random, _) => {
            return Err(CurriculumError::MissingContext {
                metric,
                requirement: "a seed",
            })
        }
    }
    Ok(scores)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::NgramLearner;

    fn sample(id: &str, text: &str, tokens: Vec<u32>) -> TrainSample {
        TrainSample {
            id: id.to_string(),
            text: text.to_string(),
            tokens,
        }
    }

    #[test]
    fn sentlen_by_hand() {
        let samples = vec![sample("s", "Hi. We go home.", vec![0])];
        let scores =
            score_samples(&samples, DifficultyMetric::SentLen, &ScorerContext::None).unwrap();
        assert_eq!(scores[0].value, 2.0);
    }

    #[test]
    fn sentlen_handles_terminator_runs_and_fragments() {
        assert_eq!(sentence_lengths("What?! Really now."), vec![1, 2]);
        // trailing fragment without terminator is ignored
        assert_eq!(sentence_lengths("Done. trailing words"), vec![1]);
        assert_eq!(sentence_lengths(""), Vec::<u64>::new());
    }

    #[test]
    fn sentlen_zero_sentences_falls_back_to_token_count() {
        let samples = vec![sample("s", "three plain words", vec![0])];
        let scores =
            score_samples(&samples, DifficultyMetric::SentLen, &ScorerContext::None).unwrap();
        assert_eq!(scores[0].value, 3.0);
    }

    #[test]
    fn selfloss_under_untrained_learner_is_uniform() {
        let learner = NgramLearner::new(3, 0.1, 4);
        let samples = vec![
            sample("a", "x", vec![0, 1, 2]),
            sample("b", "y", vec![3, 3]),
        ];
        let scores = score_samples(
            &samples,
            DifficultyMetric::SelfLoss,
            &ScorerContext::Learner(&learner),
        )
        .unwrap();
        for s in scores {
            assert!((s.value - 4f64.ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn random_scores_are_seed_deterministic() {
        let samples: Vec<TrainSample> = (0..5)
            .map(|i| sample(&format!("s{i}"), "t", vec![0]))
            .collect();
        let a = score_samples(&samples, DifficultyMetric::Random, &ScorerContext::Seed(9)).unwrap();
        let b = score_samples(&samples, DifficultyMetric::Random, &ScorerContext::Seed(9)).unwrap();
        assert_eq!(a, b);
        let c =
            score_samples(&samples, DifficultyMetric::Random, &ScorerContext::Seed(10)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn missing_context_is_an_error() {
        let samples = vec![sample("a", "x", vec![0])];
        assert!(matches!(
            score_samples(&samples, DifficultyMetric::SelfLoss, &ScorerContext::None),
            Err(CurriculumError::MissingContext { .. })
        ));
        assert!(matches!(
            score_samples(&samples, DifficultyMetric::Random, &ScorerContext::None),
            Err(CurriculumError::MissingContext { .. })
        ));
    }
}
