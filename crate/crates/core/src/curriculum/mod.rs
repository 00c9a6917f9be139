//! Curriculum pre-training: sample difficulty metrics, the iterative
//! pacing function, control strategies, and the experiment harness.
//!
//! The pacing rule: training starts with the first increment of samples;
//! whenever evaluation loss strictly increases between consecutive
//! evaluations, the next increment of samples (easiest remaining first)
//! joins the active set, until all samples are in.

mod experiment;
mod pacing;
mod schedule;
mod score;

pub use experiment::{run_experiment, ExperimentConfig, ExperimentGrid, GridRow};
pub use pacing::{advance, CurriculumState, TriggerEvent};
pub use schedule::{make_schedule, Schedule};
pub use score::{score_samples, sentence_lengths, ScorerContext};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::learner::LearnerError;

#[derive(Debug, Error)]
pub enum CurriculumError {
    #[error("increments must sum to 100, got {0}")]
    BadIncrements(f64),
    #[error("evaluation at step {step} arrives out of order (last was {last})")]
    OutOfOrderStep { step: u64, last: u64 },
    #[error("metric {metric} requires {requirement}")]
    MissingContext {
        metric: DifficultyMetric,
        requirement: &'static str,
    },
    #[error("no difficulty score for sample '{0}'")]
    MissingScore(String),
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("sample '{0}' has no tokens")]
    EmptyTokens(String),
    #[error(transparent)]
    Learner(#[from] LearnerError),
}

/// One training unit: raw text plus its token ids under the run's vocab.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrainSample {
    pub id: String,
    pub text: String,
    pub tokens: Vec<u32>,
}

/// How sample difficulty is measured. Lower value = easier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DifficultyMetric {
    /// Mean sentence length in whitespace tokens.
    SentLen,
    /// Loss under the model currently being trained.
    SelfLoss,
    /// Loss under a separately pre-trained reference model.
    LmLoss,
    /// A uniform(0,1) draw; the iterative control.
    Random,
}

impl fmt::Display for DifficultyMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            DifficultyMetric::SentLen => "sentlen",
            DifficultyMetric::SelfLoss => "selfloss",
            DifficultyMetric::LmLoss => "lmloss",
            DifficultyMetric::Random => "random",
        };
        f.write_str(name)
    }
}

/// One sample's difficulty under a metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifficultyScore {
    pub sample_id: String,
    pub metric: DifficultyMetric,
    pub value: f64,
}

/// The six pre-training strategies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Strategy {
    FullRepeated,
    FullRandom,
    IterRandom,
    IterSentLen,
    IterSelfLoss,
    IterLmLoss,
}

impl Strategy {
    pub const ALL: [Strategy; 6] = [
        Strategy::FullRepeated,
        Strategy::FullRandom,
        Strategy::IterRandom,
        Strategy::IterSentLen,
        Strategy::IterSelfLoss,
        Strategy::IterLmLoss,
    ];

    pub fn is_iterative(self) -> bool {
        !matches!(self, Strategy::FullRepeated | Strategy::FullRandom)
    }

    /// The difficulty metric an iterative strategy schedules by.
    pub fn metric(self) -> Option<DifficultyMetric> {
        match self {
            Strategy::FullRepeated | Strategy::FullRandom => None,
            Strategy::IterRandom => Some(DifficultyMetric::Random),
            Strategy::IterSentLen => Some(DifficultyMetric::SentLen),
            Strategy::IterSelfLoss => Some(DifficultyMetric::SelfLoss),
            Strategy::IterLmLoss => Some(DifficultyMetric::LmLoss),
        }
    }

    /// Stable machine-readable id, also the CLI flag value.
    pub fn id(self) -> &'static str {
        match self {
            Strategy::FullRepeated => "full-repeated",
            Strategy::FullRandom => "full-random",
            Strategy::IterRandom => "iter-random",
            Strategy::IterSentLen => "iter-sentlen",
            Strategy::IterSelfLoss => "iter-selfloss",
            Strategy::IterLmLoss => "iter-lmloss",
        }
    }

    /// Report-facing name.
    pub fn display_name(self) -> &'static str {
        match self {
            Strategy::FullRepeated => "Full Repeated",
            Strategy::FullRandom => "Full Random",
            Strategy::IterRandom => "Iter. Random",
            Strategy::IterSentLen => "Iter. SentLen",
            Strategy::IterSelfLoss => "Iter. Self-Loss",
            Strategy::IterLmLoss => "Iter. LM-Loss",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Strategy::ALL
            .iter()
            .copied()
            .find(|x| x.id() == s)
            .ok_or_else(|| format!("unknown strategy '{s}'"))
    }
}

/// Pacing and scheduling parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CurriculumConfig {
    /// Percent of the dataset added at curriculum 0, 1, 2, ...; must sum
    /// to 100. The conventional setting is twenty increments of 5.
    pub increments: Vec<f64>,
    /// Steps between evaluation events.
    pub eval_cadence: u64,
    pub strategy: Strategy,
    pub seed: u64,
}

impl CurriculumConfig {
    pub fn new(strategy: Strategy, seed: u64) -> Self {
        CurriculumConfig {
            increments: vec![5.0; 20],
            eval_cadence: 20,
            strategy,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), CurriculumError> {
        let sum: f64 = self.increments.iter().sum();
        if self.increments.is_empty() || (sum - 100.0).abs() > 1e-9 {
            return Err(CurriculumError::BadIncrements(sum));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_increments_are_twenty_fives() {
        let config = CurriculumConfig::new(Strategy::IterLmLoss, 65);
        assert_eq!(config.increments.len(), 20);
        assert!(config.increments.iter().all(|&p| p == 5.0));
        config.validate().unwrap();
    }

    #[test]
    fn bad_increment_sum_is_rejected() {
        let mut config = CurriculumConfig::new(Strategy::IterRandom, 1);
        config.increments = vec![50.0, 40.0];
        assert!(matches!(
            config.validate(),
            Err(CurriculumError::BadIncrements(_))
        ));
    }

    #[test]
    fn strategy_ids_round_trip() {
        for strategy in Strategy::ALL {
            let parsed: Strategy = strategy.id().parse().unwrap();
            assert_eq!(parsed, strategy);
        }
    }
}
