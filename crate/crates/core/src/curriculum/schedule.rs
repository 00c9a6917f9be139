//! Deterministic batch streams for the six strategies.
//!
//! Full Repeated walks the same epoch permutation forever; Full Random
//! reshuffles per epoch; iterative strategies draw uniformly from an
//! active set that grows easiest-first at pacing triggers.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::learner::Learner;
use crate::seeding::seeded_rng;

use super::score::score_samples;
use super::{
    advance, CurriculumConfig, CurriculumError, CurriculumState, DifficultyMetric,
    DifficultyScore, ScorerContext, Strategy, TrainSample, TriggerEvent,
};

/// Live schedule state for one training run.
pub struct Schedule {
    strategy: Strategy,
    n: usize,
    rng: ChaCha8Rng,
    config: CurriculumConfig,
    // full-strategy epoch walk
    epoch_order: Vec<usize>,
    epoch_pos: usize,
    // iterative active set
    state: Option<CurriculumState>,
    scores: Vec<f64>,
    active: Vec<usize>,
    is_active: Vec<bool>,
    // distinct samples drawn at least once
    drawn: Vec<bool>,
    drawn_count: usize,
}

/// Build the batch stream for a strategy over a scored dataset.
///
/// Iterative strategies must receive scores covering every sample; full
/// strategies ignore them.
pub fn make_schedule(
    strategy: Strategy,
    dataset: &[TrainSample],
    scores: &[DifficultyScore],
    config: &CurriculumConfig,
) -> Result<Schedule, CurriculumError> {
    if dataset.is_empty() {
        return Err(CurriculumError::EmptyDataset);
    }
    config.validate()?;
    let n = dataset.len();
    let rng = seeded_rng(config.seed, &format!("schedule:{}", strategy.id()));

    let mut schedule = Schedule {
        strategy,
        n,
        rng,
        config: config.clone(),
        epoch_order: Vec::new(),
        epoch_pos: 0,
        state: None,
        scores: Vec::new(),
        active: Vec::new(),
        is_active: vec![false; n],
        drawn: vec![false; n],
        drawn_count: 0,
    };

    if strategy.is_iterative() {
        let values = index_scores(dataset, scores)?;
        schedule.scores = values;
        schedule.state = Some(CurriculumState::initial(config)?);
        let target = schedule.target_active_count();
        schedule.admit_easiest(target);
    } else {
        schedule.epoch_order = (0..n).collect();
        if strategy == Strategy::FullRandom {
            schedule.epoch_order.shuffle(&mut schedule.rng);
        }
    }
    Ok(schedule)
}

/// Map per-id scores onto dataset order.
fn index_scores(
    dataset: &[TrainSample],
    scores: &[DifficultyScore],
) -> Result<Vec<f64>, CurriculumError> {
    let by_id: std::collections::HashMap<&str, f64> = scores
        .iter()
        .map(|s| (s.sample_id.as_str(), s.value))
        .collect();
    dataset
        .iter()
        .map(|sample| {
            by_id
                .get(sample.id.as_str())
                .copied()
                .ok_or_else(|| CurriculumError::MissingScore(sample.id.clone()))
        })
        .collect()
}

impl Schedule {
    pub fn strategy(&self) -> Strategy {
        self.strategy
    }

    /// Percent of the dataset eligible for training right now.
    pub fn active_fraction(&self) -> f64 {
        match &self.state {
            Some(state) => state.active_fraction,
            None => 100.0,
        }
    }

    /// Percent of distinct samples drawn at least once.
    pub fn data_percent_used(&self) -> f64 {
        self.drawn_count as f64 / self.n as f64 * 100.0
    }

    /// Sample ids currently in the active set, in admission order.
    pub fn active_indices(&self) -> &[usize] {
        &self.active
    }

    pub fn trigger_log(&self) -> &[TriggerEvent] {
        self.state.as_ref().map(|s| s.trigger_log.as_slice()).unwrap_or(&[])
    }

    pub fn state(&self) -> Option<&CurriculumState> {
        self.state.as_ref()
    }

    fn target_active_count(&self) -> usize {
        let fraction = self.state.as_ref().expect("iterative").active_fraction;
        let raw = (fraction / 100.0 * self.n as f64).ceil() as usize;
        raw.clamp(1, self.n)
    }

    /// Admit the easiest inactive samples (current scores, ties by index)
    /// until the active set reaches `target`. Admission order is
    /// ascending difficulty, and nothing already active ever leaves.
    fn admit_easiest(&mut self, target: usize) {
        if self.active.len() >= target {
            return;
        }
        let mut inactive: Vec<usize> = (0..self.n).filter(|&i| !self.is_active[i]).collect();
        inactive.sort_by(|&a, &b| {
            self.scores[a]
                .partial_cmp(&self.scores[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        for idx in inactive.into_iter().take(target - self.active.len()) {
            self.is_active[idx] = true;
            self.active.push(idx);
        }
    }

    /// The next batch of sample indices.
    pub fn next_batch(&mut self, batch_size: usize) -> Vec<usize> {
        let batch = if self.strategy.is_iterative() {
            (0..batch_size)
                .map(|_| self.active[self.rng.gen_range(0..self.active.len())])
                .collect::<Vec<_>>()
        } else {
            let mut batch = Vec::with_capacity(batch_size);
            for _ in 0..batch_size {
                if self.epoch_pos == self.epoch_order.len() {
                    self.epoch_pos = 0;
                    if self.strategy == Strategy::FullRandom {
                        self.epoch_order.shuffle(&mut self.rng);
                    }
                    // epoch boundaries end batches early
                    if !batch.is_empty() {
                        break;
                    }
                }
                batch.push(self.epoch_order[self.epoch_pos]);
                self.epoch_pos += 1;
            }
            batch
        };
        for &idx in &batch {
            if !self.drawn[idx] {
                self.drawn[idx] = true;
                self.drawn_count += 1;
            }
        }
        batch
    }

    /// Feed one evaluation event to the pacing function. Returns whether
    /// an increment fired. Full strategies ignore evaluations. Self-loss
    /// schedules re-score the remaining samples with the supplied learner
    /// snapshot at trigger time.
    pub fn notify_eval(
        &mut self,
        step: u64,
        eval_loss: f64,
        learner: Option<&dyn Learner>,
        dataset: &[TrainSample],
    ) -> Result<bool, CurriculumError> {
        let Some(state) = self.state.take() else {
            return Ok(false);
        };
        let before = state.curriculum_index;
        let state = advance(state, step, eval_loss, &self.config)?;
        let triggered = state.curriculum_index > before;
        self.state = Some(state);
        if triggered {
            if self.strategy == Strategy::IterSelfLoss {
                let model = learner.ok_or(CurriculumError::MissingContext {
                    metric: DifficultyMetric::SelfLoss,
                    requirement: "the live learner snapshot at trigger time",
                })?;
                let fresh = score_samples(
                    dataset,
                    DifficultyMetric::SelfLoss,
                    &ScorerContext::Learner(model),
                )?;
                self.scores = index_scores(dataset, &fresh)?;
            }
            let target = self.target_active_count();
            self.admit_easiest(target);
        }
        Ok(triggered)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dataset(n: usize) -> Vec<TrainSample> {
        (0..n)
            .map(|i| TrainSample {
                id: format!("s{i}"),
                text: format!("sample {i}."),
                tokens: vec![(i % 4) as u32],
            })
            .collect()
    }

    fn scores_by_index(data: &[TrainSample]) -> Vec<DifficultyScore> {
        data.iter()
            .enumerate()
            .map(|(i, s)| DifficultyScore {
                sample_id: s.id.clone(),
                metric: DifficultyMetric::SentLen,
                value: i as f64,
            })
            .collect()
    }

    fn config(strategy: Strategy) -> CurriculumConfig {
        CurriculumConfig::new(strategy, 7)
    }

    #[test]
    fn full_repeated_replays_the_same_epoch() {
        let data = dataset(4);
        let cfg = config(Strategy::FullRepeated);
        let mut schedule = make_schedule(Strategy::FullRepeated, &data, &[], &cfg).unwrap();
        let epoch1: Vec<usize> = (0..4).flat_map(|_| schedule.next_batch(1)).collect();
        let epoch2: Vec<usize> = (0..4).flat_map(|_| schedule.next_batch(1)).collect();
        assert_eq!(epoch1, epoch2);
        assert_eq!(epoch1.len(), 4);
    }

    #[test]
    fn full_random_reshuffles_between_epochs() {
        let data = dataset(16);
        let cfg = config(Strategy::FullRandom);
        let mut schedule = make_schedule(Strategy::FullRandom, &data, &[], &cfg).unwrap();
        let epoch1: Vec<usize> = (0..16).flat_map(|_| schedule.next_batch(1)).collect();
        let epoch2: Vec<usize> = (0..16).flat_map(|_| schedule.next_batch(1)).collect();
        let mut sorted1 = epoch1.clone();
        sorted1.sort_unstable();
        let mut sorted2 = epoch2.clone();
        sorted2.sort_unstable();
        assert_eq!(sorted1, (0..16).collect::<Vec<_>>());
        assert_eq!(sorted2, (0..16).collect::<Vec<_>>());
        // this seed reshuffles to a different order
        assert_ne!(epoch1, epoch2);
    }

    #[test]
    fn epoch_boundary_ends_batches_early() {
        let data = dataset(5);
        let cfg = config(Strategy::FullRepeated);
        let mut schedule = make_schedule(Strategy::FullRepeated, &data, &[], &cfg).unwrap();
        let b1 = schedule.next_batch(3);
        let b2 = schedule.next_batch(3);
        assert_eq!(b1.len(), 3);
        assert_eq!(b2.len(), 2, "epoch of 5 ends after two samples");
        assert_eq!(schedule.data_percent_used(), 100.0);
    }

    #[test]
    fn iterative_active_set_is_the_easiest_prefix() {
        // 25% of 8 scored samples: the two lowest scores
        let data = dataset(8);
        let scores = scores_by_index(&data);
        let mut cfg = config(Strategy::IterSentLen);
        cfg.increments = vec![25.0; 4];
        let schedule = make_schedule(Strategy::IterSentLen, &data, &scores, &cfg).unwrap();
        assert_eq!(schedule.active_indices(), &[0, 1]);
        assert_eq!(schedule.active_fraction(), 25.0);
    }

    #[test]
    fn iterative_draws_come_from_the_active_set_only() {
        let data = dataset(10);
        let scores = scores_by_index(&data);
        let cfg = config(Strategy::IterSentLen);
        let mut schedule = make_schedule(Strategy::IterSentLen, &data, &scores, &cfg).unwrap();
        // 5% of 10 rounds up to one active sample
        assert_eq!(schedule.active_indices(), &[0]);
        for _ in 0..20 {
            for idx in schedule.next_batch(4) {
                assert_eq!(idx, 0);
            }
        }
        assert_eq!(schedule.data_percent_used(), 10.0);
    }

    #[test]
    fn triggers_grow_the_active_set_monotonically() {
        let data = dataset(20);
        let scores = scores_by_index(&data);
        let cfg = config(Strategy::IterSentLen);
        let mut schedule = make_schedule(Strategy::IterSentLen, &data, &scores, &cfg).unwrap();
        let mut seen = schedule.active_indices().to_vec();
        let mut step = 0;
        for round in 0..30u64 {
            step += 20;
            let loss = if round % 2 == 0 { 1.0 } else { 2.0 };
            schedule.notify_eval(step, loss, None, &data).unwrap();
            let now = schedule.active_indices().to_vec();
            assert!(now.len() >= seen.len());
            assert_eq!(&now[..seen.len()], seen.as_slice(), "prefix preserved");
            seen = now;
        }
        // enough alternations saturate 20 increments of 5%
        assert!(schedule.active_fraction() <= 100.0);
    }

    #[test]
    fn saturation_reaches_a_permutation_of_the_dataset() {
        let data = dataset(10);
        let scores = scores_by_index(&data);
        let mut cfg = config(Strategy::IterRandom);
        cfg.increments = vec![20.0; 5];
        let mut schedule = make_schedule(Strategy::IterRandom, &data, &scores, &cfg).unwrap();
        let mut step = 0;
        for round in 0..12u64 {
            step += 20;
            let loss = if round % 2 == 0 { 1.0 } else { 2.0 };
            schedule.notify_eval(step, loss, None, &data).unwrap();
        }
        assert_eq!(schedule.active_fraction(), 100.0);
        let mut ids = schedule.active_indices().to_vec();
        ids.sort_unstable();
        assert_eq!(ids, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn selfloss_requires_a_learner_at_trigger_time() {
        let data = dataset(4);
        let scores: Vec<DifficultyScore> = data
            .iter()
            .map(|s| DifficultyScore {
                sample_id: s.id.clone(),
                metric: DifficultyMetric::SelfLoss,
                value: 1.0,
            })
            .collect();
        let cfg = config(Strategy::IterSelfLoss);
        let mut schedule = make_schedule(Strategy::IterSelfLoss, &data, &scores, &cfg).unwrap();
        schedule.notify_eval(20, 1.0, None, &data).unwrap();
        let err = schedule.notify_eval(40, 2.0, None, &data).unwrap_err();
        assert!(matches!(err, CurriculumError::MissingContext { .. }));
    }

    #[test]
    fn missing_scores_are_rejected() {
        let data = dataset(3);
        let scores = scores_by_index(&data[..2]);
        let cfg = config(Strategy::IterSentLen);
        assert!(matches!(
            make_schedule(Strategy::IterSentLen, &data, &scores, &cfg),
            Err(CurriculumError::MissingScore(_))
        ));
    }
}
