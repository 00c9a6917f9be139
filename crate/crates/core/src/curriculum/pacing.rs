//! The iterative pacing function: a strict increase in evaluation loss
//! admits the next increment of samples.

use serde::{Deserialize, Serialize};

use super::{CurriculumConfig, CurriculumError};

/// One admission event, kept for audit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TriggerEvent {
    pub step: u64,
    pub eval_loss: f64,
    pub new_fraction: f64,
}

/// Live pacing state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurriculumState {
    /// Index i of the current curriculum; fraction = sum of increments 0..=i.
    pub curriculum_index: usize,
    /// Percent of the dataset currently eligible for training.
    pub active_fraction: f64,
    pub prev_eval_loss: Option<f64>,
    pub last_step: Option<u64>,
    pub trigger_log: Vec<TriggerEvent>,
}

impl CurriculumState {
    /// Start at curriculum 0 with the first increment active.
    pub fn initial(config: &CurriculumConfig) -> Result<Self, CurriculumError> {
        config.validate()?;
        Ok(CurriculumState {
            curriculum_index: 0,
            active_fraction: config.increments[0],
            prev_eval_loss: None,
            last_step: None,
            trigger_log: Vec::new(),
        })
    }

    pub fn saturated(&self) -> bool {
        self.active_fraction >= 100.0 - 1e-9
    }
}

/// Fold one evaluation event into the state.
///
/// A trigger fires iff a previous loss exists, the new loss is strictly
/// larger, and the active fraction is below 100%. The previous loss is
/// updated unconditionally; once saturated the active set never changes.
/// Evaluation events must arrive in increasing step order.
pub fn advance(
    mut state: CurriculumState,
    step: u64,
    eval_loss: f64,
    config: &CurriculumConfig,
) -> Result<CurriculumState, CurriculumError> {
    if let Some(last) = state.last_step {
        if step <= last {
            return Err(CurriculumError::OutOfOrderStep { step, last });
        }
    }
    let rose = state
        .prev_eval_loss
        .is_some_and(|prev| eval_loss > prev);
    if rose && !state.saturated() && state.curriculum_index + 1 < config.increments.len() {
        state.curriculum_index += 1;
        state.active_fraction = config.increments[..=state.curriculum_index].iter().sum();
        state.trigger_log.push(TriggerEvent {
            step,
            eval_loss,
            new_fraction: state.active_fraction,
        });
    }
    state.prev_eval_loss = Some(eval_loss);
    state.last_step = Some(step);
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curriculum::Strategy;

    fn config() -> CurriculumConfig {
        CurriculumConfig::new(Strategy::IterSentLen, 1)
    }

    #[test]
    fn trigger_fires_only_on_strict_increase() {
        // losses [2.0, 1.9, 1.95] at steps [20, 40, 60]: one trigger at 60
        let config = config();
        let mut state = CurriculumState::initial(&config).unwrap();
        assert_eq!(state.active_fraction, 5.0);
        state = advance(state, 20, 2.0, &config).unwrap();
        assert!(state.trigger_log.is_empty());
        state = advance(state, 40, 1.9, &config).unwrap();
        assert!(state.trigger_log.is_empty());
        state = advance(state, 60, 1.95, &config).unwrap();
        assert_eq!(state.trigger_log.len(), 1);
        assert_eq!(state.trigger_log[0].step, 60);
        assert_eq!(state.active_fraction, 10.0);
    }

    #[test]
    fn monotone_decreasing_losses_never_trigger() {
        let config = config();
        let mut state = CurriculumState::initial(&config).unwrap();
        for (i, loss) in (0..50).map(|i| (i, 5.0 - i as f64 * 0.05)) {
            state = advance(state, (i + 1) * 20, loss, &config).unwrap();
        }
        assert_eq!(state.active_fraction, 5.0);
        assert!(state.trigger_log.is_empty());
    }

    #[test]
    fn equal_losses_do_not_trigger() {
        let config = config();
        let mut state = CurriculumState::initial(&config).unwrap();
        state = advance(state, 20, 1.0, &config).unwrap();
        state = advance(state, 40, 1.0, &config).unwrap();
        assert!(state.trigger_log.is_empty());
    }

    #[test]
    fn nineteen_triggers_saturate_then_noop() {
        let config = config();
        let mut state = CurriculumState::initial(&config).unwrap();
        // alternate low/high so every second evaluation is an increase
        let mut step = 0;
        let mut triggers = 0;
        while triggers < 19 {
            step += 20;
            state = advance(state, step, 1.0, &config).unwrap();
            step += 20;
            state = advance(state, step, 2.0, &config).unwrap();
            triggers += 1;
        }
        assert_eq!(state.trigger_log.len(), 19);
        assert_eq!(state.active_fraction, 100.0);
        assert!(state.saturated());
        // a 20th rise must not change anything
        step += 20;
        state = advance(state, step, 1.0, &config).unwrap();
        step += 20;
        state = advance(state, step, 3.0, &config).unwrap();
        assert_eq!(state.trigger_log.len(), 19);
        assert_eq!(state.active_fraction, 100.0);
    }

    #[test]
    fn fraction_is_monotone_and_bounded() {
        let config = config();
        let mut state = CurriculumState::initial(&config).unwrap();
        let mut prev_fraction = state.active_fraction;
        for i in 0..200u64 {
            let loss = if i % 3 == 0 { 2.0 } else { 1.0 };
            state = advance(state, (i + 1) * 10, loss, &config).unwrap();
            assert!(state.active_fraction >= prev_fraction);
            assert!(state.active_fraction <= 100.0);
            prev_fraction = state.active_fraction;
        }
    }

    #[test]
    fn out_of_order_steps_error() {
        let config = config();
        let state = CurriculumState::initial(&config).unwrap();
        let state = advance(state, 40, 1.0, &config).unwrap();
        assert!(matches!(
            advance(state.clone(), 40, 1.1, &config),
            Err(CurriculumError::OutOfOrderStep { step: 40, last: 40 })
        ));
        assert!(matches!(
            advance(state, 20, 1.1, &config),
            Err(CurriculumError::OutOfOrderStep { .. })
        ));
    }
}
