//! The strategy-grid experiment harness.
//!
//! Each strategy trains its own fresh learner under a shared step budget;
//! at every checkpoint the grid records the step, the percent of distinct
//! samples drawn, evaluation loss, and any pluggable downstream metrics.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::learner::Learner;
use crate::report::Table;

use super::schedule::make_schedule;
use super::score::{score_samples, ScorerContext};
use super::{
    CurriculumConfig, CurriculumError, DifficultyMetric, DifficultyScore, Strategy, TrainSample,
    TriggerEvent,
};

/// Harness parameters shared by all strategies in a run.
pub struct ExperimentConfig {
    pub max_steps: u64,
    pub batch_size: usize,
    /// Steps between the evaluations that drive the pacing function.
    pub eval_cadence: u64,
    /// Steps at which grid rows are recorded.
    pub checkpoints: Vec<u64>,
    /// Pacing increments for iterative strategies.
    pub increments: Vec<f64>,
    pub seed: u64,
}

impl ExperimentConfig {
    /// Checkpoints at a fixed interval up to the step budget.
    pub fn with_checkpoint_interval(mut self, interval: u64) -> Self {
        self.checkpoints = (1..=self.max_steps / interval).map(|i| i * interval).collect();
        self
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            max_steps: 2500,
            batch_size: 8,
            eval_cadence: 20,
            checkpoints: vec![500, 1000, 1500, 2000, 2500],
            increments: vec![5.0; 20],
            seed: 65,
        }
    }
}

/// One grid row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridRow {
    pub strategy: Strategy,
    pub step: u64,
    pub data_percent_used: f64,
    pub eval_loss: f64,
    pub metrics: BTreeMap<String, f64>,
}

/// The strategy x checkpoint grid plus per-strategy trigger logs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExperimentGrid {
    pub rows: Vec<GridRow>,
    pub triggers: Vec<(Strategy, TriggerEvent)>,
}

impl ExperimentGrid {
    fn metric_columns(&self) -> Vec<String> {
        let mut cols: Vec<String> = self
            .rows
            .iter()
            .flat_map(|r| r.metrics.keys().cloned())
            .collect();
        cols.sort();
        cols.dedup();
        cols
    }

    /// CSV with columns strategy, pt_steps, pt_data_pct, eval_loss, then
    /// any downstream metric columns.
    pub fn to_csv(&self) -> String {
        let metric_cols = self.metric_columns();
        let mut header = vec![
            "strategy".to_string(),
            "pt_steps".to_string(),
            "pt_data_pct".to_string(),
            "eval_loss".to_string(),
        ];
        header.extend(metric_cols.iter().cloned());
        let mut table = Table::new(header);
        for row in &self.rows {
            let mut cells = vec![
                row.strategy.id().to_string(),
                row.step.to_string(),
                format!("{:.2}", row.data_percent_used),
                format!("{:.6}", row.eval_loss),
            ];
            for col in &metric_cols {
                cells.push(
                    row.metrics
                        .get(col)
                        .map(|v| format!("{v:.6}"))
                        .unwrap_or_default(),
                );
            }
            table.push_row(cells);
        }
        table.to_csv()
    }

    /// Aligned text view with display names.
    pub fn to_table(&self) -> Table {
        let metric_cols = self.metric_columns();
        let mut header = vec![
            "PT Strategy".to_string(),
            "PT Steps".to_string(),
            "PT Data Pct.".to_string(),
            "Eval Loss".to_string(),
        ];
        header.extend(metric_cols.iter().cloned());
        let mut table = Table::new(header);
        for row in &self.rows {
            let mut cells = vec![
                row.strategy.display_name().to_string(),
                row.step.to_string(),
                format!("{:.0}", row.data_percent_used),
                format!("{:.4}", row.eval_loss),
            ];
            for col in &metric_cols {
                cells.push(
                    row.metrics
                        .get(col)
                        .map(|v| format!("{v:.4}"))
                        .unwrap_or_default(),
                );
            }
            table.push_row(cells);
        }
        table
    }

    /// Trigger log as JSONL.
    pub fn triggers_jsonl(&self) -> String {
        let mut out = String::new();
        for (strategy, event) in &self.triggers {
            let line = serde_json::json!({
                "strategy": strategy.id(),
                "step": event.step,
                "eval_loss": event.eval_loss,
                "new_fraction": event.new_fraction,
            });
            out.push_str(&line.to_string());
            out.push('\n');
        }
        out
    }

    /// For each strategy, the checkpoint with the lowest evaluation loss
    /// and the data it had consumed there. Reported, not asserted: where
    /// the optimum lands depends on the learner and the data.
    pub fn summary(&self) -> String {
        let mut out = String::new();
        for strategy in Strategy::ALL {
            let best = self
                .rows
                .iter()
                .filter(|r| r.strategy == strategy)
                .min_by(|a, b| a.eval_loss.partial_cmp(&b.eval_loss).expect("finite"));
            if let Some(row) = best {
                out.push_str(&format!(
                    "{}: best eval loss {:.4} at step {} using {:.0}% of the data\n",
                    strategy.display_name(),
                    row.eval_loss,
                    row.step,
                    row.data_percent_used
                ));
            }
        }
        out
    }
}

/// Train one learner per strategy and record the checkpoint grid.
///
/// `learner_factory` must yield identical fresh learners; `reference`
/// supplies the pre-trained scorer for the LM-loss strategy; `metrics_fn`
/// adds downstream columns at each checkpoint.
#[allow(clippy::too_many_arguments)]
pub fn run_experiment(
    strategies: &[Strategy],
    dataset: &[TrainSample],
    eval_set: &[Vec<u32>],
    learner_factory: &dyn Fn() -> Box<dyn Learner>,
    reference: Option<&dyn Learner>,
    config: &ExperimentConfig,
    metrics_fn: Option<&dyn Fn(&dyn Learner) -> BTreeMap<String, f64>>,
) -> Result<ExperimentGrid, CurriculumError> {
    if dataset.is_empty() {
        return Err(CurriculumError::EmptyDataset);
    }
    let mut grid = ExperimentGrid::default();

    for &strategy in strategies {
        let mut learner = learner_factory();
        let curriculum = CurriculumConfig {
            increments: config.increments.clone(),
            eval_cadence: config.eval_cadence,
            strategy,
            seed: config.seed,
        };

        let scores: Vec<DifficultyScore> = match strategy.metric() {
            None => Vec::new(),
            Some(DifficultyMetric::SentLen) => {
                score_samples(dataset, DifficultyMetric::SentLen, &ScorerContext::None)?
            }
            Some(DifficultyMetric::Random) => score_samples(
                dataset,
                DifficultyMetric::Random,
                &ScorerContext::Seed(config.seed),
            )?,
            Some(DifficultyMetric::SelfLoss) => {
                let snapshot = learner.snapshot();
                score_samples(
                    dataset,
                    DifficultyMetric::SelfLoss,
                    &ScorerContext::Learner(snapshot.as_ref()),
                )?
            }
            Some(DifficultyMetric::LmLoss) => {
                let model = reference.ok_or(CurriculumError::MissingContext {
                    metric: DifficultyMetric::LmLoss,
                    requirement: "a loaded reference learner",
                })?;
                score_samples(
                    dataset,
                    DifficultyMetric::LmLoss,
                    &ScorerContext::Learner(model),
                )?
            }
        };

        let mut schedule = make_schedule(strategy, dataset, &scores, &curriculum)?;
        for step in 1..=config.max_steps {
            let batch: Vec<Vec<u32>> = schedule
                .next_batch(config.batch_size)
                .into_iter()
                .map(|idx| dataset[idx].tokens.clone())
                .collect();
            learner.fit_step(&batch)?;

            if step % config.eval_cadence == 0 {
                let eval_loss = learner.eval_loss(eval_set)?;
                let snapshot = if strategy == Strategy::IterSelfLoss {
                    Some(learner.snapshot())
                } else {
                    None
                };
                schedule.notify_eval(step, eval_loss, snapshot.as_deref(), dataset)?;
            }

            if config.checkpoints.contains(&step) {
                let eval_loss = learner.eval_loss(eval_set)?;
                let metrics = metrics_fn
                    .map(|f| f(learner.as_ref()))
                    .unwrap_or_default();
                grid.rows.push(GridRow {
                    strategy,
                    step,
                    data_percent_used: schedule.data_percent_used(),
                    eval_loss,
                    metrics,
                });
            }
        }
        for event in schedule.trigger_log() {
            grid.triggers.push((strategy, event.clone()));
        }
    }
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::NgramLearner;

    fn tiny_dataset() -> Vec<TrainSample> {
        (0..12)
            .map(|i| TrainSample {
                id: format!("s{i}"),
                text: format!("word {i}."),
                tokens: vec![(i % 5) as u32, ((i + 1) % 5) as u32, (i % 3) as u32],
            })
            .collect()
    }

    fn quick_config() -> ExperimentConfig {
        ExperimentConfig {
            max_steps: 40,
            batch_size: 2,
            eval_cadence: 5,
            checkpoints: vec![10, 20, 30, 40],
            increments: vec![25.0; 4],
            seed: 65,
        }
    }

    #[test]
    fn empty_checkpoints_yield_empty_grid() {
        let mut config = quick_config();
        config.checkpoints.clear();
        let grid = run_experiment(
            &[Strategy::FullRepeated],
            &tiny_dataset(),
            &[vec![0, 1, 2]],
            &|| Box::new(NgramLearner::new(2, 0.1, 5)),
            None,
            &config,
            None,
        )
        .unwrap();
        assert!(grid.rows.is_empty());
    }

    #[test]
    fn full_strategies_reach_100_percent_after_an_epoch() {
        let grid = run_experiment(
            &[Strategy::FullRepeated, Strategy::FullRandom],
            &tiny_dataset(),
            &[vec![0, 1, 2]],
            &|| Box::new(NgramLearner::new(2, 0.1, 5)),
            None,
            &quick_config(),
            None,
        )
        .unwrap();
        // an epoch of 12 samples at batch 2 completes by step 6
        for row in &grid.rows {
            assert_eq!(row.data_percent_used, 100.0, "{row:?}");
        }
    }

    #[test]
    fn iterative_data_percent_is_non_decreasing() {
        let reference = {
            let mut model = NgramLearner::new(2, 0.1, 5);
            model
                .fit_step(&[vec![0, 1, 2, 3, 4, 0, 1, 2]])
                .unwrap();
            model
        };
        let grid = run_experiment(
            &[Strategy::IterRandom, Strategy::IterSentLen, Strategy::IterSelfLoss, Strategy::IterLmLoss],
            &tiny_dataset(),
            &[vec![0, 1, 2]],
            &|| Box::new(NgramLearner::new(2, 0.1, 5)),
            Some(&reference),
            &quick_config(),
            None,
        )
        .unwrap();
        for strategy in [
            Strategy::IterRandom,
            Strategy::IterSentLen,
            Strategy::IterSelfLoss,
            Strategy::IterLmLoss,
        ] {
            let pcts: Vec<f64> = grid
                .rows
                .iter()
                .filter(|r| r.strategy == strategy)
                .map(|r| r.data_percent_used)
                .collect();
            assert_eq!(pcts.len(), 4);
            for pair in pcts.windows(2) {
                assert!(pair[0] <= pair[1], "{strategy}: {pcts:?}");
            }
        }
    }

    #[test]
    fn lmloss_without_reference_is_an_error() {
        let err = run_experiment(
            &[Strategy::IterLmLoss],
            &tiny_dataset(),
            &[vec![0]],
            &|| Box::new(NgramLearner::new(2, 0.1, 5)),
            None,
            &quick_config(),
            None,
        )
        .unwrap_err();
        assert!(matches!(err, CurriculumError::MissingContext { .. }));
    }

    #[test]
    fn grid_is_byte_reproducible() {
        let run = || {
            run_experiment(
                &Strategy::ALL,
                &tiny_dataset(),
                &[vec![0, 1, 2], vec![3, 4]],
                &|| Box::new(NgramLearner::new(2, 0.1, 5)),
                Some(&NgramLearner::new(2, 0.1, 5)),
                &quick_config(),
                None,
            )
            .unwrap()
        };
        let a = run();
        let b = run();
        assert_eq!(a.to_csv(), b.to_csv());
        assert_eq!(a.triggers_jsonl(), b.triggers_jsonl());
    }

    #[test]
    fn csv_has_the_expected_columns() {
        let grid = run_experiment(
            &[Strategy::FullRepeated],
            &tiny_dataset(),
            &[vec![0, 1]],
            &|| Box::new(NgramLearner::new(2, 0.1, 5)),
            None,
            &quick_config(),
            Some(&|learner: &dyn Learner| {
                BTreeMap::from([(
                    "train_ppl".to_string(),
                    learner.sample_loss(&[0, 1, 2]).unwrap().exp(),
                )])
            }),
        )
        .unwrap();
        let csv = grid.to_csv();
        assert!(csv.starts_with("strategy,pt_steps,pt_data_pct,eval_loss,train_ppl\n"));
        assert!(csv.contains("full-repeated,10,100.00,"));
    }
}
