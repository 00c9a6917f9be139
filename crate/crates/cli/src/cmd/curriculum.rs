//! curriculum command: run strategies over a corpus with the reference
//! n-gram learner and emit the checkpoint grid.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use curator_core::corpus::{self, synth, DocumentCollection, Genre, Split};
use curator_core::curriculum::{
    run_experiment, ExperimentConfig, Strategy, TrainSample,
};
use curator_core::learner::{Learner, NgramLearner};

use crate::CommonArgs;

use super::common::{prepare_out_dir, write_artifact};

#[derive(Debug, Args)]
pub struct CurriculumArgs {
    /// Training corpus (JSONL documents); omit to use the bundled
    /// synthetic desk corpus.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Strategies to run, or "all".
    #[arg(long, default_value = "all")]
    pub strategy: String,
    #[arg(long, default_value_t = 2500)]
    pub steps: u64,
    #[arg(long, default_value_t = 8)]
    pub batch_size: usize,
    /// Steps between pacing evaluations.
    #[arg(long, default_value_t = 20)]
    pub eval_cadence: u64,
    /// Steps between grid checkpoints.
    #[arg(long, default_value_t = 500)]
    pub checkpoints: u64,
    /// Curriculum increment in percent (applied until 100% is reached).
    #[arg(long, default_value_t = 5.0)]
    pub increment: f64,
}

/// Tokenize documents against a deterministic whitespace-word vocabulary.
fn prepare_samples(collection: &DocumentCollection) -> (Vec<TrainSample>, Vec<Vec<u32>>, usize) {
    let mut words: Vec<&str> = collection
        .iter()
        .flat_map(|d| d.text.split_whitespace())
        .collect();
    words.sort_unstable();
    words.dedup();
    let index: BTreeMap<&str, u32> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (*w, i as u32))
        .collect();

    let tokenize = |text: &str| -> Vec<u32> {
        text.split_whitespace().map(|w| index[w]).collect()
    };
    let train: Vec<TrainSample> = collection
        .iter()
        .filter(|d| d.split == Split::Train)
        .map(|d| TrainSample {
            id: d.id.clone(),
            text: d.text.clone(),
            tokens: tokenize(&d.text),
        })
        .collect();
    let eval: Vec<Vec<u32>> = collection
        .iter()
        .filter(|d| d.split == Split::Validation)
        .map(|d| tokenize(&d.text))
        .collect();
    (train, eval, words.len())
}

pub fn run(common: &CommonArgs, args: &CurriculumArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "curriculum",
        serde_json::json!({
            "input": args.input,
            "strategy": args.strategy,
            "steps": args.steps,
            "batch_size": args.batch_size,
            "eval_cadence": args.eval_cadence,
            "checkpoints": args.checkpoints,
            "increment": args.increment,
        }),
    )?;
    let collection = match &args.input {
        Some(path) => corpus::ingest(path, Genre::Web, Split::Train)?,
        None => synth::desk_corpus(common.seed),
    };
    let (mut train, mut eval, vocab_size) = prepare_samples(&collection);
    anyhow::ensure!(!train.is_empty(), "no training documents");
    if eval.is_empty() {
        // hold out every tenth sample when the corpus has no validation split
        let mut kept = Vec::new();
        for (i, sample) in train.drain(..).enumerate() {
            if i % 10 == 9 {
                eval.push(sample.tokens.clone());
            } else {
                kept.push(sample);
            }
        }
        train = kept;
    }

    let strategies: Vec<Strategy> = if args.strategy == "all" {
        Strategy::ALL.to_vec()
    } else {
        vec![args
            .strategy
            .parse()
            .map_err(|e: String| anyhow::anyhow!(e))?]
    };

    let increments = {
        let n = (100.0 / args.increment).round() as usize;
        anyhow::ensure!(
            n >= 1 && (n as f64 * args.increment - 100.0).abs() < 1e-9,
            "increment {} does not divide 100",
            args.increment
        );
        vec![args.increment; n]
    };
    let config = ExperimentConfig {
        max_steps: args.steps,
        batch_size: args.batch_size,
        eval_cadence: args.eval_cadence,
        checkpoints: (1..=args.steps / args.checkpoints)
            .map(|i| i * args.checkpoints)
            .collect(),
        increments,
        seed: common.seed,
    };

    // The LM-loss reference: the same architecture trained to
    // convergence-at-desk-scale with three full passes over the data.
    let needs_reference = strategies.iter().any(|s| *s == Strategy::IterLmLoss);
    let reference: Option<NgramLearner> = needs_reference.then(|| {
        let mut model = NgramLearner::with_defaults(vocab_size);
        let all: Vec<Vec<u32>> = train.iter().map(|s| s.tokens.clone()).collect();
        for _ in 0..3 {
            model.fit_step(&all).expect("tokens are in range");
        }
        model
    });
    if let Some(model) = &reference {
        model
            .save(dir.join("reference_learner.json"))
            .context("saving the reference learner")?;
    }

    let grid = run_experiment(
        &strategies,
        &train,
        &eval,
        &|| Box::new(NgramLearner::with_defaults(vocab_size)),
        reference.as_ref().map(|m| m as &dyn Learner),
        &config,
        None,
    )?;

    write_artifact(&dir, "grid.csv", &grid.to_csv())?;
    write_artifact(&dir, "triggers.jsonl", &grid.triggers_jsonl())?;
    print!("{}", grid.to_table().to_text());
    println!();
    print!("{}", grid.summary());
    println!("wrote {}", dir.join("grid.csv").display());
    Ok(())
}
