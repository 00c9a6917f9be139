//! glue, eval-gen, and judge commands.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use curator_core::benchgen::{
    bin_by_similarity, build_benchmark, dedup_questions, generate_questions, BenchError,
    EvalGenConfig, GlueBuildConfig, GlueItem, SimilarityBin, TokenOverlapEmbedder,
};
use curator_core::judge::{aggregate, run_judging, QuestionBins, QuestionResponses};

use crate::CommonArgs;

use super::common::{build_client, prepare_out_dir, read_jsonl_values, write_artifact};

#[derive(Debug, Args)]
pub struct GlueArgs {
    /// Benchmark items (JSONL: {task, fields, label}).
    #[arg(long)]
    pub items: PathBuf,
    /// Minimum retained fraction.
    #[arg(long, default_value_t = 0.70)]
    pub coverage: f64,
    #[arg(long, default_value_t = 10)]
    pub max_rounds: u32,
    /// Also split the retained items into validation and test halves.
    #[arg(long)]
    pub split: bool,
}

pub fn glue(common: &CommonArgs, args: &GlueArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "glue",
        serde_json::json!({
            "items": args.items,
            "coverage": args.coverage,
            "max_rounds": args.max_rounds,
            "split": args.split,
        }),
    )?;
    let mut items = Vec::new();
    for value in read_jsonl_values(&args.items)? {
        let task = value["task"]
            .as_str()
            .context("item missing 'task'")?
            .to_string();
        let fields: Vec<String> = serde_json::from_value(value["fields"].clone())
            .context("item missing 'fields' array")?;
        let label = match &value["label"] {
            serde_json::Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        items.push(GlueItem::new(task, fields, label));
    }

    let client = build_client(common)?;
    let config = GlueBuildConfig {
        coverage_ratio: args.coverage,
        max_rounds: args.max_rounds,
        seed: common.seed,
    };
    let report = match build_benchmark(&items, &Default::default(), &client, &client, &config) {
        Ok(report) => report,
        Err(BenchError::Coverage(err)) => {
            write_artifact(&dir, "coverage.csv", &err.report.coverage_csv())?;
            anyhow::bail!("{err}");
        }
        Err(e) => return Err(e.into()),
    };

    let mut lines = String::new();
    for item in &report.retained {
        lines.push_str(&serde_json::to_string(item)?);
        lines.push('\n');
    }
    write_artifact(&dir, "retained.jsonl", &lines)?;
    write_artifact(&dir, "coverage.csv", &report.coverage_csv())?;
    println!(
        "coverage {:.2}% after {} rounds ({} of {} items)",
        report.coverage * 100.0,
        report.rounds_run,
        report.retained.len(),
        report.total
    );

    if args.split {
        let (validation, test) =
            curator_core::benchgen::split_validation(&report.retained, common.seed)?;
        for (name, half) in [("validation.jsonl", validation), ("test.jsonl", test)] {
            let mut lines = String::new();
            for item in &half {
                lines.push_str(&serde_json::to_string(item)?);
                lines.push('\n');
            }
            write_artifact(&dir, name, &lines)?;
        }
    }
    Ok(())
}

#[derive(Debug, Args)]
pub struct EvalGenArgs {
    /// Seed question bank (JSONL: {text} or plain strings).
    #[arg(long)]
    pub bank: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub iterations: usize,
    #[arg(long, default_value_t = 10)]
    pub examples: usize,
    #[arg(long, default_value_t = 50)]
    pub questions: usize,
    /// Similarity above this drops a question as a duplicate.
    #[arg(long, default_value_t = 0.876)]
    pub threshold: f64,
    /// Revised instruction set for binning (JSONL); defaults to the bank.
    #[arg(long)]
    pub refs_revised: Option<PathBuf>,
    /// Original instruction set for binning (JSONL); defaults to the bank.
    #[arg(long)]
    pub refs_original: Option<PathBuf>,
}

fn read_texts(path: &PathBuf) -> Result<Vec<String>> {
    let mut texts = Vec::new();
    for value in read_jsonl_values(path)? {
        let text = match &value {
            serde_json::Value::String(s) => s.clone(),
            other => other["text"]
                .as_str()
                .with_context(|| format!("record without 'text' in {}", path.display()))?
                .to_string(),
        };
        texts.push(text);
    }
    Ok(texts)
}

pub fn eval_gen(common: &CommonArgs, args: &EvalGenArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "eval-gen",
        serde_json::json!({
            "bank": args.bank,
            "iterations": args.iterations,
            "examples": args.examples,
            "questions": args.questions,
            "threshold": args.threshold,
            "refs_revised": args.refs_revised,
            "refs_original": args.refs_original,
        }),
    )?;
    let bank = read_texts(&args.bank)?;
    let revised_ref = match &args.refs_revised {
        Some(path) => read_texts(path)?,
        None => bank.clone(),
    };
    let original_ref = match &args.refs_original {
        Some(path) => read_texts(path)?,
        None => bank.clone(),
    };

    let client = build_client(common)?;
    let config = EvalGenConfig {
        iterations: args.iterations,
        examples_per_prompt: args.examples,
        questions_per_call: args.questions,
        similarity_threshold: args.threshold,
        seed: common.seed,
        ..EvalGenConfig::default()
    };
    let batch = generate_questions(&bank, &client, &config)?;
    for warning in &batch.warnings {
        log::warn!("iteration {}: {}", warning.iteration, warning.message);
    }
    let embedder = TokenOverlapEmbedder;
    let deduped = dedup_questions(&batch.questions, &embedder, config.similarity_threshold)?;
    let (questions, bins) = bin_by_similarity(&deduped, &revised_ref, &original_ref, &embedder)?;

    let mut lines = String::new();
    for (i, q) in questions.iter().enumerate() {
        let record = serde_json::json!({
            "id": format!("q{:05}", i),
            "text": q.text,
            "max_sim_revised": q.max_sim_revised,
            "max_sim_original": q.max_sim_original,
            "bin": q.bin.label(),
        });
        lines.push_str(&record.to_string());
        lines.push('\n');
    }
    write_artifact(&dir, "questions.jsonl", &lines)?;
    write_artifact(&dir, "bins.csv", &bins.to_csv())?;
    println!(
        "generated {} raw, kept {} after dedup; bins {:?}",
        batch.questions.len(),
        questions.len(),
        bins.counts
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct JudgeArgs {
    /// Responses (JSONL: {question_id, question, responses: {model: text}}).
    #[arg(long)]
    pub responses: PathBuf,
    /// Binned question set from eval-gen (JSONL with id and bin).
    #[arg(long)]
    pub questions: PathBuf,
    #[arg(long, default_value_t = 3)]
    pub retries: u32,
}

pub fn judge(common: &CommonArgs, args: &JudgeArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "judge",
        serde_json::json!({
            "responses": args.responses,
            "questions": args.questions,
            "retries": args.retries,
        }),
    )?;

    let mut bins = QuestionBins::new();
    for value in read_jsonl_values(&args.questions)? {
        let id = value["id"].as_str().context("question missing 'id'")?;
        let label = value["bin"].as_str().context("question missing 'bin'")?;
        let bin = SimilarityBin::ALL
            .into_iter()
            .find(|b| b.label() == label)
            .with_context(|| format!("unknown bin '{label}'"))?;
        bins.insert(id.to_string(), bin);
    }

    let mut question_responses = Vec::new();
    for value in read_jsonl_values(&args.responses)? {
        let question_id = value["question_id"]
            .as_str()
            .context("record missing 'question_id'")?
            .to_string();
        let question = value["question"]
            .as_str()
            .context("record missing 'question'")?
            .to_string();
        let map: BTreeMap<String, String> =
            serde_json::from_value(value["responses"].clone())
                .context("record missing 'responses' map")?;
        question_responses.push(QuestionResponses {
            question_id,
            question,
            responses: map.into_iter().collect(),
        });
    }

    let client = build_client(common)?;
    let scored = run_judging(&question_responses, &client, common.seed, args.retries)?;

    let mut lines = String::new();
    for s in &scored {
        let record = serde_json::json!({
            "question_id": s.question_id,
            "model": s.model,
            "grammar": s.scores.grammar,
            "coherence": s.scores.coherence,
            "specificity": s.scores.specificity,
        });
        lines.push_str(&record.to_string());
        lines.push('\n');
    }
    write_artifact(&dir, "scores.jsonl", &lines)?;

    let report = aggregate(&scored, &bins)?;
    write_artifact(&dir, "report.csv", &report.to_csv())?;
    print!("{}", report.to_table().to_text());
    Ok(())
}
