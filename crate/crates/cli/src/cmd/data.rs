//! ingest, sample, and stats commands.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use curator_core::corpus::{
    self, CompositionSpec, DifficultyPartition, Genre, Split,
};

use crate::CommonArgs;

use super::common::{prepare_out_dir, write_artifact};

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// JSONL file of {id, text} records.
    #[arg(long)]
    pub input: PathBuf,
    /// Default genre for records without one.
    #[arg(long, default_value = "web")]
    pub genre: Genre,
    /// Default split for records without one.
    #[arg(long, default_value = "train")]
    pub split: Split,
}

pub fn ingest(common: &CommonArgs, args: &IngestArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "ingest",
        serde_json::json!({
            "input": args.input,
            "genre": args.genre,
            "split": args.split,
        }),
    )?;
    let collection = corpus::ingest(&args.input, args.genre, args.split)?;
    collection.write_jsonl(dir.join("documents.jsonl"))?;
    println!(
        "ingested {} documents, {} tokens -> {}",
        collection.len(),
        collection.total_tokens(),
        dir.join("documents.jsonl").display()
    );
    Ok(())
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Source corpus (JSONL documents).
    #[arg(long)]
    pub input: PathBuf,
    /// Composition spec JSON: {"total_tokens": N, "fractions": {genre: f}}.
    #[arg(long)]
    pub spec: PathBuf,
    /// Optional difficulty partitions JSON (list of partitions).
    #[arg(long)]
    pub partitions: Option<PathBuf>,
}

pub fn sample(common: &CommonArgs, args: &SampleArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "sample",
        serde_json::json!({
            "input": args.input,
            "spec": args.spec,
            "partitions": args.partitions,
        }),
    )?;
    let collection = corpus::ingest(&args.input, Genre::Web, Split::Train)?;
    let spec_text = fs::read_to_string(&args.spec)
        .with_context(|| format!("reading {}", args.spec.display()))?;
    let spec: CompositionSpec = serde_json::from_str(&spec_text)
        .with_context(|| format!("parsing {}", args.spec.display()))?;
    let partitions: BTreeMap<Genre, DifficultyPartition> = match &args.partitions {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            let list: Vec<DifficultyPartition> = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            list.into_iter().map(|p| (p.genre, p)).collect()
        }
        None => BTreeMap::new(),
    };
    let sampled = corpus::sample_composition(&collection, &spec, &partitions, common.seed)?;
    sampled.write_jsonl(dir.join("sampled.jsonl"))?;
    for (genre, fraction) in &spec.fractions {
        let tokens = sampled.genre_tokens(*genre);
        let target = (spec.total_tokens as f64 * fraction).round() as u64;
        println!("{genre}: {tokens} tokens (target {target})");
    }
    println!("wrote {}", dir.join("sampled.jsonl").display());
    Ok(())
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Corpus to summarize (JSONL documents).
    #[arg(long)]
    pub input: PathBuf,
    /// Report in millions of tokens instead of raw counts.
    #[arg(long)]
    pub millions: bool,
}

pub fn stats(common: &CommonArgs, args: &StatsArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "stats",
        serde_json::json!({ "input": args.input, "millions": args.millions }),
    )?;
    let collection = corpus::ingest(&args.input, Genre::Web, Split::Train)?;
    let stats = curator_core::analysis::corpus_stats(&collection);
    let table = if args.millions {
        stats.to_table_millions()
    } else {
        stats.to_table()
    };
    print!("{}", table.to_text());
    write_artifact(&dir, "stats.csv", &table.to_csv())?;
    Ok(())
}
