//! entropy and complexity commands.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use curator_core::analysis::{
    complexity_report, corpus_entropy_table, count_ngrams_streams, pseudo_complexity_streams,
};
use curator_core::corpus::{self, Genre, Split};
use curator_core::report::Table;

use crate::CommonArgs;

use super::common::{prepare_out_dir, write_artifact};

#[derive(Debug, Args)]
pub struct EntropyArgs {
    /// Corpus to analyze (JSONL documents).
    #[arg(long)]
    pub input: PathBuf,
    /// Comma-separated n-gram orders.
    #[arg(long, value_delimiter = ',', default_values_t = [1usize, 2, 3])]
    pub orders: Vec<usize>,
}

pub fn entropy(common: &CommonArgs, args: &EntropyArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "entropy",
        serde_json::json!({ "input": args.input, "orders": args.orders }),
    )?;
    let collection = corpus::ingest(&args.input, Genre::Web, Split::Train)?;
    let report = corpus_entropy_table(&collection, &args.orders)?;
    let table = report.to_table();
    print!("{}", table.to_text());
    write_artifact(&dir, "entropy.csv", &table.to_csv())?;
    Ok(())
}

#[derive(Debug, Args)]
pub struct ComplexityArgs {
    /// Corpus to analyze (JSONL documents).
    #[arg(long)]
    pub input: PathBuf,
    /// Also compute pseudo-complexity for this context window length.
    #[arg(long)]
    pub window: Option<usize>,
}

pub fn complexity(common: &CommonArgs, args: &ComplexityArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "complexity",
        serde_json::json!({ "input": args.input, "window": args.window }),
    )?;
    let collection = corpus::ingest(&args.input, Genre::Web, Split::Train)?;
    let tokenized: Vec<Vec<String>> = collection
        .iter()
        .map(|d| d.text.split_whitespace().map(str::to_string).collect())
        .collect();
    let unigrams =
        count_ngrams_streams(tokenized.iter().map(|t| t.as_slice()), 1)?;
    let report = complexity_report(&unigrams)?;

    let mut table = Table::new(vec!["quantity".to_string(), "nats".to_string()]);
    table.push_row(vec!["log_complexity".to_string(), format!("{:.6}", report.log_c_exact)]);
    table.push_row(vec!["lower_bound".to_string(), format!("{:.6}", report.lower)]);
    table.push_row(vec!["upper_bound".to_string(), format!("{:.6}", report.upper)]);
    table.push_row(vec!["constant_term".to_string(), format!("{:.6}", report.c_const)]);
    table.push_row(vec!["tokens".to_string(), report.total.to_string()]);
    table.push_row(vec!["vocabulary".to_string(), report.distinct.to_string()]);

    if let Some(window) = args.window {
        // windows never cross document boundaries
        let r = pseudo_complexity_streams(tokenized.iter().map(|t| t.as_slice()), window)?;
        table.push_row(vec!["window_len".to_string(), window.to_string()]);
        table.push_row(vec!["window_count".to_string(), r.window_count.to_string()]);
        table.push_row(vec!["pseudo_log_sum".to_string(), format!("{:.6}", r.log_sum)]);
        table.push_row(vec!["pseudo_lower".to_string(), format!("{:.6}", r.lower)]);
    }

    print!("{}", table.to_text());
    write_artifact(&dir, "complexity.csv", &table.to_csv())?;
    Ok(())
}
