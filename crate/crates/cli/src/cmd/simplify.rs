//! simplify command: LLM-revise a corpus with the bundled prompts.

use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use curator_core::corpus::{self, Document, DocumentCollection, Genre, Split};
use curator_core::simplify::{
    lint_world_simplification, revise_corpus, NameTables, RevisionConfig, RevisionStatus,
};
use curator_core::templates;

use crate::CommonArgs;

use super::common::{build_client, prepare_out_dir, write_artifact};

#[derive(Debug, Args)]
pub struct SimplifyArgs {
    /// Corpus to revise (JSONL documents).
    #[arg(long)]
    pub input: PathBuf,
    /// Directory of per-genre template overrides (<genre>.txt).
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Revision window in whitespace tokens.
    #[arg(long, default_value_t = 1500)]
    pub max_units: usize,
    /// Attempts per chunk before marking it failed.
    #[arg(long, default_value_t = 3)]
    pub retries: u32,
    /// Genres to revise; others pass through unchanged.
    #[arg(long, value_delimiter = ',')]
    pub genres: Vec<Genre>,
    /// Run the world-setting lint over revised text.
    #[arg(long)]
    pub lint: bool,
}

pub fn run(common: &CommonArgs, args: &SimplifyArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "simplify",
        serde_json::json!({
            "input": args.input,
            "templates": args.templates,
            "max_units": args.max_units,
            "retries": args.retries,
            "genres": args.genres,
            "lint": args.lint,
        }),
    )?;
    let collection = corpus::ingest(&args.input, Genre::Web, Split::Train)?;
    let templates = match &args.templates {
        Some(path) => templates::load_revision_templates(path)?,
        None => templates::builtin_revision_templates(),
    };
    let client = build_client(common)?;
    let config = RevisionConfig {
        max_units: args.max_units,
        max_attempts: args.retries,
        joiner: "\n\n".to_string(),
        workers: common.workers,
    };

    // Math is excluded by default: problems and solutions stay as-is.
    let selected: Vec<Genre> = if args.genres.is_empty() {
        Genre::ALL.iter().copied().filter(|g| *g != Genre::Math).collect()
    } else {
        args.genres.clone()
    };
    let to_revise = DocumentCollection::from_documents(
        collection
            .iter()
            .filter(|d| selected.contains(&d.genre))
            .cloned()
            .collect(),
    )
    .context("filtering revision genres")?;

    let results = revise_corpus(&to_revise, &templates, &client, &config)
        .map_err(|e| anyhow::anyhow!("{e}"))?;

    let mut revised_docs = Vec::with_capacity(collection.len());
    let mut log_lines = String::new();
    let tables = NameTables::default();
    for doc in &collection {
        let result = results.iter().find(|r| r.doc_id == doc.id);
        let (text, status) = match result {
            Some(r) if r.status != RevisionStatus::Failed => {
                (r.revised_full.clone(), format!("{:?}", r.status))
            }
            Some(r) => (doc.text.clone(), format!("{:?}", r.status)),
            None => (doc.text.clone(), "Skipped".to_string()),
        };
        let lint_flags = if args.lint && result.is_some() {
            lint_world_simplification(&text, &tables).flags.len()
        } else {
            0
        };
        log_lines.push_str(
            &serde_json::json!({
                "id": doc.id,
                "status": status,
                "chunks": result.map(|r| r.chunks.len()).unwrap_or(0),
                "lint_flags": lint_flags,
            })
            .to_string(),
        );
        log_lines.push('\n');
        revised_docs.push(Document::new(doc.id.clone(), doc.genre, doc.split, text));
    }
    let revised = DocumentCollection::from_documents(revised_docs)?;
    revised.write_jsonl(dir.join("revised.jsonl"))?;
    write_artifact(&dir, "revision_log.jsonl", &log_lines)?;

    let ok = results
        .iter()
        .filter(|r| r.status == RevisionStatus::Ok)
        .count();
    println!(
        "revised {}/{} documents cleanly -> {}",
        ok,
        results.len(),
        dir.join("revised.jsonl").display()
    );
    Ok(())
}
