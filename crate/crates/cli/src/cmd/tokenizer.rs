//! tokenizer command: train, optionally substitute specials, save.

use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use curator_core::corpus::{self, Genre, Split};
use curator_core::tokenizer::{save_vocab, train_bpe};

use crate::CommonArgs;

use super::common::prepare_out_dir;

#[derive(Debug, Args)]
pub struct TokenizerArgs {
    /// Training corpus (JSONL documents).
    #[arg(long)]
    pub input: PathBuf,
    /// Vocabulary cap, byte alphabet included.
    #[arg(long, default_value_t = 2000)]
    pub target_size: usize,
    /// Special token names replacing the least frequent tokens.
    #[arg(long, value_delimiter = ',')]
    pub specials: Vec<String>,
}

pub fn run(common: &CommonArgs, args: &TokenizerArgs) -> Result<()> {
    let dir = prepare_out_dir(
        common,
        "tokenizer",
        serde_json::json!({
            "input": args.input,
            "target_size": args.target_size,
            "specials": args.specials,
        }),
    )?;
    let collection = corpus::ingest(&args.input, Genre::Web, Split::Train)?;
    let mut vocab = train_bpe(&collection, args.target_size)?;
    if !args.specials.is_empty() {
        vocab = vocab.substitute_special(&args.specials)?;
        for replaced in vocab.replaced() {
            println!(
                "replaced token {} (frequency {}) with {}",
                replaced.id, replaced.frequency, replaced.special
            );
        }
    }
    let vocab_dir = dir.join("vocab");
    save_vocab(&vocab, &vocab_dir)?;
    println!(
        "trained {} tokens ({} merges) -> {}",
        vocab.len(),
        vocab.merges().len(),
        vocab_dir.display()
    );
    Ok(())
}
