//! Command-line entry point wiring all pipeline stages.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage error. Every run
//! writes its resolved configuration next to its outputs, so a run can
//! be reproduced from the artifact directory alone.

mod cmd;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "curator",
    version,
    about = "Corpus curation, analytics, tokenizer, and curriculum training toolkit"
)]
struct Cli {
    #[command(flatten)]
    common: CommonArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Root seed; every stage derives its own labeled stream from it.
    #[arg(long, global = true, default_value_t = 65)]
    pub seed: u64,
    /// Artifact directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Completion backend: "real" (credentials from LLM_API_KEY) or
    /// "mock:<script.jsonl>".
    #[arg(long, global = true, default_value = "real")]
    pub client: String,
    /// Response cache directory; omit to disable caching.
    #[arg(long, global = true)]
    pub cache_dir: Option<PathBuf>,
    /// Worker budget for parallelizable stages.
    #[arg(long, global = true, default_value_t = 1)]
    pub workers: usize,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Read a JSONL file of {id, text} records into the document format.
    Ingest(cmd::data::IngestArgs),
    /// Sample a corpus to a target genre composition.
    Sample(cmd::data::SampleArgs),
    /// Revise documents with an LLM following the simplification prompts.
    Simplify(cmd::simplify::SimplifyArgs),
    /// Token totals by genre and split.
    Stats(cmd::data::StatsArgs),
    /// N-gram entropy report by genre class.
    Entropy(cmd::analysis::EntropyArgs),
    /// Dataset complexity bounds, optionally with window partitioning.
    Complexity(cmd::analysis::ComplexityArgs),
    /// Train a capped BPE vocabulary, optionally substituting specials.
    Tokenizer(cmd::tokenizer::TokenizerArgs),
    /// Run curriculum strategies and emit the checkpoint grid.
    Curriculum(cmd::curriculum::CurriculumArgs),
    /// Build a simplified classification benchmark (revise-verify-retain).
    Glue(cmd::bench::GlueArgs),
    /// Generate, deduplicate, and bin evaluation questions.
    EvalGen(cmd::bench::EvalGenArgs),
    /// Judge model generations and aggregate the score report.
    Judge(cmd::bench::JudgeArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    // clap exits with status 2 on usage errors by itself
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Ingest(args) => cmd::data::ingest(&cli.common, args),
        Command::Sample(args) => cmd::data::sample(&cli.common, args),
        Command::Simplify(args) => cmd::simplify::run(&cli.common, args),
        Command::Stats(args) => cmd::data::stats(&cli.common, args),
        Command::Entropy(args) => cmd::analysis::entropy(&cli.common, args),
        Command::Complexity(args) => cmd::analysis::complexity(&cli.common, args),
        Command::Tokenizer(args) => cmd::tokenizer::run(&cli.common, args),
        Command::Curriculum(args) => cmd::curriculum::run(&cli.common, args),
        Command::Glue(args) => cmd::bench::glue(&cli.common, args),
        Command::EvalGen(args) => cmd::bench::eval_gen(&cli.common, args),
        Command::Judge(args) => cmd::bench::judge(&cli.common, args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
