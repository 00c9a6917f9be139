//! Benchmark builders: the revise-verify-retain loop for classification
//! tasks and the generate-dedup-bin pipeline for evaluation questions.

mod embed;
mod evalgen;
mod glue;

pub use embed::{token_overlap_similarity, Embedder, FnEmbedder, TokenOverlapEmbedder};
pub use evalgen::{
    bin_by_similarity, dedup_questions, generate_questions, BinReport, EvalGenConfig,
    EvalQuestion, GenWarning, QuestionBatch, SimilarityBin,
};
pub use glue::{
    build_benchmark, split_validation, task_registry, BuildReport, CoverageError, GlueBuildConfig,
    GlueItem, GlueStatus, GlueTaskSpec, RoundRecord,
};

use thiserror::Error;

use crate::llmclient::ClientError;
use crate::simplify::SimplifyError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown task '{0}'")]
    UnknownTask(String),
    #[error("task '{task}' expects {expected} input fields, item '{item}' has {got}")]
    FieldCount {
        task: String,
        item: String,
        expected: usize,
        got: usize,
    },
    #[error("need at least 2 items to split, got {0}")]
    TooFewItems(usize),
    #[error("question bank has {got} items, need at least {need} examples per prompt")]
    BankTooSmall { need: usize, got: usize },
    #[error("similarity threshold {0} outside (0,1)")]
    BadThreshold(f64),
    #[error("config value {name} must be >= 1, got {value}")]
    BadConfig { name: &'static str, value: usize },
    #[error("reference set '{0}' is empty")]
    EmptyReferenceSet(&'static str),
    #[error(transparent)]
    Coverage(Box<CoverageError>),
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Template(#[from] SimplifyError),
}
