//! Corpus curation and curriculum pre-training toolkit.
//!
//! The crate is organized around a data pipeline for training small language
//! models on simplified corpora:
//!
//! - [`corpus`]: document ingestion, genre-composition sampling, and
//!   difficulty-ranked partitioning of formal-language material.
//! - [`simplify`]: LLM-driven text revision — chunking, prompt templates,
//!   marker-delimited output parsing, and world-setting lint checks.
//! - [`analysis`]: n-gram entropy, dataset complexity and its bounds,
//!   pseudo-complexity under context-window partitioning, and the
//!   loss-to-accuracy bound.
//! - [`tokenizer`]: capped-vocabulary byte-level BPE with special-token
//!   substitution.
//! - [`learner`]: the trainable-learner contract plus a deterministic
//!   interpolated add-k n-gram reference learner.
//! - [`curriculum`]: difficulty metrics, the iterative pacing function,
//!   control strategies, and the experiment grid harness.
//! - [`benchgen`]: revise-verify-retain benchmark building and the
//!   generate-dedup-bin question pipeline.
//! - [`judge`]: response shuffling, score parsing, and report aggregation
//!   for LLM-judged generations.
//! - [`llmclient`]: completion interface with rate limiting, disk caching,
//!   and deterministic scripted mocks.

pub mod analysis;
pub mod benchgen;
pub mod corpus;
pub mod curriculum;
pub mod judge;
pub mod learner;
pub mod llmclient;
pub mod report;
pub mod seeding;
pub mod simplify;
pub mod templates;
pub mod tokenizer;
