//! Question-set generation: prompt with sampled examples, deduplicate by
//! similarity, and bin survivors by their maximum similarity to the
//! instruction-tuning reference sets.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::llmclient::{CompletionRequest, LlmClient};
use crate::report::Table;
use crate::seeding::seeded_rng;
use crate::simplify::{build_prompt, PromptTemplate};
use crate::templates;

use super::{BenchError, Embedder};

/// Generation and deduplication parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvalGenConfig {
    /// Number of generation calls.
    pub iterations: usize,
    /// Examples sampled into each prompt.
    pub examples_per_prompt: usize,
    /// Questions requested per call.
    pub questions_per_call: usize,
    /// Questions more similar than this to a kept one are dropped.
    pub similarity_threshold: f64,
    /// Separator the model is told to place between questions.
    pub delimiter: String,
    pub seed: u64,
}

impl Default for EvalGenConfig {
    fn default() -> Self {
        EvalGenConfig {
            iterations: 50,
            examples_per_prompt: 10,
            questions_per_call: 50,
            similarity_threshold: 0.876,
            delimiter: "<sep>".to_string(),
            seed: 0,
        }
    }
}

impl EvalGenConfig {
    pub fn validate(&self) -> Result<(), BenchError> {
        if !(self.similarity_threshold > 0.0 && self.similarity_threshold < 1.0) {
            return Err(BenchError::BadThreshold(self.similarity_threshold));
        }
        for (name, value) in [
            ("examples_per_prompt", self.examples_per_prompt),
            ("questions_per_call", self.questions_per_call),
        ] {
            if value < 1 {
                return Err(BenchError::BadConfig { name, value });
            }
        }
        Ok(())
    }
}

/// A non-fatal irregularity in one generation call.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenWarning {
    pub iteration: usize,
    pub message: String,
}

/// Raw generation output: questions in call order plus warnings.
#[derive(Debug, Clone, Default)]
pub struct QuestionBatch {
    pub questions: Vec<String>,
    pub warnings: Vec<GenWarning>,
}

/// Run the generation loop: each call prompts with freshly sampled
/// examples and requests a fixed number of delimiter-separated questions.
/// Malformed or failed calls are recorded as warnings; parsed questions
/// are kept in call order.
pub fn generate_questions(
    bank: &[String],
    client: &LlmClient,
    config: &EvalGenConfig,
) -> Result<QuestionBatch, BenchError> {
    config.validate()?;
    if bank.len() < config.examples_per_prompt {
        return Err(BenchError::BankTooSmall {
            need: config.examples_per_prompt,
            got: bank.len(),
        });
    }
    let template = PromptTemplate::new("eval-generation", None, templates::EVAL_GENERATION);
    let mut rng = seeded_rng(config.seed, "evalgen:examples");
    let mut batch = QuestionBatch::default();

    for iteration in 0..config.iterations {
        let mut indices: Vec<usize> = (0..bank.len()).collect();
        indices.shuffle(&mut rng);
        let examples: Vec<&str> = indices[..config.examples_per_prompt]
            .iter()
            .map(|&i| bank[i].as_str())
            .collect();
        let values = std::collections::BTreeMap::from([
            ("n_q".to_string(), config.questions_per_call.to_string()),
            ("delimiter".to_string(), config.delimiter.clone()),
            ("examples".to_string(), examples.join("\n")),
        ]);
        let prompt = build_prompt(&template, &values)?;
        // the iteration index keys the cache so repeated prompts still
        // make distinct calls
        let request = CompletionRequest::new(prompt).with_attempt(iteration as u32);
        let raw = match client.complete(&request) {
            Ok(raw) => raw,
            Err(e) => {
                batch.warnings.push(GenWarning {
                    iteration,
                    message: format!("generation call failed: {e}"),
                });
                continue;
            }
        };
        let questions: Vec<String> = raw
            .split(&config.delimiter)
            .map(str::trim)
            .filter(|q| !q.is_empty())
            .map(str::to_string)
            .collect();
        if questions.len() != config.questions_per_call {
            batch.warnings.push(GenWarning {
                iteration,
                message: format!(
                    "expected {} questions, parsed {}",
                    config.questions_per_call,
                    questions.len()
                ),
            });
        }
        batch.questions.extend(questions);
    }
    Ok(batch)
}

/// Greedy deduplication in list order: a question is kept iff its
/// similarity to every already-kept question is at most the threshold.
pub fn dedup_questions(
    raw: &[String],
    embedder: &dyn Embedder,
    threshold: f64,
) -> Result<Vec<String>, BenchError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(BenchError::BadThreshold(threshold));
    }
    let mut kept: Vec<String> = Vec::new();
    for question in raw {
        let duplicate = kept
            .iter()
            .any(|k| embedder.similarity(k, question) > threshold);
        if !duplicate {
            kept.push(question.clone());
        }
    }
    Ok(kept)
}

/// The four similarity ranges, half-open on the left bound and closed at
/// the top.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SimilarityBin {
    /// [0, 0.7)
    Low,
    /// [0.7, 0.8)
    Mid,
    /// [0.8, 0.9)
    High,
    /// [0.9, 1.0]
    Top,
}

impl SimilarityBin {
    pub const ALL: [SimilarityBin; 4] = [
        SimilarityBin::Low,
        SimilarityBin::Mid,
        SimilarityBin::High,
        SimilarityBin::Top,
    ];

    pub fn from_similarity(value: f64) -> SimilarityBin {
        if value < 0.7 {
            SimilarityBin::Low
        } else if value < 0.8 {
            SimilarityBin::Mid
        } else if value < 0.9 {
            SimilarityBin::High
        } else {
            SimilarityBin::Top
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SimilarityBin::Low => "0-0.7",
            SimilarityBin::Mid => "0.7-0.8",
            SimilarityBin::High => "0.8-0.9",
            SimilarityBin::Top => "0.9-1",
        }
    }
}

/// A deduplicated question with its similarity profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalQuestion {
    pub text: String,
    /// Max similarity to the revised instruction set.
    pub max_sim_revised: f64,
    /// Max similarity to the original instruction set.
    pub max_sim_original: f64,
    pub bin: SimilarityBin,
}

/// Bin counts; always partitions the question total.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BinReport {
    pub counts: [usize; 4],
}

impl BinReport {
    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    pub fn to_csv(&self) -> String {
        let mut table = Table::new(vec!["bin".to_string(), "count".to_string()]);
        for (bin, count) in SimilarityBin::ALL.iter().zip(self.counts) {
            table.push_row(vec![bin.label().to_string(), count.to_string()]);
        }
        table.to_csv()
    }
}

/// Compute each question's maximum similarity against both reference
/// sets; the bin comes from the overall maximum.
pub fn bin_by_similarity(
    questions: &[String],
    revised_reference: &[String],
    original_reference: &[String],
    embedder: &dyn Embedder,
) -> Result<(Vec<EvalQuestion>, BinReport), BenchError> {
    if revised_reference.is_empty() {
        return Err(BenchError::EmptyReferenceSet("revised instruct"));
    }
    if original_reference.is_empty() {
        return Err(BenchError::EmptyReferenceSet("original instruct"));
    }
    let max_sim = |q: &str, set: &[String]| {
        set.iter()
            .map(|r| embedder.similarity(q, r))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let mut out = Vec::with_capacity(questions.len());
    let mut report = BinReport::default();
    for question in questions {
        let max_sim_revised = max_sim(question, revised_reference);
        let max_sim_original = max_sim(question, original_reference);
        let bin = SimilarityBin::from_similarity(max_sim_revised.max(max_sim_original));
        report.counts[SimilarityBin::ALL.iter().position(|b| *b == bin).expect("bin")] += 1;
        out.push(EvalQuestion {
            text: question.clone(),
            max_sim_revised,
            max_sim_original,
            bin,
        });
    }
    Ok((out, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::benchgen::{FnEmbedder, TokenOverlapEmbedder};
    use crate::llmclient::FnBackend;
    use std::sync::Arc;

    fn bank(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("Example question {i}?")).collect()
    }

    fn fixed_client(questions_per_call: usize, delimiter: &str) -> LlmClient {
        let delimiter = delimiter.to_string();
        LlmClient::new(Arc::new(FnBackend::new(move |req: &CompletionRequest| {
            let call = req.params.attempt;
            let qs: Vec<String> = (0..questions_per_call)
                .map(|i| format!("Generated question {call}-{i}?"))
                .collect();
            Ok(qs.join(&delimiter))
        })))
    }

    #[test]
    fn mock_trace_two_calls_three_questions() {
        let config = EvalGenConfig {
            iterations: 2,
            examples_per_prompt: 3,
            questions_per_call: 3,
            ..EvalGenConfig::default()
        };
        let client = fixed_client(3, &config.delimiter);
        let batch = generate_questions(&bank(5), &client, &config).unwrap();
        assert_eq!(batch.questions.len(), 6);
        assert!(batch.warnings.is_empty());
        assert_eq!(batch.questions[0], "Generated question 0-0?");
        assert_eq!(batch.questions[5], "Generated question 1-2?");
    }

    #[test]
    fn zero_iterations_yield_nothing() {
        let config = EvalGenConfig {
            iterations: 0,
            examples_per_prompt: 2,
            ..EvalGenConfig::default()
        };
        let client = fixed_client(1, &config.delimiter);
        let batch = generate_questions(&bank(3), &client, &config).unwrap();
        assert!(batch.questions.is_empty());
    }

    #[test]
    fn default_budget_is_2500_questions() {
        let config = EvalGenConfig::default();
        assert_eq!(config.iterations * config.questions_per_call, 2500);
    }

    #[test]
    fn short_responses_warn_but_keep_parsed() {
        let config = EvalGenConfig {
            iterations: 1,
            examples_per_prompt: 2,
            questions_per_call: 5,
            ..EvalGenConfig::default()
        };
        let client = fixed_client(2, &config.delimiter);
        let batch = generate_questions(&bank(4), &client, &config).unwrap();
        assert_eq!(batch.questions.len(), 2);
        assert_eq!(batch.warnings.len(), 1);
        assert!(batch.warnings[0].message.contains("expected 5"));
    }

    #[test]
    fn small_bank_is_rejected() {
        let config = EvalGenConfig {
            examples_per_prompt: 10,
            ..EvalGenConfig::default()
        };
        let client = fixed_client(1, &config.delimiter);
        assert!(matches!(
            generate_questions(&bank(3), &client, &config),
            Err(BenchError::BankTooSmall { need: 10, got: 3 })
        ));
    }

    #[test]
    fn exact_duplicates_are_dropped() {
        let raw = vec!["What is a cat?".to_string(), "What is a cat?".to_string()];
        let kept = dedup_questions(&raw, &TokenOverlapEmbedder, 0.876).unwrap();
        assert_eq!(kept.len(), 1);
    }

    #[test]
    fn orthogonal_questions_all_survive() {
        let raw = vec!["alpha one".to_string(), "beta two".to_string(), "gamma three".to_string()];
        let embedder = FnEmbedder(|_: &str, _: &str| 0.0);
        let kept = dedup_questions(&raw, &embedder, 0.876).unwrap();
        assert_eq!(kept.len(), 3);
    }

    #[test]
    fn greedy_pass_keeps_first_of_each_cluster() {
        // sims: (q1,q2)=0.9, (q1,q3)=0.5, (q2,q3)=0.9 -> keep {q1, q3}
        let raw = vec!["q1".to_string(), "q2".to_string(), "q3".to_string()];
        let embedder = FnEmbedder(|a: &str, b: &str| {
            match (a, b) {
                ("q1", "q2") | ("q2", "q1") => 0.9,
                ("q1", "q3") | ("q3", "q1") => 0.5,
                ("q2", "q3") | ("q3", "q2") => 0.9,
                _ => 1.0,
            }
        });
        let kept = dedup_questions(&raw, &embedder, 0.876).unwrap();
        assert_eq!(kept, vec!["q1".to_string(), "q3".to_string()]);
    }

    #[test]
    fn dedup_soundness_no_kept_pair_above_threshold() {
        let raw: Vec<String> = (0..30)
            .map(|i| format!("question about topic {} number {i}", i % 5))
            .collect();
        let kept = dedup_questions(&raw, &TokenOverlapEmbedder, 0.5).unwrap();
        for i in 0..kept.len() {
            for j in (i + 1)..kept.len() {
                let sim = token_overlap(&kept[i], &kept[j]);
                assert!(sim <= 0.5, "{} vs {} = {sim}", kept[i], kept[j]);
            }
        }
    }

    fn token_overlap(a: &str, b: &str) -> f64 {
        crate::benchgen::token_overlap_similarity(a, b)
    }

    #[test]
    fn bin_boundaries_are_half_open() {
        assert_eq!(SimilarityBin::from_similarity(0.75), SimilarityBin::Mid);
        assert_eq!(SimilarityBin::from_similarity(0.7), SimilarityBin::Mid);
        assert_eq!(SimilarityBin::from_similarity(0.8), SimilarityBin::High);
        assert_eq!(SimilarityBin::from_similarity(0.9), SimilarityBin::Top);
        assert_eq!(SimilarityBin::from_similarity(1.0), SimilarityBin::Top);
        assert_eq!(SimilarityBin::from_similarity(0.0), SimilarityBin::Low);
        assert_eq!(SimilarityBin::from_similarity(-0.3), SimilarityBin::Low);
    }

    #[test]
    fn bins_partition_the_total_and_use_the_overall_max() {
        let questions = vec!["q one".to_string(), "q two".to_string()];
        let revised = vec!["r".to_string()];
        let original = vec!["o".to_string()];
        let embedder = FnEmbedder(|a: &str, b: &str| match (a, b) {
            ("q one", "r") => 0.75,
            ("q one", "o") => 0.3,
            ("q two", "r") => 0.2,
            ("q two", "o") => 0.95,
            _ => 0.0,
        });
        let (qs, report) = bin_by_similarity(&questions, &revised, &original, &embedder).unwrap();
        assert_eq!(qs[0].bin, SimilarityBin::Mid);
        assert_eq!(qs[1].bin, SimilarityBin::Top);
        assert_eq!(report.total(), 2);
        assert_eq!(report.counts, [0, 1, 0, 1]);
        let csv = report.to_csv();
        assert!(csv.contains("0.7-0.8,1"));
    }

    #[test]
    fn empty_reference_sets_are_rejected() {
        let questions = vec!["q".to_string()];
        assert!(matches!(
            bin_by_similarity(&questions, &[], &["o".to_string()], &TokenOverlapEmbedder),
            Err(BenchError::EmptyReferenceSet("revised instruct"))
        ));
    }

    #[test]
    fn generation_is_seed_deterministic() {
        let config = EvalGenConfig {
            iterations: 3,
            examples_per_prompt: 2,
            questions_per_call: 2,
            ..EvalGenConfig::default()
        };
        let run = || {
            let client = fixed_client(2, &config.delimiter);
            generate_questions(&bank(6), &client, &config).unwrap().questions
        };
        assert_eq!(run(), run());
    }
}
