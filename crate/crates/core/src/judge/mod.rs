//! LLM-judged scoring of instruction-following generations: response
//! shuffling to counter position bias, the tab-separated score format,
//! and report aggregation.

mod aggregate;
mod parse;
mod shuffle;

pub use aggregate::{aggregate, JudgeReport, ModelSummary, ScoredResponse};
pub use parse::{parse_scores, render_scores, ScoreTriple};
pub use shuffle::{shuffle_and_label, JudgeBatch, LabeledGeneration};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::benchgen::SimilarityBin;
use crate::llmclient::{ClientError, CompletionRequest, LlmClient};
use crate::simplify::{build_prompt, PromptTemplate, SimplifyError};
use crate::templates;

#[derive(Debug, Error)]
pub enum JudgeError {
    #[error("{0} generations exceed the 26 label letters")]
    TooManyGenerations(usize),
    #[error("no generations to judge")]
    NoGenerations,
    #[error("score line {line_no} malformed: {reason} (line: {content:?})")]
    ParseLine {
        line_no: usize,
        content: String,
        reason: String,
    },
    #[error("empty judge response")]
    EmptyResponse,
    #[error("duplicate label '{0}' in judge response")]
    DuplicateLabel(char),
    #[error("score {0} outside 0..=5")]
    ScoreOutOfRange(u32),
    #[error("judge covered labels {got:?}, expected {expected:?}")]
    LabelMismatch { expected: Vec<char>, got: Vec<char> },
    #[error("no similarity bin recorded for question '{0}'")]
    MissingBin(String),
    #[error("judging question '{question}' failed after {attempts} attempts: {last}")]
    JudgingFailed {
        question: String,
        attempts: u32,
        last: String,
    },
    #[error(transparent)]
    Client(#[from] ClientError),
    #[error(transparent)]
    Template(#[from] SimplifyError),
}

/// All models' responses to one benchmark question.
#[derive(Debug, Clone)]
pub struct QuestionResponses {
    pub question_id: String,
    pub question: String,
    /// (model tag, generated text) pairs.
    pub responses: Vec<(String, String)>,
}

/// Judge every question with one comparative call covering all models,
/// shuffling response order per question under the seed. A response that
/// does not cover exactly the shuffled labels is retried with a fresh
/// attempt counter before failing.
pub fn run_judging(
    questions: &[QuestionResponses],
    client: &LlmClient,
    seed: u64,
    max_attempts: u32,
) -> Result<Vec<ScoredResponse>, JudgeError> {
    let template = PromptTemplate::new("judge-eval", None, templates::JUDGE_EVAL);
    let mut scored = Vec::new();
    for (q_idx, entry) in questions.iter().enumerate() {
        let batch = shuffle_and_label(
            &entry.question_id,
            &entry.responses,
            crate::seeding::derive_seed(seed, &format!("judge:{q_idx}")),
        )?;
        let rendered: String = batch
            .labeled
            .iter()
            .map(|g| format!("###{}\n{}\n", g.label, g.text))
            .collect::<Vec<_>>()
            .join("\n");
        let values = BTreeMap::from([
            ("question".to_string(), entry.question.clone()),
            ("generations".to_string(), rendered),
        ]);
        let prompt = build_prompt(&template, &values)?;
        let expected: Vec<char> = batch.labeled.iter().map(|g| g.label).collect();

        let mut last_err = String::new();
        let mut done = false;
        for attempt in 0..max_attempts {
            let raw =
                client.complete(&CompletionRequest::new(prompt.clone()).with_attempt(attempt))?;
            match parse_scores(&raw) {
                Ok(scores) => {
                    let got: Vec<char> = scores.keys().copied().collect();
                    if got != expected {
                        last_err = JudgeError::LabelMismatch {
                            expected: expected.clone(),
                            got,
                        }
                        .to_string();
                        continue;
                    }
                    for (label, triple) in scores {
                        let model = batch.model_for(label).expect("label covered");
                        scored.push(ScoredResponse {
                            question_id: entry.question_id.clone(),
                            model: model.to_string(),
                            scores: triple,
                        });
                    }
                    done = true;
                    break;
                }
                Err(e) => last_err = e.to_string(),
            }
        }
        if !done {
            return Err(JudgeError::JudgingFailed {
                question: entry.question_id.clone(),
                attempts: max_attempts,
                last: last_err,
            });
        }
    }
    Ok(scored)
}

/// Bin lookup used by aggregation.
pub type QuestionBins = BTreeMap<String, SimilarityBin>;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llmclient::FnBackend;
    use std::sync::Arc;

    fn questions() -> Vec<QuestionResponses> {
        vec![QuestionResponses {
            question_id: "q1".to_string(),
            question: "What do cats eat?".to_string(),
            responses: vec![
                ("model-a".to_string(), "Cats eat fish.".to_string()),
                ("model-b".to_string(), "fish fish fish".to_string()),
            ],
        }]
    }

    #[test]
    fn judging_scores_all_models_through_the_shuffle() {
        let backend = Arc::new(FnBackend::new(|req: &CompletionRequest| {
            // score whichever label carries the well-formed sentence higher
            let a_text = req
                .prompt
                .split("###A\n")
                .nth(1)
                .and_then(|s| s.lines().next())
                .unwrap_or("");
            let (a, b) = if a_text.contains("Cats eat fish.") {
                ("A. 5\t4\t5", "B. 2\t1\t2")
            } else {
                ("A. 2\t1\t2", "B. 5\t4\t5")
            };
            Ok(format!("{a}\n{b}"))
        }));
        let client = LlmClient::new(backend);
        let scored = run_judging(&questions(), &client, 9, 3).unwrap();
        assert_eq!(scored.len(), 2);
        let good = scored.iter().find(|s| s.model == "model-a").unwrap();
        assert_eq!(good.scores.sum(), 14);
        let bad = scored.iter().find(|s| s.model == "model-b").unwrap();
        assert_eq!(bad.scores.sum(), 5);
    }

    #[test]
    fn partial_label_coverage_fails_after_retries() {
        let backend = Arc::new(FnBackend::new(|_req: &CompletionRequest| {
            Ok("A. 3\t3\t3".to_string())
        }));
        let client = LlmClient::new(backend);
        let err = run_judging(&questions(), &client, 9, 2).unwrap_err();
        match err {
            JudgeError::JudgingFailed { attempts, last, .. } => {
                assert_eq!(attempts, 2);
                assert!(last.contains("expected"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }
}
