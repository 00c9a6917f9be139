//! The revise-verify-retain loop for classification benchmarks.
//!
//! Each round revises every not-yet-retained item from its original text,
//! asks a verifier model to predict the label of the revision using the
//! numerical-label protocol, and retains the revision only when the
//! prediction matches the true label. Rounds repeat until the coverage
//! ratio is met or the round budget runs out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::llmclient::{CompletionRequest, LlmClient};
use crate::seeding::seeded_rng;
use crate::simplify::{build_prompt, PromptTemplate, END_MARKER};
use crate::templates;

use super::BenchError;

/// Static description of one classification task.
#[derive(Debug, Clone)]
pub struct GlueTaskSpec {
    pub name: &'static str,
    pub field_names: &'static [&'static str],
    pub description: &'static str,
    pub label_explanation: &'static str,
}

impl GlueTaskSpec {
    /// The input layout shown to both reviser and verifier.
    pub fn input_format(&self) -> String {
        self.field_names
            .iter()
            .map(|f| format!("{}: the {} text", f.to_uppercase(), f))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// The revision output layout: one edited section per field.
    pub fn revision_output_format(&self) -> String {
        self.field_names
            .iter()
            .map(|f| format!("EDITED {}: revised text here. {END_MARKER}", f.to_uppercase()))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// The verification output layout: one numerical label.
    pub fn verification_output_format(&self) -> String {
        format!("Your numerical label here. {END_MARKER}")
    }

    pub fn render_input(&self, fields: &[String]) -> String {
        self.field_names
            .iter()
            .zip(fields)
            .map(|(name, value)| format!("{}: {value}", name.to_uppercase()))
            .collect::<Vec<_>>()
            .join("\n")
    }

    /// Extract the per-field revisions from a raw completion.
    pub fn parse_revision(&self, raw: &str) -> Result<Vec<String>, BenchError> {
        let mut fields = Vec::with_capacity(self.field_names.len());
        let mut cursor = 0usize;
        for name in self.field_names {
            let header = format!("EDITED {}:", name.to_uppercase());
            let start = raw[cursor..]
                .find(&header)
                .map(|i| cursor + i + header.len())
                .ok_or_else(|| {
                    BenchError::Template(crate::simplify::SimplifyError::Parse {
                        reason: format!("missing \"{header}\""),
                        raw: raw.to_string(),
                    })
                })?;
            let end = raw[start..]
                .find(END_MARKER)
                .map(|i| start + i)
                .ok_or_else(|| {
                    BenchError::Template(crate::simplify::SimplifyError::Parse {
                        reason: format!("missing \"{END_MARKER}\" after \"{header}\""),
                        raw: raw.to_string(),
                    })
                })?;
            fields.push(raw[start..end].trim().to_string());
            cursor = end + END_MARKER.len();
        }
        Ok(fields)
    }
}

/// The supported tasks, keyed by canonical lowercase name.
pub fn task_registry() -> BTreeMap<&'static str, GlueTaskSpec> {
    let specs = [
        GlueTaskSpec {
            name: "cola",
            field_names: &["sentence"],
            description: "assessing the linguistic acceptability of a single sentence",
            label_explanation: "0 = the sentence is not grammatically acceptable, 1 = the sentence is grammatically acceptable",
        },
        GlueTaskSpec {
            name: "sst2",
            field_names: &["sentence"],
            description: "classifying the sentiment of a sentence",
            label_explanation: "0 = the sentence expresses a negative sentiment, 1 = the sentence expresses a positive sentiment",
        },
        GlueTaskSpec {
            name: "mrpc",
            field_names: &["sentence1", "sentence2"],
            description: "deciding whether two sentences are paraphrases of each other",
            label_explanation: "0 = the sentences are not equivalent, 1 = the sentences are equivalent",
        },
        GlueTaskSpec {
            name: "qqp",
            field_names: &["question1", "question2"],
            description: "deciding whether two questions ask the same thing",
            label_explanation: "0 = the questions are not duplicates, 1 = the questions are duplicates",
        },
        GlueTaskSpec {
            name: "stsb",
            field_names: &["sentence1", "sentence2"],
            description: "rating how similar two sentences are",
            label_explanation: "a similarity score from 0 (completely dissimilar) to 5 (equivalent)",
        },
        GlueTaskSpec {
            name: "mnli",
            field_names: &["premise", "hypothesis"],
            description: "deciding whether a premise entails, contradicts, or is neutral toward a hypothesis",
            label_explanation: "0 = the premise entails the hypothesis, 1 = neutral, 2 = the premise contradicts the hypothesis",
        },
        GlueTaskSpec {
            name: "qnli",
            field_names: &["question", "sentence"],
            description: "deciding whether a sentence answers a question",
            label_explanation: "0 = the sentence answers the question, 1 = the sentence does not answer the question",
        },
        GlueTaskSpec {
            name: "rte",
            field_names: &["sentence1", "sentence2"],
            description: "recognizing textual entailment between two sentences",
            label_explanation: "0 = the first sentence entails the second, 1 = it does not",
        },
        GlueTaskSpec {
            name: "wnli",
            field_names: &["sentence1", "sentence2"],
            description: "resolving pronoun references between two sentences",
            label_explanation: "0 = the second sentence does not follow from the first, 1 = it does",
        },
    ];
    specs.into_iter().map(|s| (s.name, s)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GlueStatus {
    Pending,
    Revised,
    Retained,
}

/// One benchmark item.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlueItem {
    pub task: String,
    /// One or two input texts, matching the task's field names.
    pub fields: Vec<String>,
    pub label: String,
    pub status: GlueStatus,
    pub rounds_attempted: u32,
}

impl GlueItem {
    pub fn new(task: impl Into<String>, fields: Vec<String>, label: impl Into<String>) -> Self {
        GlueItem {
            task: task.into(),
            fields,
            label: label.into(),
            status: GlueStatus::Pending,
            rounds_attempted: 0,
        }
    }
}

/// Loop parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GlueBuildConfig {
    /// Minimum fraction of the original set that must be retained.
    pub coverage_ratio: f64,
    pub max_rounds: u32,
    pub seed: u64,
}

impl Default for GlueBuildConfig {
    fn default() -> Self {
        GlueBuildConfig {
            coverage_ratio: 0.70,
            max_rounds: 10,
            seed: 0,
        }
    }
}

/// One item's outcome in one round, kept for audit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub item_index: usize,
    pub revision_ok: bool,
    pub predicted: Option<String>,
    pub retained: bool,
}

/// The finished build: retained items plus the full audit trail.
#[derive(Debug, Clone, Default)]
pub struct BuildReport {
    pub retained: Vec<GlueItem>,
    pub total: usize,
    pub coverage: f64,
    pub rounds_run: u32,
    /// Coverage after each round; non-decreasing.
    pub coverage_history: Vec<f64>,
    pub records: Vec<RoundRecord>,
}

impl BuildReport {
    pub fn coverage_csv(&self) -> String {
        let mut table = crate::report::Table::new(vec![
            "round".to_string(),
            "retained".to_string(),
            "total".to_string(),
            "coverage".to_string(),
        ]);
        for (i, cov) in self.coverage_history.iter().enumerate() {
            let retained = (cov * self.total as f64).round() as usize;
            table.push_row(vec![
                (i + 1).to_string(),
                retained.to_string(),
                self.total.to_string(),
                format!("{cov:.4}"),
            ]);
        }
        table.to_csv()
    }
}

/// Coverage was still below the ratio when the round budget ran out.
#[derive(Debug, Error)]
#[error("coverage {coverage:.4} below target {target:.4} after {rounds} rounds")]
pub struct CoverageError {
    pub coverage: f64,
    pub target: f64,
    pub rounds: u32,
    pub report: BuildReport,
}

/// Prompt pair used by the loop; defaults to the bundled templates.
pub struct GlueTemplates {
    pub revise: PromptTemplate,
    pub verify: PromptTemplate,
}

impl Default for GlueTemplates {
    fn default() -> Self {
        GlueTemplates {
            revise: PromptTemplate::new("glue-revise", None, templates::GLUE_REVISE),
            verify: PromptTemplate::new("glue-eval", None, templates::GLUE_EVAL),
        }
    }
}

fn slot_map(pairs: &[(&str, String)]) -> BTreeMap<String, String> {
    pairs
        .iter()
        .map(|(k, v)| (k.to_string(), v.clone()))
        .collect()
}

/// Run the revise-verify-retain loop over one task's items.
pub fn build_benchmark(
    items: &[GlueItem],
    glue_templates: &GlueTemplates,
    reviser: &LlmClient,
    verifier: &LlmClient,
    config: &GlueBuildConfig,
) -> Result<BuildReport, BenchError> {
    let registry = task_registry();
    let total = items.len();
    let mut report = BuildReport {
        total,
        ..BuildReport::default()
    };
    if total == 0 {
        report.coverage = 1.0;
        return Ok(report);
    }

    // Originals stay untouched: an item that failed verification is
    // re-revised from its original text in the next round.
    let mut retained: Vec<Option<GlueItem>> = vec![None; total];
    let mut rounds_attempted = vec![0u32; total];

    for round in 1..=config.max_rounds {
        if report.coverage >= config.coverage_ratio {
            break;
        }
        for (idx, item) in items.iter().enumerate() {
            if retained[idx].is_some() {
                continue;
            }
            let spec = registry
                .get(item.task.as_str())
                .ok_or_else(|| BenchError::UnknownTask(item.task.clone()))?;
            if spec.field_names.len() != item.fields.len() {
                return Err(BenchError::FieldCount {
                    task: item.task.clone(),
                    item: format!("#{idx}"),
                    expected: spec.field_names.len(),
                    got: item.fields.len(),
                });
            }
            rounds_attempted[idx] += 1;

            let revise_prompt = build_prompt(
                &glue_templates.revise,
                &slot_map(&[
                    ("dataset", spec.name.to_string()),
                    ("description", spec.description.to_string()),
                    ("input_format", spec.input_format()),
                    ("output_format", spec.revision_output_format()),
                    ("input", spec.render_input(&item.fields)),
                    ("label_explanation", spec.label_explanation.to_string()),
                ]),
            )?;
            let raw = reviser
                .complete(&CompletionRequest::new(revise_prompt).with_attempt(round - 1))?;
            let revised_fields = match spec.parse_revision(&raw) {
                Ok(fields) => fields,
                Err(e) => {
                    log::debug!("revision parse failure for item {idx} round {round}: {e}");
                    report.records.push(RoundRecord {
                        round,
                        item_index: idx,
                        revision_ok: false,
                        predicted: None,
                        retained: false,
                    });
                    continue;
                }
            };

            let verify_prompt = build_prompt(
                &glue_templates.verify,
                &slot_map(&[
                    ("description", spec.description.to_string()),
                    ("input_format", spec.input_format()),
                    ("label_explanation", spec.label_explanation.to_string()),
                    ("output_format", spec.verification_output_format()),
                    ("input", spec.render_input(&revised_fields)),
                ]),
            )?;
            let verdict = verifier
                .complete(&CompletionRequest::new(verify_prompt).with_attempt(round - 1))?;
            let predicted = verdict
                .split(END_MARKER)
                .next()
                .unwrap_or("")
                .trim()
                .to_string();
            let matched = predicted == item.label;
            report.records.push(RoundRecord {
                round,
                item_index: idx,
                revision_ok: true,
                predicted: Some(predicted),
                retained: matched,
            });
            if matched {
                retained[idx] = Some(GlueItem {
                    task: item.task.clone(),
                    fields: revised_fields,
                    label: item.label.clone(),
                    status: GlueStatus::Retained,
                    rounds_attempted: rounds_attempted[idx],
                });
            }
        }
        report.rounds_run = round;
        let count = retained.iter().filter(|r| r.is_some()).count();
        report.coverage = count as f64 / total as f64;
        report.coverage_history.push(report.coverage);
    }

    report.retained = retained.into_iter().flatten().collect();
    if report.coverage >= config.coverage_ratio {
        Ok(report)
    } else {
        Err(BenchError::Coverage(Box::new(CoverageError {
            coverage: report.coverage,
            target: config.coverage_ratio,
            rounds: report.rounds_run,
            report,
        })))
    }
}

/// Split retained validation items into two halves of near-equal size
/// with per-label balance: each label's items differ by at most one
/// between halves.
pub fn split_validation(
    items: &[GlueItem],
    seed: u64,
) -> Result<(Vec<GlueItem>, Vec<GlueItem>), BenchError> {
    use rand::seq::SliceRandom;

    if items.len() < 2 {
        return Err(BenchError::TooFewItems(items.len()));
    }
    let mut by_label: BTreeMap<&str, Vec<&GlueItem>> = BTreeMap::new();
    for item in items {
        by_label.entry(item.label.as_str()).or_default().push(item);
    }
    let mut rng = seeded_rng(seed, "glue:split");
    let mut first: Vec<GlueItem> = Vec::new();
    let mut second: Vec<GlueItem> = Vec::new();
    for (_, mut group) in by_label {
        group.shuffle(&mut rng);
        let half = group.len() / 2;
        let extra = group.len() % 2;
        // odd remainders go to whichever half is currently smaller
        let (a_take, b_take) = if extra == 1 && first.len() > second.len() {
            (half, half + 1)
        } else {
            (half + extra, half)
        };
        for item in group.iter().take(a_take) {
            first.push((*item).clone());
        }
        for item in group.iter().skip(a_take).take(b_take) {
            second.push((*item).clone());
        }
    }
    Ok((first, second))
}
