//! LLM-driven text revision: chunking to a revision window, prompt
//! instantiation, marker-delimited output parsing, the corpus revision
//! job, and advisory world-setting linting.

mod chunk;
mod lint;
mod parse;
mod revise;

pub use chunk::{chunk_document, reassemble, Chunk};
pub use lint::{lint_world_simplification, LintFlag, LintKind, LintReport, NameTables};
pub use parse::{
    parse_revision, render_code, render_instruct, render_plain, ParseVariant, ParsedRevision,
    END_MARKER, SPLIT_MARKER,
};
pub use revise::{
    revise_corpus, ChunkOutcome, RevisionConfig, RevisionJobError, RevisionResult, RevisionStatus,
};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::corpus::Genre;

#[derive(Debug, Error)]
pub enum SimplifyError {
    #[error("missing value for slot '{0}'")]
    MissingSlot(String),
    #[error("slot '{slot}' appears {count} times in template '{template}', expected once")]
    DuplicateSlot {
        template: String,
        slot: String,
        count: usize,
    },
    #[error("no template for genre {0}")]
    MissingTemplate(Genre),
    #[error("failed to parse revision output: {reason}\n--- raw response ---\n{raw}")]
    Parse { reason: String, raw: String },
    #[error("name table does not cover initials A-Z exactly once")]
    BadNameTable,
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A prompt template with named `{{slot}}` markers.
#[derive(Debug, Clone, PartialEq)]
pub struct PromptTemplate {
    pub id: String,
    pub genre: Option<Genre>,
    pub body: String,
}

impl PromptTemplate {
    pub fn new(id: impl Into<String>, genre: Option<Genre>, body: impl Into<String>) -> Self {
        PromptTemplate {
            id: id.into(),
            genre,
            body: body.into(),
        }
    }

    /// Slot names in order of first appearance.
    pub fn slots(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut rest = self.body.as_str();
        while let Some(start) = rest.find("{{") {
            let Some(end) = rest[start + 2..].find("}}") else {
                break;
            };
            let name = &rest[start + 2..start + 2 + end];
            if !out.iter().any(|n| n == name) {
                out.push(name.to_string());
            }
            rest = &rest[start + 2 + end + 2..];
        }
        out
    }

    /// Every referenced slot must appear exactly once in the body.
    pub fn validate(&self) -> Result<(), SimplifyError> {
        for slot in self.slots() {
            let marker = format!("{{{{{slot}}}}}");
            let count = self.body.matches(&marker).count();
            if count != 1 {
                return Err(SimplifyError::DuplicateSlot {
                    template: self.id.clone(),
                    slot,
                    count,
                });
            }
        }
        Ok(())
    }
}

/// Substitute every slot exactly; unreferenced values are ignored and a
/// slot without a value is an error naming it.
pub fn build_prompt(
    template: &PromptTemplate,
    slot_values: &BTreeMap<String, String>,
) -> Result<String, SimplifyError> {
    let mut prompt = template.body.clone();
    for slot in template.slots() {
        let value = slot_values
            .get(&slot)
            .ok_or_else(|| SimplifyError::MissingSlot(slot.clone()))?;
        prompt = prompt.replace(&format!("{{{{{slot}}}}}"), value);
    }
    debug_assert!(!prompt.contains("{{"), "residual slot markers");
    Ok(prompt)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::templates;

    fn values(pairs: &[(&str, &str)]) -> BTreeMap<String, String> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), v.to_string()))
            .collect()
    }

    #[test]
    fn web_prompt_places_paragraph_before_step_by_step() {
        let map = templates::builtin_revision_templates();
        let prompt = build_prompt(&map[&Genre::Web], &values(&[("paragraph", "Hello.")])).unwrap();
        let para = prompt.find("Hello.").expect("paragraph substituted");
        let step = prompt
            .find("Let's think step by step")
            .expect("reasoning cue present");
        assert!(para < step);
        assert!(!prompt.contains("{{"));
    }

    #[test]
    fn zero_slot_template_is_identity() {
        let t = PromptTemplate::new("plain", None, "no slots here");
        assert_eq!(build_prompt(&t, &values(&[])).unwrap(), "no slots here");
    }

    #[test]
    fn missing_slot_error_names_it() {
        let map = templates::builtin_revision_templates();
        let err = build_prompt(&map[&Genre::Web], &values(&[])).unwrap_err();
        match err {
            SimplifyError::MissingSlot(name) => assert_eq!(name, "paragraph"),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn duplicate_slot_fails_validation() {
        let t = PromptTemplate::new("dup", None, "{{x}} and {{x}}");
        assert!(matches!(
            t.validate(),
            Err(SimplifyError::DuplicateSlot { count: 2, .. })
        ));
        for (_, template) in templates::builtin_revision_templates() {
            template.validate().unwrap();
        }
    }
}
