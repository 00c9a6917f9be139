//! The corpus revision job: chunk, prompt, parse, concatenate.
//!
//! Chunk revisions for distinct chunks may run on several workers; the
//! results are assembled by (document, chunk index), so output is
//! deterministic for deterministic clients at any worker budget. Raw
//! responses flow through the client cache, which is what makes a re-run
//! over an unchanged collection free.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use thiserror::Error;

use crate::corpus::{DocumentCollection, Genre};
use crate::llmclient::{ClientError, CompletionRequest, LlmClient};

use super::chunk::chunk_document;
use super::parse::{
    parse_revision, split_code_document, split_instruct_document, ParseVariant,
};
use super::{build_prompt, PromptTemplate, SimplifyError};

/// Knobs for a revision job.
#[derive(Debug, Clone)]
pub struct RevisionConfig {
    /// Revision window in whitespace tokens.
    pub max_units: usize,
    /// Attempts per chunk before it is marked failed.
    pub max_attempts: u32,
    /// Joiner between revised chunks.
    pub joiner: String,
    /// Worker threads for chunk revisions.
    pub workers: usize,
}

impl Default for RevisionConfig {
    fn default() -> Self {
        RevisionConfig {
            max_units: 1500,
            max_attempts: 3,
            joiner: "\n\n".to_string(),
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RevisionStatus {
    Ok,
    Partial,
    Failed,
}

/// Outcome for one chunk: the revised text or the last parse failure.
#[derive(Debug, Clone)]
pub struct ChunkOutcome {
    pub original: String,
    pub revised: Option<String>,
    pub attempts: u32,
    pub error: Option<String>,
}

/// Everything produced for one document.
#[derive(Debug, Clone)]
pub struct RevisionResult {
    pub doc_id: String,
    pub chunks: Vec<ChunkOutcome>,
    /// In-order concatenation of successful chunk revisions with the
    /// configured joiner.
    pub revised_full: String,
    pub status: RevisionStatus,
}

/// A halted job: the client gave out mid-run. Completed documents are
/// returned so the job can resume from the response cache.
#[derive(Debug, Error)]
#[error("revision job halted at document '{failed_doc}': {source}")]
pub struct RevisionJobError {
    pub completed: Vec<RevisionResult>,
    pub failed_doc: String,
    #[source]
    pub source: ClientError,
}

enum TaskKind {
    Plain,
    Code,
    Instruct,
}

struct ChunkTask {
    doc_idx: usize,
    chunk_idx: usize,
    original: String,
    prompt: String,
    kind: TaskKind,
}

/// Revise every document in the collection.
///
/// Each genre present must have a template. Web/book/wiki-style genres
/// are chunked and revised paragraph-wise; code and instruction
/// documents are revised as structured units using their own layouts.
pub fn revise_corpus(
    collection: &DocumentCollection,
    templates: &BTreeMap<Genre, PromptTemplate>,
    client: &LlmClient,
    config: &RevisionConfig,
) -> Result<Vec<RevisionResult>, RevisionJobError> {
    for doc in collection {
        if !templates.contains_key(&doc.genre) {
            return Err(RevisionJobError {
                completed: Vec::new(),
                failed_doc: doc.id.clone(),
                source: ClientError::BadResponse(
                    SimplifyError::MissingTemplate(doc.genre).to_string(),
                ),
            });
        }
    }

    // Build the full task list up front; workers pull tasks by index.
    let mut tasks: Vec<ChunkTask> = Vec::new();
    let mut chunks_per_doc: Vec<usize> = Vec::with_capacity(collection.len());
    for (doc_idx, doc) in collection.iter().enumerate() {
        let template = &templates[&doc.genre];
        let built = build_doc_tasks(doc_idx, &doc.text, doc.genre, template, config);
        match built {
            Ok(doc_tasks) => {
                chunks_per_doc.push(doc_tasks.len());
                tasks.extend(doc_tasks);
            }
            Err(e) => {
                return Err(RevisionJobError {
                    completed: Vec::new(),
                    failed_doc: doc.id.clone(),
                    source: ClientError::BadResponse(e.to_string()),
                })
            }
        }
    }

    let outcomes: Vec<Mutex<Option<Result<ChunkOutcome, ClientError>>>> =
        tasks.iter().map(|_| Mutex::new(None)).collect();
    let next_task = AtomicUsize::new(0);
    let workers = config.workers.max(1).min(tasks.len().max(1));

    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let idx = next_task.fetch_add(1, Ordering::SeqCst);
                if idx >= tasks.len() {
                    break;
                }
                let result = run_chunk_task(&tasks[idx], client, config);
                *outcomes[idx].lock().expect("outcome lock") = Some(result);
            });
        }
    });

    // Assemble per document, in collection order.
    let mut results: Vec<RevisionResult> = Vec::with_capacity(collection.len());
    let mut cursor = 0usize;
    for (doc_idx, doc) in collection.iter().enumerate() {
        let n_chunks = chunks_per_doc[doc_idx];
        let mut chunk_outcomes = Vec::with_capacity(n_chunks);
        for offset in 0..n_chunks {
            let slot = outcomes[cursor + offset]
                .lock()
                .expect("outcome lock")
                .take()
                .expect("task ran");
            match slot {
                Ok(outcome) => chunk_outcomes.push(outcome),
                Err(source) => {
                    return Err(RevisionJobError {
                        completed: results,
                        failed_doc: doc.id.clone(),
                        source,
                    })
                }
            }
        }
        cursor += n_chunks;

        let ok = chunk_outcomes.iter().filter(|c| c.revised.is_some()).count();
        let status = if n_chunks == 0 || ok == n_chunks {
            RevisionStatus::Ok
        } else if ok == 0 {
            RevisionStatus::Failed
        } else {
            RevisionStatus::Partial
        };
        let revised_full = chunk_outcomes
            .iter()
            .filter_map(|c| c.revised.as_deref())
            .collect::<Vec<_>>()
            .join(&config.joiner);
        results.push(RevisionResult {
            doc_id: doc.id.clone(),
            chunks: chunk_outcomes,
            revised_full,
            status,
        });
    }
    Ok(results)
}

fn build_doc_tasks(
    doc_idx: usize,
    text: &str,
    genre: Genre,
    template: &PromptTemplate,
    config: &RevisionConfig,
) -> Result<Vec<ChunkTask>, SimplifyError> {
    match genre {
        Genre::Code => {
            let (task, response) = split_code_document(text);
            let values = BTreeMap::from([
                ("task".to_string(), task),
                ("response".to_string(), response),
            ]);
            Ok(vec![ChunkTask {
                doc_idx,
                chunk_idx: 0,
                original: text.to_string(),
                prompt: build_prompt(template, &values)?,
                kind: TaskKind::Code,
            }])
        }
        Genre::Instruct => {
            let (task, input, response) = split_instruct_document(text);
            let values = BTreeMap::from([
                ("task".to_string(), task),
                ("input".to_string(), input.unwrap_or_else(|| "None".to_string())),
                ("response".to_string(), response),
            ]);
            Ok(vec![ChunkTask {
                doc_idx,
                chunk_idx: 0,
                original: text.to_string(),
                prompt: build_prompt(template, &values)?,
                kind: TaskKind::Instruct,
            }])
        }
        _ => {
            let chunks = chunk_document(text, config.max_units);
            chunks
                .into_iter()
                .enumerate()
                .map(|(chunk_idx, chunk)| {
                    let values =
                        BTreeMap::from([("paragraph".to_string(), chunk.text.clone())]);
                    Ok(ChunkTask {
                        doc_idx,
                        chunk_idx,
                        original: chunk.text,
                        prompt: build_prompt(template, &values)?,
                        kind: TaskKind::Plain,
                    })
                })
                .collect()
        }
    }
}

/// One chunk: up to `max_attempts` completions, each a distinct cache
/// entry via the attempt counter; client failures abort the job.
fn run_chunk_task(
    task: &ChunkTask,
    client: &LlmClient,
    config: &RevisionConfig,
) -> Result<ChunkOutcome, ClientError> {
    let variant = match task.kind {
        TaskKind::Plain => ParseVariant::Plain,
        TaskKind::Code => ParseVariant::Code,
        TaskKind::Instruct => ParseVariant::Instruct,
    };
    let mut last_error = String::new();
    for attempt in 0..config.max_attempts {
        let request = CompletionRequest::new(task.prompt.clone()).with_attempt(attempt);
        let raw = client.complete(&request)?;
        match parse_revision(&raw, variant) {
            Ok(parsed) => {
                return Ok(ChunkOutcome {
                    original: task.original.clone(),
                    revised: Some(parsed.to_text()),
                    attempts: attempt + 1,
                    error: None,
                })
            }
            Err(e) => {
                log::debug!(
                    "parse failure for doc {} chunk {} attempt {attempt}: {e}",
                    task.doc_idx,
                    task.chunk_idx
                );
                last_error = e.to_string();
            }
        }
    }
    Ok(ChunkOutcome {
        original: task.original.clone(),
        revised: None,
        attempts: config.max_attempts,
        error: Some(last_error),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, Split};
    use crate::llmclient::{DiskCache, FnBackend};
    use crate::templates;
    use std::sync::Arc;

    fn upper_echo_backend() -> Arc<FnBackend<impl Fn(&CompletionRequest) -> Result<String, ClientError> + Send + Sync>>
    {
        Arc::new(FnBackend::new(|req: &CompletionRequest| {
            let content = req
                .prompt
                .split("ORIGINAL CONTENT:\n")
                .nth(1)
                .and_then(|s| s.split("\n\nLet's think step by step").next())
                .unwrap_or("");
            Ok(format!("EDITED:\n{} <end>", content.to_uppercase()))
        }))
    }

    fn two_docs() -> DocumentCollection {
        DocumentCollection::from_documents(vec![
            Document::new("a", Genre::Web, Split::Train, "the cat sat"),
            Document::new("b", Genre::Web, Split::Train, "a dog ran"),
        ])
        .unwrap()
    }

    #[test]
    fn echo_mock_revises_both_documents() {
        let backend = upper_echo_backend();
        let client = LlmClient::new(backend);
        let results = revise_corpus(
            &two_docs(),
            &templates::builtin_revision_templates(),
            &client,
            &RevisionConfig::default(),
        )
        .unwrap();
        assert_eq!(results.len(), 2);
        assert_eq!(results[0].status, RevisionStatus::Ok);
        assert_eq!(results[0].revised_full, "THE CAT SAT");
        assert_eq!(results[1].revised_full, "A DOG RAN");
    }

    #[test]
    fn empty_collection_is_empty_result() {
        let client = LlmClient::new(upper_echo_backend());
        let results = revise_corpus(
            &DocumentCollection::new(),
            &templates::builtin_revision_templates(),
            &client,
            &RevisionConfig::default(),
        )
        .unwrap();
        assert!(results.is_empty());
    }

    #[test]
    fn garbage_after_retries_fails_that_doc_only() {
        let backend = Arc::new(FnBackend::new(|req: &CompletionRequest| {
            if req.prompt.contains("broken doc") {
                Ok("no markers at all".to_string())
            } else {
                Ok("EDITED:\nfine <end>".to_string())
            }
        }));
        let collection = DocumentCollection::from_documents(vec![
            Document::new("good", Genre::Web, Split::Train, "hello there"),
            Document::new("bad", Genre::Web, Split::Train, "broken doc"),
        ])
        .unwrap();
        let client = LlmClient::new(backend.clone());
        let results = revise_corpus(
            &collection,
            &templates::builtin_revision_templates(),
            &client,
            &RevisionConfig::default(),
        )
        .unwrap();
        assert_eq!(results[0].status, RevisionStatus::Ok);
        assert_eq!(results[1].status, RevisionStatus::Failed);
        assert_eq!(results[1].chunks[0].attempts, 3);
        assert!(results[1].chunks[0].error.is_some());
        // one call for the good doc, three attempts for the bad one
        assert_eq!(backend.calls(), 4);
    }

    #[test]
    fn rerun_with_cache_issues_zero_calls() {
        let backend = upper_echo_backend();
        let dir = tempfile::tempdir().unwrap();
        let client = LlmClient::new(backend.clone())
            .with_cache(DiskCache::new(dir.path()).unwrap());
        let templates = templates::builtin_revision_templates();
        let config = RevisionConfig::default();
        let first = revise_corpus(&two_docs(), &templates, &client, &config).unwrap();
        let calls_after_first = backend.calls();
        let second = revise_corpus(&two_docs(), &templates, &client, &config).unwrap();
        assert_eq!(backend.calls(), calls_after_first, "re-run must be cached");
        assert_eq!(first.len(), second.len());
        assert_eq!(first[0].revised_full, second[0].revised_full);
    }

    #[test]
    fn client_exhaustion_halts_with_completed_results() {
        let backend = Arc::new(crate::llmclient::ScriptedBackend::from_responses(vec![
            "EDITED:\nfirst <end>".to_string(),
        ]));
        let client = LlmClient::new(backend);
        let err = revise_corpus(
            &two_docs(),
            &templates::builtin_revision_templates(),
            &client,
            &RevisionConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err.completed.len(), 1);
        assert_eq!(err.completed[0].doc_id, "a");
        assert_eq!(err.failed_doc, "b");
        assert!(matches!(err.source, ClientError::ScriptExhausted(_)));
    }

    #[test]
    fn multi_chunk_document_joins_in_order() {
        let text = "first part here\n\nsecond part here\n\nthird part here";
        let collection = DocumentCollection::from_documents(vec![Document::new(
            "long",
            Genre::Book,
            Split::Train,
            text,
        )])
        .unwrap();
        let client = LlmClient::new(upper_echo_backend());
        let config = RevisionConfig {
            max_units: 3,
            ..RevisionConfig::default()
        };
        let results = revise_corpus(
            &collection,
            &templates::builtin_revision_templates(),
            &client,
            &config,
        )
        .unwrap();
        assert_eq!(results[0].chunks.len(), 3);
        assert_eq!(
            results[0].revised_full,
            "FIRST PART HERE\n\nSECOND PART HERE\n\nTHIRD PART HERE"
        );
    }

    #[test]
    fn worker_budget_does_not_change_output() {
        let text = "p one word\n\np two word\n\np three word\n\np four word";
        let collection = DocumentCollection::from_documents(vec![Document::new(
            "long",
            Genre::Web,
            Split::Train,
            text,
        )])
        .unwrap();
        let templates = templates::builtin_revision_templates();
        let run = |workers: usize| {
            let client = LlmClient::new(upper_echo_backend());
            let config = RevisionConfig {
                max_units: 3,
                workers,
                ..RevisionConfig::default()
            };
            revise_corpus(&collection, &templates, &client, &config).unwrap()[0]
                .revised_full
                .clone()
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn instruct_documents_revise_as_structured_units() {
        let doc_text = crate::simplify::parse::render_instruct_document(
            "Explain rain.",
            None,
            "Rain falls from clouds.",
        );
        let collection = DocumentCollection::from_documents(vec![Document::new(
            "i0",
            Genre::Instruct,
            Split::Train,
            doc_text,
        )])
        .unwrap();
        let backend = Arc::new(FnBackend::new(|_req: &CompletionRequest| {
            Ok("[EDITED]Explain rain simply. <split> None <split> Water drops fall. <end>"
                .to_string())
        }));
        let client = LlmClient::new(backend);
        let results = revise_corpus(
            &collection,
            &templates::builtin_revision_templates(),
            &client,
            &RevisionConfig::default(),
        )
        .unwrap();
        assert_eq!(results[0].status, RevisionStatus::Ok);
        assert!(results[0].revised_full.contains("[TASK]Explain rain simply."));
        assert!(results[0].revised_full.contains("[INPUT]None"));
        assert!(results[0].revised_full.contains("[RESPONSE]Water drops fall."));
    }
}
