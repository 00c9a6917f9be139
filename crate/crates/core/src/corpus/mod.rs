//! Document collections: ingestion, genre composition sampling, and
//! difficulty-ranked partitions for formal-language material.

mod difficulty;
mod sample;
pub mod synth;

pub use difficulty::{
    parse_grading_response, rank_formal_difficulty, Grade, GradeScores, GradedSample,
};
pub use sample::{sample_composition, CompositionSpec};

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("failed to read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed record at {path}:{line}: {reason}")]
    MalformedLine {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("duplicate document id '{id}' at {path}:{line}")]
    DuplicateId {
        path: String,
        line: usize,
        id: String,
    },
    #[error("duplicate document id '{0}' in collection")]
    DuplicateIdInCollection(String),
    #[error("composition fractions sum to {0}, expected 1.0")]
    FractionSum(f64),
    #[error("insufficient {genre} tokens: need {needed}, available {available} (short by {shortfall})")]
    InsufficientTokens {
        genre: Genre,
        needed: u64,
        available: u64,
        shortfall: u64,
    },
    #[error("no documents for genre {0} with nonzero fraction")]
    MissingGenre(Genre),
    #[error("unknown grade letter '{0}' (expected A-F)")]
    UnknownGrade(char),
    #[error("grade scores must be strictly increasing from A to F")]
    NonIncreasingGradeScores,
    #[error("sample id '{0}' appears in more than one category")]
    DuplicateSampleAcrossCategories(String),
}

/// Content genres a document may belong to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Genre {
    Web,
    Book,
    Wiki,
    Textbook,
    Conversation,
    Code,
    Math,
    Instruct,
}

impl Genre {
    pub const ALL: [Genre; 8] = [
        Genre::Web,
        Genre::Book,
        Genre::Wiki,
        Genre::Textbook,
        Genre::Conversation,
        Genre::Code,
        Genre::Math,
        Genre::Instruct,
    ];

    /// Formal-language genres are sampled by ascending difficulty group.
    pub fn is_formal(self) -> bool {
        matches!(self, Genre::Code | Genre::Math)
    }

    /// Natural-language genres are sampled uniformly at random.
    pub fn is_natural(self) -> bool {
        matches!(
            self,
            Genre::Web | Genre::Book | Genre::Wiki | Genre::Textbook | Genre::Conversation
        )
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Genre::Web => "web",
            Genre::Book => "book",
            Genre::Wiki => "wiki",
            Genre::Textbook => "textbook",
            Genre::Conversation => "conversation",
            Genre::Code => "code",
            Genre::Math => "math",
            Genre::Instruct => "instruct",
        }
    }
}

impl fmt::Display for Genre {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Genre {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Genre::ALL
            .iter()
            .copied()
            .find(|g| g.as_str() == s)
            .ok_or_else(|| format!("unknown genre '{s}'"))
    }
}

/// Dataset split a document belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Split::ALL
            .iter()
            .copied()
            .find(|x| x.as_str() == s)
            .ok_or_else(|| format!("unknown split '{s}'"))
    }
}

/// How a document's `token_count` was produced.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum CountMethod {
    /// Runs of Unicode whitespace delimit tokens.
    Whitespace,
    /// Counted by encoding with the named vocabulary.
    Tokenizer(String),
}

impl From<CountMethod> for String {
    fn from(m: CountMethod) -> String {
        match m {
            CountMethod::Whitespace => "whitespace".to_string(),
            CountMethod::Tokenizer(id) => format!("tokenizer:{id}"),
        }
    }
}

impl TryFrom<String> for CountMethod {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s == "whitespace" {
            Ok(CountMethod::Whitespace)
        } else if let Some(id) = s.strip_prefix("tokenizer:") {
            Ok(CountMethod::Tokenizer(id.to_string()))
        } else {
            Err(format!("unknown count method '{s}'"))
        }
    }
}

/// Count whitespace-delimited tokens: a stable pre-tokenizer estimate.
pub fn whitespace_token_count(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// A genre- and split-tagged text unit flowing through every pipeline stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub genre: Genre,
    pub split: Split,
    pub text: String,
    #[serde(default)]
    pub token_count: u64,
    #[serde(default = "default_count_method")]
    pub count_method: CountMethod,
}

fn default_count_method() -> CountMethod {
    CountMethod::Whitespace
}

impl Document {
    /// Build a document with a freshly computed whitespace token count.
    pub fn new(
        id: impl Into<String>,
        genre: Genre,
        split: Split,
        text: impl Into<String>,
    ) -> Self {
        let text = text.into();
        let token_count = whitespace_token_count(&text);
        Document {
            id: id.into(),
            genre,
            split,
            text,
            token_count,
            count_method: CountMethod::Whitespace,
        }
    }
}

/// An ordered set of documents with unique ids.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DocumentCollection {
    docs: Vec<Document>,
}

impl DocumentCollection {
    pub fn new() -> Self {
        DocumentCollection::default()
    }

    pub fn from_documents(docs: Vec<Document>) -> Result<Self, CorpusError> {
        let mut collection = DocumentCollection::new();
        for doc in docs {
            collection.push(doc)?;
        }
        Ok(collection)
    }

    pub fn push(&mut self, doc: Document) -> Result<(), CorpusError> {
        if self.docs.iter().any(|d| d.id == doc.id) {
            return Err(CorpusError::DuplicateIdInCollection(doc.id));
        }
        self.docs.push(doc);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Document> {
        self.docs.iter()
    }

    pub fn docs(&self) -> &[Document] {
        &self.docs
    }

    pub fn get(&self, id: &str) -> Option<&Document> {
        self.docs.iter().find(|d| d.id == id)
    }

    pub fn total_tokens(&self) -> u64 {
        self.docs.iter().map(|d| d.token_count).sum()
    }

    pub fn genre_tokens(&self, genre: Genre) -> u64 {
        self.docs
            .iter()
            .filter(|d| d.genre == genre)
            .map(|d| d.token_count)
            .sum()
    }

    /// Documents of one genre, in collection order.
    pub fn by_genre(&self, genre: Genre) -> Vec<&Document> {
        self.docs.iter().filter(|d| d.genre == genre).collect()
    }

    /// Token totals keyed by (genre, split).
    pub fn genre_split_tokens(&self) -> BTreeMap<(Genre, Split), u64> {
        let mut out = BTreeMap::new();
        for doc in &self.docs {
            *out.entry((doc.genre, doc.split)).or_insert(0) += doc.token_count;
        }
        out
    }

    /// Write one JSON object per line with the canonical field set.
    pub fn write_jsonl(&self, path: impl AsRef<Path>) -> Result<(), CorpusError> {
        let path = path.as_ref();
        let mut file = File::create(path).map_err(|source| CorpusError::Io {
            path: path.display().to_string(),
            source,
        })?;
        for doc in &self.docs {
            let line = serde_json::json!({
                "id": doc.id,
                "genre": doc.genre,
                "split": doc.split,
                "text": doc.text,
            });
            writeln!(file, "{line}").map_err(|source| CorpusError::Io {
                path: path.display().to_string(),
                source,
            })?;
        }
        Ok(())
    }
}

impl<'a> IntoIterator for &'a DocumentCollection {
    type Item = &'a Document;
    type IntoIter = std::slice::Iter<'a, Document>;

    fn into_iter(self) -> Self::IntoIter {
        self.docs.iter()
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    id: Option<String>,
    text: Option<String>,
    genre: Option<Genre>,
    split: Option<Split>,
}

/// Read a JSONL file of `{id, text}` records into a collection.
///
/// `genre` and `split` act as defaults; per-record fields override them.
/// Token counts use the whitespace method unless `count_with` supplies a
/// vocabulary-backed counter.
pub fn ingest(
    path: impl AsRef<Path>,
    genre: Genre,
    split: Split,
) -> Result<DocumentCollection, CorpusError> {
    ingest_with_counter(path, genre, split, None)
}

/// As [`ingest`], with an optional tokenizer-backed counting method.
pub fn ingest_with_counter(
    path: impl AsRef<Path>,
    genre: Genre,
    split: Split,
    count_with: Option<(&str, &dyn Fn(&str) -> u64)>,
) -> Result<DocumentCollection, CorpusError> {
    let path = path.as_ref();
    let display = path.display().to_string();
    let file = File::open(path).map_err(|source| CorpusError::Io {
        path: display.clone(),
        source,
    })?;
    let reader = BufReader::new(file);

    let mut docs = Vec::new();
    let mut seen: HashSet<String> = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line.map_err(|source| CorpusError::Io {
            path: display.clone(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RawRecord =
            serde_json::from_str(&line).map_err(|e| CorpusError::MalformedLine {
                path: display.clone(),
                line: line_no,
                reason: e.to_string(),
            })?;
        let id = raw.id.ok_or_else(|| CorpusError::MalformedLine {
            path: display.clone(),
            line: line_no,
            reason: "missing field 'id'".to_string(),
        })?;
        let text = raw.text.ok_or_else(|| CorpusError::MalformedLine {
            path: display.clone(),
            line: line_no,
            reason: "missing field 'text'".to_string(),
        })?;
        if !seen.insert(id.clone()) {
            return Err(CorpusError::DuplicateId {
                path: display.clone(),
                line: line_no,
                id,
            });
        }
        let (token_count, count_method) = match count_with {
            Some((vocab_id, counter)) => {
                (counter(&text), CountMethod::Tokenizer(vocab_id.to_string()))
            }
            None => (whitespace_token_count(&text), CountMethod::Whitespace),
        };
        docs.push(Document {
            id,
            genre: raw.genre.unwrap_or(genre),
            split: raw.split.unwrap_or(split),
            text,
            token_count,
            count_method,
        });
    }
    Ok(DocumentCollection { docs })
}

/// An ordered difficulty grouping of one formal-language genre.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyPartition {
    pub genre: Genre,
    /// Groups sorted by score ascending; each document id appears in
    /// exactly one group.
    pub groups: Vec<DifficultyGroup>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifficultyGroup {
    pub label: String,
    pub doc_ids: Vec<String>,
    pub score: u64,
}

impl DifficultyPartition {
    /// All document ids across groups, in group order.
    pub fn all_ids(&self) -> Vec<&str> {
        self.groups
            .iter()
            .flat_map(|g| g.doc_ids.iter().map(String::as_str))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_lines(lines: &[&str]) -> tempfile::NamedTempFile {
        use std::io::Write as _;
        let mut f = tempfile::NamedTempFile::new().expect("tempfile");
        for line in lines {
            writeln!(f, "{line}").unwrap();
        }
        f
    }

    #[test]
    fn ingest_empty_file_yields_empty_collection() {
        let f = write_lines(&[]);
        let c = ingest(f.path(), Genre::Web, Split::Train).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn ingest_counts_whitespace_tokens() {
        let f = write_lines(&[r#"{"id":"a","text":"x y"}"#, r#"{"id":"b","text":"z"}"#]);
        let c = ingest(f.path(), Genre::Web, Split::Train).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.get("a").unwrap().token_count, 2);
        assert_eq!(c.get("b").unwrap().token_count, 1);
        assert_eq!(c.get("a").unwrap().count_method, CountMethod::Whitespace);
    }

    #[test]
    fn ingest_missing_text_names_line() {
        let f = write_lines(&[r#"{"id":"a","text":"x"}"#, r#"{"id":"b"}"#]);
        let err = ingest(f.path(), Genre::Web, Split::Train).unwrap_err();
        match err {
            CorpusError::MalformedLine { line, reason, .. } => {
                assert_eq!(line, 2);
                assert!(reason.contains("text"));
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn ingest_rejects_duplicate_ids() {
        let f = write_lines(&[r#"{"id":"a","text":"x"}"#, r#"{"id":"a","text":"y"}"#]);
        let err = ingest(f.path(), Genre::Web, Split::Train).unwrap_err();
        assert!(matches!(err, CorpusError::DuplicateId { line: 2, .. }));
    }

    #[test]
    fn ingest_honors_per_record_overrides() {
        let f = write_lines(&[r#"{"id":"a","text":"x","genre":"code","split":"test"}"#]);
        let c = ingest(f.path(), Genre::Web, Split::Train).unwrap();
        let doc = c.get("a").unwrap();
        assert_eq!(doc.genre, Genre::Code);
        assert_eq!(doc.split, Split::Test);
    }

    #[test]
    fn whitespace_count_uses_unicode_runs() {
        assert_eq!(whitespace_token_count("a\u{00a0}b\t c\n\nd"), 4);
        assert_eq!(whitespace_token_count("   "), 0);
        assert_eq!(whitespace_token_count(""), 0);
    }

    #[test]
    fn jsonl_round_trip() {
        let mut c = DocumentCollection::new();
        c.push(Document::new("a", Genre::Wiki, Split::Validation, "one two"))
            .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("docs.jsonl");
        c.write_jsonl(&path).unwrap();
        let back = ingest(&path, Genre::Web, Split::Train).unwrap();
        assert_eq!(back.get("a").unwrap().genre, Genre::Wiki);
        assert_eq!(back.get("a").unwrap().split, Split::Validation);
        assert_eq!(back.get("a").unwrap().text, "one two");
    }

    #[test]
    fn count_method_string_round_trip() {
        let m = CountMethod::Tokenizer("v2k".to_string());
        let s: String = m.clone().into();
        assert_eq!(s, "tokenizer:v2k");
        assert_eq!(CountMethod::try_from(s).unwrap(), m);
    }
}
