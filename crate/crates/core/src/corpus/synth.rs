//! Deterministic synthetic corpora for desk-scale runs and tests.
//!
//! Documents are built from a small closed vocabulary with genre-dependent
//! sentence-length ranges, so difficulty metrics have real variation to
//! work with while the whole corpus stays reproducible from a seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::seeding::seeded_rng;

use super::{Document, DocumentCollection, Genre, Split};

const NOUNS: &[&str] = &[
    "cat", "dog", "bird", "fish", "tree", "house", "river", "stone", "book", "road", "child",
    "friend", "garden", "window", "door", "mountain", "cloud", "star", "boat", "song",
];
const VERBS: &[&str] = &[
    "sees", "finds", "makes", "takes", "holds", "moves", "opens", "closes", "follows", "watches",
];
const ADJECTIVES: &[&str] = &[
    "small", "big", "old", "new", "quiet", "bright", "dark", "warm", "cold", "soft",
];

/// Sentence-length bounds (in words) per genre; longer sentences stand in
/// for harder material.
fn sentence_range(genre: Genre) -> (usize, usize) {
    match genre {
        Genre::Conversation => (3, 8),
        Genre::Wiki => (4, 12),
        Genre::Web => (4, 16),
        Genre::Book => (6, 18),
        Genre::Textbook => (6, 20),
        Genre::Code => (3, 10),
        Genre::Math => (4, 10),
        Genre::Instruct => (3, 10),
    }
}

fn sentence(rng: &mut ChaCha8Rng, words: usize) -> String {
    let mut parts = Vec::with_capacity(words);
    for i in 0..words {
        let word = match i % 3 {
            0 => ADJECTIVES[rng.gen_range(0..ADJECTIVES.len())],
            1 => NOUNS[rng.gen_range(0..NOUNS.len())],
            _ => VERBS[rng.gen_range(0..VERBS.len())],
        };
        parts.push(word);
    }
    let mut s = parts.join(" ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s.push('.');
    s
}

fn document_text(rng: &mut ChaCha8Rng, genre: Genre, target_tokens: usize) -> String {
    let (lo, hi) = sentence_range(genre);
    let mut sentences = Vec::new();
    let mut tokens = 0usize;
    while tokens < target_tokens {
        let words = rng.gen_range(lo..=hi);
        sentences.push(sentence(rng, words));
        tokens += words;
    }
    // Paragraph break every few sentences so chunking has boundaries.
    let mut out = String::new();
    for (i, s) in sentences.iter().enumerate() {
        if i > 0 {
            if i % 4 == 0 {
                out.push_str("\n\n");
            } else {
                out.push(' ');
            }
        }
        out.push_str(s);
    }
    out
}

/// Generate roughly `budget_tokens` of documents for one genre and split.
pub fn synthetic_genre(
    genre: Genre,
    split: Split,
    budget_tokens: u64,
    seed: u64,
) -> Vec<Document> {
    let label = format!("synth:{genre}:{split}");
    let mut rng = seeded_rng(seed, &label);
    let mut docs = Vec::new();
    let mut produced = 0u64;
    let mut idx = 0usize;
    while produced < budget_tokens {
        let doc_target = rng.gen_range(40..=160);
        let text = document_text(&mut rng, genre, doc_target);
        let doc = Document::new(
            format!("{genre}-{split}-{idx:05}"),
            genre,
            split,
            text,
        );
        produced += doc.token_count;
        docs.push(doc);
        idx += 1;
    }
    docs
}

/// A multi-genre source corpus with per-genre token budgets.
pub fn synthetic_corpus(
    budgets: &[(Genre, u64)],
    split: Split,
    seed: u64,
) -> DocumentCollection {
    let mut docs = Vec::new();
    for &(genre, budget) in budgets {
        docs.extend(synthetic_genre(genre, split, budget, seed));
    }
    DocumentCollection::from_documents(docs).expect("synthetic ids are unique")
}

/// The bundled desk-scale corpus: ~100K training tokens plus a small
/// validation slice, mixed across natural-language genres.
pub fn desk_corpus(seed: u64) -> DocumentCollection {
    let train = [
        (Genre::Web, 60_000),
        (Genre::Book, 20_000),
        (Genre::Wiki, 10_000),
        (Genre::Conversation, 10_000),
    ];
    let valid = [
        (Genre::Web, 3_000),
        (Genre::Book, 1_000),
        (Genre::Wiki, 500),
        (Genre::Conversation, 500),
    ];
    let mut docs: Vec<Document> = synthetic_corpus(&train, Split::Train, seed)
        .docs()
        .to_vec();
    docs.extend(
        synthetic_corpus(&valid, Split::Validation, seed)
            .docs()
            .to_vec(),
    );
    DocumentCollection::from_documents(docs).expect("synthetic ids are unique")
}
