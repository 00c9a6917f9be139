//! Pluggable sentence-similarity functions.
//!
//! The pipelines only need a cosine-style similarity in [-1, 1]; which
//! embedding model provides it is an external choice. Tests and offline
//! runs use a deterministic token-overlap similarity.

/// Cosine-style similarity between two sentences.
pub trait Embedder: Send + Sync {
    fn similarity(&self, a: &str, b: &str) -> f64;
}

/// Jaccard overlap of lowercased whitespace token sets: deterministic,
/// model-free, and 1.0 exactly for identical texts.
pub fn token_overlap_similarity(a: &str, b: &str) -> f64 {
    let set = |s: &str| {
        s.split_whitespace()
            .map(|w| w.to_lowercase())
            .collect::<std::collections::BTreeSet<String>>()
    };
    let sa = set(a);
    let sb = set(b);
    if sa.is_empty() && sb.is_empty() {
        return 1.0;
    }
    let inter = sa.intersection(&sb).count() as f64;
    let union = sa.union(&sb).count() as f64;
    inter / union
}

/// The default offline embedder.
#[derive(Debug, Clone, Copy, Default)]
pub struct TokenOverlapEmbedder;

impl Embedder for TokenOverlapEmbedder {
    fn similarity(&self, a: &str, b: &str) -> f64 {
        token_overlap_similarity(a, b)
    }
}

/// Closure-backed embedder for scripted tests.
pub struct FnEmbedder<F>(pub F);

impl<F> Embedder for FnEmbedder<F>
where
    F: Fn(&str, &str) -> f64 + Send + Sync,
{
    fn similarity(&self, a: &str, b: &str) -> f64 {
        (self.0)(a, b)
    }
}
