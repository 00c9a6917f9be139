//! Information-theoretic corpus analytics.
//!
//! All complexity and loss math is carried out in nats; entropy is
//! reported in bits. The bits/nats conversion constant lives only in the
//! bit-reporting functions.

mod complexity;
mod loss;
mod stats;

pub use complexity::{
    complexity_report, pseudo_complexity, pseudo_complexity_streams, ComplexityReport,
    PseudoComplexityReport,
};
pub use loss::{loss_accuracy_bound, LossBoundCheck};
pub use stats::{corpus_entropy_table, corpus_stats, CorpusEntropyTable, CorpusStats, GenreClass};

use std::collections::HashMap;
use std::hash::Hash;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("n-gram order must be >= 1")]
    ZeroOrder,
    #[error("entropy of an empty count table is undefined")]
    EmptyTable,
    #[error("pseudo-complexity needs at least L={0} tokens, got {1}")]
    TooFewTokens(usize, usize),
    #[error("window length must be >= 1")]
    ZeroWindow,
    #[error("probability out of range (0,1]: {0}")]
    ProbabilityOutOfRange(f64),
    #[error("empty probability vector")]
    EmptyProbabilities,
    #[error("bound violated: {0}")]
    BoundViolation(String),
}

/// Sliding-window n-gram counts over a token stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountTable<T: Eq + Hash> {
    order: usize,
    counts: HashMap<Vec<T>, u64>,
    total: u64,
}

impl<T: Eq + Hash> CountTable<T> {
    pub fn empty(order: usize) -> Self {
        CountTable {
            order,
            counts: HashMap::new(),
            total: 0,
        }
    }

    /// Build a table from an explicit gram -> count map.
    pub fn from_counts(order: usize, counts: HashMap<Vec<T>, u64>) -> Self {
        let total = counts.values().sum();
        CountTable {
            order,
            counts,
            total,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Total gram occurrences (N).
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Distinct gram count (V).
    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    pub fn count(&self, gram: &[T]) -> u64 {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> impl Iterator<Item = (&Vec<T>, u64)> {
        self.counts.iter().map(|(k, &v)| (k, v))
    }
}

impl<T: Eq + Hash + Clone> CountTable<T> {
    fn add_stream(&mut self, tokens: &[T]) {
        if tokens.len() < self.order {
            return;
        }
        for window in tokens.windows(self.order) {
            *self.counts.entry(window.to_vec()).or_insert(0) += 1;
            self.total += 1;
        }
    }

    /// Count tables merge by addition, so sharded counting is exact.
    pub fn merge(&mut self, other: &CountTable<T>) {
        debug_assert_eq!(self.order, other.order);
        for (gram, count) in &other.counts {
            *self.counts.entry(gram.clone()).or_insert(0) += count;
        }
        self.total += other.total;
    }
}

/// Count n-grams over a single token stream.
pub fn count_ngrams<T: Eq + Hash + Clone>(
    tokens: &[T],
    n: usize,
) -> Result<CountTable<T>, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::ZeroOrder);
    }
    let mut table = CountTable::empty(n);
    table.add_stream(tokens);
    Ok(table)
}

/// Count n-grams over many streams; grams never cross stream boundaries.
pub fn count_ngrams_streams<'a, T, I>(streams: I, n: usize) -> Result<CountTable<T>, AnalysisError>
where
    T: Eq + Hash + Clone + 'a,
    I: IntoIterator<Item = &'a [T]>,
{
    if n == 0 {
        return Err(AnalysisError::ZeroOrder);
    }
    let mut table = CountTable::empty(n);
    for stream in streams {
        table.add_stream(stream);
    }
    Ok(table)
}

/// Empirical Shannon entropy in nats.
pub fn entropy_nats<T: Eq + Hash>(table: &CountTable<T>) -> Result<f64, AnalysisError> {
    if table.total == 0 {
        return Err(AnalysisError::EmptyTable);
    }
    let n = table.total as f64;
    let mut h = 0.0;
    for &count in table.counts.values() {
        let p = count as f64 / n;
        h -= p * p.ln();
    }
    // -0.0 from a single-symbol table.
    Ok(h.max(0.0))
}

/// Empirical Shannon entropy of the gram distribution, in bits.
pub fn ngram_entropy<T: Eq + Hash>(table: &CountTable<T>) -> Result<f64, AnalysisError> {
    Ok(entropy_nats(table)? / std::f64::consts::LN_2)
}
