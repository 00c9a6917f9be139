//! Corpus-level statistics tables: token totals by genre and split, and
//! the per-class n-gram entropy grid.

use std::collections::BTreeMap;

use crate::corpus::{DocumentCollection, Genre, Split};
use crate::report::Table;

use super::{count_ngrams_streams, ngram_entropy, AnalysisError};

/// Genre families used as entropy-report columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum GenreClass {
    All,
    Natural,
    Formal,
    Instruct,
}

impl GenreClass {
    pub const ALL: [GenreClass; 4] = [
        GenreClass::All,
        GenreClass::Natural,
        GenreClass::Formal,
        GenreClass::Instruct,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            GenreClass::All => "all",
            GenreClass::Natural => "natural",
            GenreClass::Formal => "formal",
            GenreClass::Instruct => "instruct",
        }
    }

    fn contains(self, genre: Genre) -> bool {
        match self {
            GenreClass::All => true,
            GenreClass::Natural => genre.is_natural(),
            GenreClass::Formal => genre.is_formal(),
            GenreClass::Instruct => genre == Genre::Instruct,
        }
    }
}

/// Token totals by genre and split.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CorpusStats {
    pub cells: BTreeMap<(Genre, Split), u64>,
}

impl CorpusStats {
    pub fn genre_total(&self, genre: Genre) -> u64 {
        self.cells
            .iter()
            .filter(|((g, _), _)| *g == genre)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn split_total(&self, split: Split) -> u64 {
        self.cells
            .iter()
            .filter(|((_, s), _)| *s == split)
            .map(|(_, v)| v)
            .sum()
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }

    fn genres(&self) -> Vec<Genre> {
        Genre::ALL
            .into_iter()
            .filter(|g| self.genre_total(*g) > 0)
            .collect()
    }

    /// Rows All/train/validation/test, columns total plus each present
    /// genre, raw token counts.
    pub fn to_table(&self) -> Table {
        let genres = self.genres();
        let mut header = vec!["tokens".to_string(), "all".to_string()];
        header.extend(genres.iter().map(|g| g.to_string()));
        let mut table = Table::new(header);

        let mut all_row = vec!["all".to_string(), self.total().to_string()];
        all_row.extend(genres.iter().map(|g| self.genre_total(*g).to_string()));
        table.push_row(all_row);

        for split in Split::ALL {
            let mut row = vec![split.to_string(), self.split_total(split).to_string()];
            row.extend(
                genres
                    .iter()
                    .map(|g| self.cells.get(&(*g, split)).copied().unwrap_or(0).to_string()),
            );
            table.push_row(row);
        }
        table
    }

    /// Same layout scaled to millions of tokens.
    pub fn to_table_millions(&self) -> Table {
        let m = |v: u64| format!("{:.2}", v as f64 / 1e6);
        let genres = self.genres();
        let mut header = vec!["M tokens".to_string(), "all".to_string()];
        header.extend(genres.iter().map(|g| g.to_string()));
        let mut table = Table::new(header);

        let mut all_row = vec!["all".to_string(), m(self.total())];
        all_row.extend(genres.iter().map(|g| m(self.genre_total(*g))));
        table.push_row(all_row);

        for split in Split::ALL {
            let mut row = vec![split.to_string(), m(self.split_total(split))];
            row.extend(
                genres
                    .iter()
                    .map(|g| m(self.cells.get(&(*g, split)).copied().unwrap_or(0))),
            );
            table.push_row(row);
        }
        table
    }
}

/// Sum token counts by genre and split.
pub fn corpus_stats(collection: &DocumentCollection) -> CorpusStats {
    CorpusStats {
        cells: collection.genre_split_tokens(),
    }
}

/// N-gram entropy (bits) per order and genre class.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusEntropyTable {
    pub orders: Vec<usize>,
    /// (class, order) -> entropy in bits; absent when a class is empty.
    pub values: BTreeMap<(GenreClass, usize), f64>,
}

impl CorpusEntropyTable {
    pub fn to_table(&self) -> Table {
        let mut header = vec!["n-gram".to_string()];
        header.extend(GenreClass::ALL.iter().map(|c| c.as_str().to_string()));
        let mut table = Table::new(header);
        for &order in &self.orders {
            let mut row = vec![order.to_string()];
            for class in GenreClass::ALL {
                row.push(match self.values.get(&(class, order)) {
                    Some(h) => format!("{h:.4}"),
                    None => "-".to_string(),
                });
            }
            table.push_row(row);
        }
        table
    }
}

/// Compute per-class entropy over whitespace tokens for each order.
///
/// Grams are counted within documents only; empty classes are left out
/// rather than reported as zero.
pub fn corpus_entropy_table(
    collection: &DocumentCollection,
    orders: &[usize],
) -> Result<CorpusEntropyTable, AnalysisError> {
    let tokenized: Vec<(Genre, Vec<&str>)> = collection
        .iter()
        .map(|d| (d.genre, d.text.split_whitespace().collect()))
        .collect();

    let mut values = BTreeMap::new();
    for &order in orders {
        if order == 0 {
            return Err(AnalysisError::ZeroOrder);
        }
        for class in GenreClass::ALL {
            let streams = tokenized
                .iter()
                .filter(|(g, _)| class.contains(*g))
                .map(|(_, toks)| toks.as_slice());
            let table = count_ngrams_streams(streams, order)?;
            if table.total() > 0 {
                values.insert((class, order), ngram_entropy(&table)?);
            }
        }
    }
    Ok(CorpusEntropyTable {
        orders: orders.to_vec(),
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    #[test]
    fn empty_collection_is_all_zero() {
        let stats = corpus_stats(&DocumentCollection::new());
        assert_eq!(stats.total(), 0);
        assert_eq!(stats.genre_total(Genre::Web), 0);
    }

    #[test]
    fn sums_by_genre_and_split() {
        let docs = vec![
            Document::new("a", Genre::Web, Split::Train, "one two three four five six seven eight nine ten"),
            Document::new("b", Genre::Web, Split::Train, &vec!["w"; 20].join(" ")),
        ];
        let stats = corpus_stats(&DocumentCollection::from_documents(docs).unwrap());
        assert_eq!(stats.cells.get(&(Genre::Web, Split::Train)), Some(&30));
        assert_eq!(stats.total(), 30);
    }

    #[test]
    fn entropy_table_covers_present_classes() {
        let docs = vec![
            Document::new("a", Genre::Web, Split::Train, "a b a b"),
            Document::new("b", Genre::Code, Split::Train, "x y"),
        ];
        let collection = DocumentCollection::from_documents(docs).unwrap();
        let report = corpus_entropy_table(&collection, &[1, 2, 3]).unwrap();
        let h1_nat = report.values.get(&(GenreClass::Natural, 1)).unwrap();
        assert!((h1_nat - 1.0).abs() < 1e-12);
        // No instruct documents: cells absent.
        assert!(report.values.get(&(GenreClass::Instruct, 1)).is_none());
        // Code stream is too short for trigrams.
        assert!(report.values.get(&(GenreClass::Formal, 3)).is_none());
        let text = report.to_table().to_text();
        assert!(text.contains("n-gram"));
    }
}
