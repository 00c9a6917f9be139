//! Byte-level BPE with a capped vocabulary and special-token substitution.
//!
//! The alphabet is the 256 single bytes, so encoding is total over
//! arbitrary input (byte fallback) and decoding is exact concatenation.
//! Training greedily merges the most frequent adjacent pair; frequency
//! ties break toward the lexicographically smallest (left, right) byte
//! pair, which makes training deterministic.

mod io;

pub use io::{load_vocab, save_vocab};

use std::collections::{BTreeMap, HashMap};

use thiserror::Error;

use crate::corpus::DocumentCollection;

#[derive(Debug, Error)]
pub enum TokenizerError {
    #[error("target size {0} below byte alphabet + 1 (257)")]
    TargetTooSmall(usize),
    #[error("cannot train on an empty corpus")]
    EmptyCorpus,
    #[error("invalid token id {0}")]
    InvalidId(u32),
    #[error("decoded bytes are not valid UTF-8")]
    InvalidUtf8,
    #[error("duplicate special name '{0}'")]
    DuplicateSpecial(String),
    #[error("{0} special names exceed vocabulary size {1}")]
    TooManySpecials(usize, usize),
    #[error("vocabulary file error: {0}")]
    Format(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A record of one token replaced by a special.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReplacedToken {
    pub id: u32,
    pub former_bytes: Vec<u8>,
    pub special: String,
    pub frequency: u64,
}

/// A trained vocabulary: token byte-sequences, ordered merge rules, and
/// any substituted special tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocab {
    tokens: Vec<Vec<u8>>,
    merges: Vec<(u32, u32)>,
    specials: BTreeMap<String, u32>,
    target_size: usize,
    /// Token frequencies from encoding the training corpus once with the
    /// final merges; drives least-frequent substitution.
    frequencies: Vec<u64>,
    replaced: Vec<ReplacedToken>,
}

impl Vocab {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn merges(&self) -> &[(u32, u32)] {
        &self.merges
    }

    pub fn token_bytes(&self, id: u32) -> Result<&[u8], TokenizerError> {
        self.tokens
            .get(id as usize)
            .map(Vec::as_slice)
            .ok_or(TokenizerError::InvalidId(id))
    }

    pub fn specials(&self) -> &BTreeMap<String, u32> {
        &self.specials
    }

    pub fn replaced(&self) -> &[ReplacedToken] {
        &self.replaced
    }

    pub fn frequency(&self, id: u32) -> u64 {
        self.frequencies.get(id as usize).copied().unwrap_or(0)
    }

    /// Encode text by byte fallback plus the merge rules in training order.
    pub fn encode(&self, text: &str) -> Vec<u32> {
        let mut ids: Vec<u32> = text.bytes().map(u32::from).collect();
        for (merge_idx, &(left, right)) in self.merges.iter().enumerate() {
            let new_id = 256 + merge_idx as u32;
            apply_merge(&mut ids, left, right, new_id);
        }
        ids
    }

    /// Decode ids to raw bytes.
    pub fn decode_bytes(&self, ids: &[u32]) -> Result<Vec<u8>, TokenizerError> {
        let mut out = Vec::new();
        for &id in ids {
            out.extend_from_slice(self.token_bytes(id)?);
        }
        Ok(out)
    }

    /// Decode ids to text; fails if the bytes are not valid UTF-8.
    pub fn decode(&self, ids: &[u32]) -> Result<String, TokenizerError> {
        String::from_utf8(self.decode_bytes(ids)?).map_err(|_| TokenizerError::InvalidUtf8)
    }

    /// Replace the k least-frequent non-special tokens with the named
    /// specials, in place. Frequency ties resolve toward the higher id.
    /// Vocabulary size is unchanged and every replacement is recorded.
    pub fn substitute_special(mut self, special_names: &[String]) -> Result<Vocab, TokenizerError> {
        if special_names.len() > self.tokens.len() {
            return Err(TokenizerError::TooManySpecials(
                special_names.len(),
                self.tokens.len(),
            ));
        }
        let mut seen = std::collections::HashSet::new();
        for name in special_names {
            if !seen.insert(name.as_str()) || self.specials.contains_key(name) {
                return Err(TokenizerError::DuplicateSpecial(name.clone()));
            }
        }

        let special_ids: std::collections::HashSet<u32> =
            self.specials.values().copied().collect();
        let mut candidates: Vec<u32> = (0..self.tokens.len() as u32)
            .filter(|id| !special_ids.contains(id))
            .collect();
        candidates.sort_by(|&a, &b| {
            self.frequency(a)
                .cmp(&self.frequency(b))
                .then_with(|| b.cmp(&a))
        });

        for (name, &id) in special_names.iter().zip(candidates.iter()) {
            let former = std::mem::replace(
                &mut self.tokens[id as usize],
                name.as_bytes().to_vec(),
            );
            self.replaced.push(ReplacedToken {
                id,
                former_bytes: former,
                special: name.clone(),
                frequency: self.frequency(id),
            });
            self.specials.insert(name.clone(), id);
        }
        Ok(self)
    }
}

/// Replace adjacent (left, right) id pairs with new_id, left to right.
fn apply_merge(ids: &mut Vec<u32>, left: u32, right: u32, new_id: u32) {
    let mut write = 0;
    let mut read = 0;
    while read < ids.len() {
        if read + 1 < ids.len() && ids[read] == left && ids[read + 1] == right {
            ids[write] = new_id;
            read += 2;
        } else {
            ids[write] = ids[read];
            read += 1;
        }
        write += 1;
    }
    ids.truncate(write);
}

/// Count adjacent pairs over every sequence.
fn pair_counts(sequences: &[Vec<u32>]) -> HashMap<(u32, u32), u64> {
    let mut counts = HashMap::new();
    for seq in sequences {
        for pair in seq.windows(2) {
            *counts.entry((pair[0], pair[1])).or_insert(0u64) += 1;
        }
    }
    counts
}

/// Train a BPE vocabulary capped at `target_size` tokens.
///
/// Merging stops when the cap is reached or no adjacent pair occurs
/// twice. Documents never merge across their boundaries.
pub fn train_bpe(
    corpus: &DocumentCollection,
    target_size: usize,
) -> Result<Vocab, TokenizerError> {
    if target_size < 257 {
        return Err(TokenizerError::TargetTooSmall(target_size));
    }
    if corpus.is_empty() {
        return Err(TokenizerError::EmptyCorpus);
    }

    let mut tokens: Vec<Vec<u8>> = (0..=255u8).map(|b| vec![b]).collect();
    let mut sequences: Vec<Vec<u32>> = corpus
        .iter()
        .map(|d| d.text.bytes().map(u32::from).collect())
        .collect();
    let mut merges: Vec<(u32, u32)> = Vec::new();

    while tokens.len() < target_size {
        let counts = pair_counts(&sequences);
        let best = counts
            .iter()
            .filter(|(_, &count)| count >= 2)
            .min_by(|(pair_a, count_a), (pair_b, count_b)| {
                count_b.cmp(count_a).then_with(|| {
                    let key = |p: &(u32, u32)| {
                        (
                            tokens[p.0 as usize].clone(),
                            tokens[p.1 as usize].clone(),
                        )
                    };
                    key(pair_a).cmp(&key(pair_b))
                })
            })
            .map(|(&pair, _)| pair);
        let Some((left, right)) = best else {
            break;
        };

        let mut bytes = tokens[left as usize].clone();
        bytes.extend_from_slice(&tokens[right as usize]);
        let new_id = tokens.len() as u32;
        tokens.push(bytes);
        merges.push((left, right));
        for seq in &mut sequences {
            apply_merge(seq, left, right, new_id);
        }
    }

    let mut frequencies = vec![0u64; tokens.len()];
    for seq in &sequences {
        for &id in seq {
            frequencies[id as usize] += 1;
        }
    }

    Ok(Vocab {
        tokens,
        merges,
        specials: BTreeMap::new(),
        target_size,
        frequencies,
        replaced: Vec::new(),
    })
}
