//! Composition sampling: fill per-genre token targets from source pools.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::seeding::seeded_rng;

use super::{CorpusError, DifficultyPartition, Document, DocumentCollection, Genre};

/// Target total size and per-genre fractions for a sampled corpus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CompositionSpec {
    pub total_tokens: u64,
    /// Genre fractions in [0,1]; must sum to 1 within 1e-9.
    pub fractions: BTreeMap<Genre, f64>,
}

impl CompositionSpec {
    pub fn new(total_tokens: u64, fractions: BTreeMap<Genre, f64>) -> Result<Self, CorpusError> {
        let spec = CompositionSpec {
            total_tokens,
            fractions,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<(), CorpusError> {
        let sum: f64 = self.fractions.values().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(CorpusError::FractionSum(sum));
        }
        Ok(())
    }

    /// The pre-training mixture: web 65%, book 5%, wiki 2.5%, textbook 5%,
    /// conversation 2.5%, code 15%, math 5%.
    pub fn pretrain_mixture(total_tokens: u64) -> Self {
        let fractions = BTreeMap::from([
            (Genre::Web, 0.65),
            (Genre::Book, 0.05),
            (Genre::Wiki, 0.025),
            (Genre::Textbook, 0.05),
            (Genre::Conversation, 0.025),
            (Genre::Code, 0.15),
            (Genre::Math, 0.05),
        ]);
        CompositionSpec {
            total_tokens,
            fractions,
        }
    }

    fn target_for(&self, genre: Genre) -> u64 {
        let frac = self.fractions.get(&genre).copied().unwrap_or(0.0);
        (self.total_tokens as f64 * frac).round() as u64
    }
}

/// Sample documents until each genre's token target is crossed.
///
/// Natural-language genres are drawn uniformly at random without
/// replacement. Formal-language genres with a supplied partition are drawn
/// group by group in ascending score order, shuffling within a group and
/// exhausting it before the next. The final document that crosses a target
/// is kept whole, so per-genre overshoot is strictly less than the length
/// of the last selected document.
pub fn sample_composition(
    collection: &DocumentCollection,
    spec: &CompositionSpec,
    partitions: &BTreeMap<Genre, DifficultyPartition>,
    seed: u64,
) -> Result<DocumentCollection, CorpusError> {
    spec.validate()?;

    let mut selected: Vec<Document> = Vec::new();
    // Genres iterate in enum order so one genre's draw never shifts another's.
    for genre in Genre::ALL {
        let target = spec.target_for(genre);
        if target == 0 {
            continue;
        }
        let mut pool = collection.by_genre(genre);
        if pool.is_empty() {
            return Err(CorpusError::MissingGenre(genre));
        }
        let available: u64 = pool.iter().map(|d| d.token_count).sum();
        if available < target {
            return Err(CorpusError::InsufficientTokens {
                genre,
                needed: target,
                available,
                shortfall: target - available,
            });
        }
        // Stable order before the seeded shuffle keeps results independent
        // of ingestion worker count.
        pool.sort_by(|a, b| a.id.cmp(&b.id));

        let label = format!("sampler:{genre}");
        let mut rng = seeded_rng(seed, &label);

        let ordered: Vec<&Document> = match partitions.get(&genre) {
            Some(partition) if genre.is_formal() => {
                let mut out = Vec::with_capacity(pool.len());
                for group in &partition.groups {
                    let mut members: Vec<&Document> = group
                        .doc_ids
                        .iter()
                        .filter_map(|id| pool.iter().copied().find(|d| &d.id == id))
                        .collect();
                    members.shuffle(&mut rng);
                    out.extend(members);
                }
                out
            }
            _ => {
                pool.shuffle(&mut rng);
                pool
            }
        };

        let mut cumulative = 0u64;
        for doc in ordered {
            if cumulative >= target {
                break;
            }
            cumulative += doc.token_count;
            selected.push(doc.clone());
        }
        if cumulative < target {
            // Partition did not cover enough of the pool.
            return Err(CorpusError::InsufficientTokens {
                genre,
                needed: target,
                available: cumulative,
                shortfall: target - cumulative,
            });
        }
    }

    DocumentCollection::from_documents(selected)
}
