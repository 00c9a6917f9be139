//! Seeded response shuffling with an invertible permutation record.

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::JudgeError;

/// One shuffled generation with its assigned label letter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGeneration {
    pub label: char,
    pub model: String,
    pub text: String,
}

/// A question's generations in shuffled label order, with the
/// permutation that produced them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgeBatch {
    pub question_id: String,
    pub labeled: Vec<LabeledGeneration>,
    /// `permutation[i]` is the input position shown under label i.
    pub permutation: Vec<usize>,
}

impl JudgeBatch {
    pub fn model_for(&self, label: char) -> Option<&str> {
        self.labeled
            .iter()
            .find(|g| g.label == label)
            .map(|g| g.model.as_str())
    }

    /// Recover the original input order of model tags.
    pub fn invert(&self) -> Vec<&str> {
        let mut original: Vec<&str> = vec![""; self.permutation.len()];
        for (shuffled_pos, &input_pos) in self.permutation.iter().enumerate() {
            original[input_pos] = self.labeled[shuffled_pos].model.as_str();
        }
        original
    }
}

/// Shuffle generations under the seed and label them A, B, C, ... in
/// shuffled order. At most 26 generations fit the label alphabet.
pub fn shuffle_and_label(
    question_id: &str,
    generations: &[(String, String)],
    seed: u64,
) -> Result<JudgeBatch, JudgeError> {
    if generations.is_empty() {
        return Err(JudgeError::NoGenerations);
    }
    if generations.len() > 26 {
        return Err(JudgeError::TooManyGenerations(generations.len()));
    }
    let mut permutation: Vec<usize> = (0..generations.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    permutation.shuffle(&mut rng);

    let labeled = permutation
        .iter()
        .enumerate()
        .map(|(i, &input_pos)| LabeledGeneration {
            label: (b'A' + i as u8) as char,
            model: generations[input_pos].0.clone(),
            text: generations[input_pos].1.clone(),
        })
        .collect();
    Ok(JudgeBatch {
        question_id: question_id.to_string(),
        labeled,
        permutation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn generations(n: usize) -> Vec<(String, String)> {
        (0..n)
            .map(|i| (format!("model-{i}"), format!("text {i}")))
            .collect()
    }

    #[test]
    fn single_generation_gets_label_a() {
        let batch = shuffle_and_label("q", &generations(1), 5).unwrap();
        assert_eq!(batch.labeled.len(), 1);
        assert_eq!(batch.labeled[0].label, 'A');
        assert_eq!(batch.permutation, vec![0]);
    }

    #[test]
    fn inverse_restores_model_order() {
        let gens = generations(4);
        let batch = shuffle_and_label("q", &gens, 123).unwrap();
        let restored = batch.invert();
        let expected: Vec<&str> = gens.iter().map(|(m, _)| m.as_str()).collect();
        assert_eq!(restored, expected);
    }

    #[test]
    fn unshuffle_identity_over_many_seeds() {
        let gens = generations(6);
        for seed in 0..100 {
            let batch = shuffle_and_label("q", &gens, seed).unwrap();
            let restored = batch.invert();
            let expected: Vec<&str> = gens.iter().map(|(m, _)| m.as_str()).collect();
            assert_eq!(restored, expected, "seed {seed}");
        }
    }

    #[test]
    fn different_seeds_can_assign_differently() {
        let gens = generations(4);
        let a = shuffle_and_label("q", &gens, 0).unwrap();
        let b = shuffle_and_label("q", &gens, 3).unwrap();
        assert_ne!(a.permutation, b.permutation);
    }

    #[test]
    fn too_many_generations_rejected() {
        assert!(matches!(
            shuffle_and_label("q", &generations(27), 1),
            Err(JudgeError::TooManyGenerations(27))
        ));
        assert!(matches!(
            shuffle_and_label("q", &[], 1),
            Err(JudgeError::NoGenerations)
        ));
    }
}
