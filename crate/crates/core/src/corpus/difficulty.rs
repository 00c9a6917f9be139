//! Difficulty ranking of formal-language categories from graded samples.

use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use super::{CorpusError, DifficultyGroup, DifficultyPartition, Genre};

/// Difficulty grades assigned to sampled problems, easiest to hardest.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Grade {
    A,
    B,
    C,
    D,
    E,
    F,
}

impl Grade {
    pub const ALL: [Grade; 6] = [Grade::A, Grade::B, Grade::C, Grade::D, Grade::E, Grade::F];

    pub fn from_letter(c: char) -> Result<Self, CorpusError> {
        match c {
            'A' => Ok(Grade::A),
            'B' => Ok(Grade::B),
            'C' => Ok(Grade::C),
            'D' => Ok(Grade::D),
            'E' => Ok(Grade::E),
            'F' => Ok(Grade::F),
            other => Err(CorpusError::UnknownGrade(other)),
        }
    }

    pub fn letter(self) -> char {
        match self {
            Grade::A => 'A',
            Grade::B => 'B',
            Grade::C => 'C',
            Grade::D => 'D',
            Grade::E => 'E',
            Grade::F => 'F',
        }
    }
}

/// Per-grade integer scores; must increase strictly from A to F.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradeScores(BTreeMap<Grade, u64>);

impl GradeScores {
    pub fn new(scores: BTreeMap<Grade, u64>) -> Result<Self, CorpusError> {
        let mut prev: Option<u64> = None;
        for grade in Grade::ALL {
            let s = *scores.get(&grade).unwrap_or(&0);
            if let Some(p) = prev {
                if s <= p {
                    return Err(CorpusError::NonIncreasingGradeScores);
                }
            }
            prev = Some(s);
        }
        Ok(GradeScores(scores))
    }

    pub fn score(&self, grade: Grade) -> u64 {
        *self.0.get(&grade).unwrap_or(&0)
    }
}

impl Default for GradeScores {
    /// Powers of two starting at 1: the smallest integer family with
    /// exponentially increasing scores.
    fn default() -> Self {
        GradeScores(BTreeMap::from([
            (Grade::A, 1),
            (Grade::B, 2),
            (Grade::C, 4),
            (Grade::D, 8),
            (Grade::E, 16),
            (Grade::F, 32),
        ]))
    }
}

/// One graded sample inside a category.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GradedSample {
    pub id: String,
    pub grade: Grade,
}

/// Score each category by the sum of its samples' grade scores, then order
/// categories ascending; ties break lexicographically by category name.
pub fn rank_formal_difficulty(
    genre: Genre,
    categories: &BTreeMap<String, Vec<GradedSample>>,
    grade_scores: &GradeScores,
) -> Result<DifficultyPartition, CorpusError> {
    let mut seen: HashSet<&str> = HashSet::new();
    let mut groups: Vec<DifficultyGroup> = Vec::with_capacity(categories.len());
    for (name, samples) in categories {
        let mut score = 0u64;
        let mut doc_ids = Vec::with_capacity(samples.len());
        for sample in samples {
            if !seen.insert(sample.id.as_str()) {
                return Err(CorpusError::DuplicateSampleAcrossCategories(
                    sample.id.clone(),
                ));
            }
            score += grade_scores.score(sample.grade);
            doc_ids.push(sample.id.clone());
        }
        groups.push(DifficultyGroup {
            label: name.clone(),
            doc_ids,
            score,
        });
    }
    groups.sort_by(|a, b| a.score.cmp(&b.score).then_with(|| a.label.cmp(&b.label)));
    Ok(DifficultyPartition { genre, groups })
}

/// Parse a numbered grading response ("1. B\n2. A\n...") into grades.
///
/// Lines must lead with the 1-based index matching their position.
pub fn parse_grading_response(raw: &str, expected: usize) -> Result<Vec<Grade>, CorpusError> {
    let mut grades = Vec::with_capacity(expected);
    for line in raw.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let rest = match line.split_once('.') {
            Some((idx, rest)) if idx.trim().parse::<usize>() == Ok(grades.len() + 1) => rest,
            _ => continue,
        };
        let letter = rest
            .trim()
            .chars()
            .next()
            .ok_or(CorpusError::UnknownGrade(' '))?;
        grades.push(Grade::from_letter(letter)?);
        if grades.len() == expected {
            break;
        }
    }
    if grades.len() != expected {
        return Err(CorpusError::UnknownGrade('?'));
    }
    Ok(grades)
}
