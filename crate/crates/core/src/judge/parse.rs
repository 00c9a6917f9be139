//! The judge score format: one `<LABEL>. g\tc\ts` entry per generation,
//! scores on the 0-5 integer scale.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use super::JudgeError;

/// Grammar, coherence, and specificity scores for one generation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreTriple {
    pub grammar: u8,
    pub coherence: u8,
    pub specificity: u8,
}

impl ScoreTriple {
    pub fn new(grammar: u8, coherence: u8, specificity: u8) -> Result<Self, JudgeError> {
        for v in [grammar, coherence, specificity] {
            if v > 5 {
                return Err(JudgeError::ScoreOutOfRange(v as u32));
            }
        }
        Ok(ScoreTriple {
            grammar,
            coherence,
            specificity,
        })
    }

    /// Total in 0..=15.
    pub fn sum(&self) -> u8 {
        self.grammar + self.coherence + self.specificity
    }
}

fn entry_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    // label, dot, then three tab-separated integers
    RE.get_or_init(|| Regex::new(r"([A-Z])\.\s*(\d+)\t(\d+)\t(\d+)").expect("valid regex"))
}

/// Parse a judge response into per-label score triples.
///
/// Entries may share a line or sit one per line; any leftover
/// non-whitespace on a line is an error naming that line, as are
/// duplicate labels and scores outside 0..=5.
pub fn parse_scores(raw: &str) -> Result<BTreeMap<char, ScoreTriple>, JudgeError> {
    let mut scores = BTreeMap::new();
    for (idx, line) in raw.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut matched_spans: Vec<(usize, usize)> = Vec::new();
        for caps in entry_re().captures_iter(line) {
            let whole = caps.get(0).expect("match");
            matched_spans.push((whole.start(), whole.end()));
            let label = caps[1].chars().next().expect("one letter");
            let parse = |i: usize| -> Result<u8, JudgeError> {
                let v: u32 = caps[i].parse().map_err(|_| JudgeError::ParseLine {
                    line_no,
                    content: line.to_string(),
                    reason: format!("bad integer '{}'", &caps[i]),
                })?;
                if v > 5 {
                    return Err(JudgeError::ScoreOutOfRange(v));
                }
                Ok(v as u8)
            };
            let triple = ScoreTriple {
                grammar: parse(2)?,
                coherence: parse(3)?,
                specificity: parse(4)?,
            };
            if scores.insert(label, triple).is_some() {
                return Err(JudgeError::DuplicateLabel(label));
            }
        }
        let mut leftover = String::new();
        let mut cursor = 0;
        for &(s, e) in &matched_spans {
            leftover.push_str(&line[cursor..s]);
            cursor = e;
        }
        leftover.push_str(&line[cursor..]);
        if !leftover.trim().is_empty() {
            return Err(JudgeError::ParseLine {
                line_no,
                content: line.to_string(),
                reason: format!("unrecognized text {:?}", leftover.trim()),
            });
        }
    }
    if scores.is_empty() {
        return Err(JudgeError::EmptyResponse);
    }
    Ok(scores)
}

/// Render triples in the documented format, one entry per line.
pub fn render_scores(scores: &BTreeMap<char, ScoreTriple>) -> String {
    scores
        .iter()
        .map(|(label, t)| format!("{label}. {}\t{}\t{}", t.grammar, t.coherence, t.specificity))
        .collect::<Vec<_>>()
        .join("\n")
}
