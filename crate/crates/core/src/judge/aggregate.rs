//! Aggregate scored responses into the per-model report: overall metric
//! means plus mean total score per similarity bin.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::benchgen::SimilarityBin;
use crate::report::Table;

use super::{JudgeError, QuestionBins, ScoreTriple};

/// One judged (question, model) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoredResponse {
    pub question_id: String,
    pub model: String,
    pub scores: ScoreTriple,
}

/// Per-model aggregates. Means are exact; display rounds to one decimal.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSummary {
    pub model: String,
    pub questions: usize,
    pub mean_grammar: f64,
    pub mean_coherence: f64,
    pub mean_specificity: f64,
    pub mean_sum: f64,
    /// Mean total per similarity bin; a bin with no questions is absent.
    pub bin_mean_sum: BTreeMap<SimilarityBin, f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct JudgeReport {
    pub models: Vec<ModelSummary>,
}

impl JudgeReport {
    /// Columns: model, the three metric means, overall mean sum, then one
    /// column per similarity range. Empty bins render as empty cells.
    pub fn to_table(&self) -> Table {
        let mut header = vec![
            "model".to_string(),
            "grammar".to_string(),
            "coherence".to_string(),
            "specificity".to_string(),
            "sum".to_string(),
        ];
        header.extend(SimilarityBin::ALL.iter().map(|b| b.label().to_string()));
        let mut table = Table::new(header);
        for m in &self.models {
            let mut row = vec![
                m.model.clone(),
                format!("{:.1}", m.mean_grammar),
                format!("{:.1}", m.mean_coherence),
                format!("{:.1}", m.mean_specificity),
                format!("{:.1}", m.mean_sum),
            ];
            for bin in SimilarityBin::ALL {
                row.push(
                    m.bin_mean_sum
                        .get(&bin)
                        .map(|v| format!("{v:.1}"))
                        .unwrap_or_default(),
                );
            }
            table.push_row(row);
        }
        table
    }

    pub fn to_csv(&self) -> String {
        self.to_table().to_csv()
    }
}

/// Fold scored responses into the report. Every response's question must
/// have a similarity bin.
pub fn aggregate(
    scored: &[ScoredResponse],
    bins: &QuestionBins,
) -> Result<JudgeReport, JudgeError> {
    for response in scored {
        if !bins.contains_key(&response.question_id) {
            return Err(JudgeError::MissingBin(response.question_id.clone()));
        }
    }
    let mut by_model: BTreeMap<&str, Vec<&ScoredResponse>> = BTreeMap::new();
    for response in scored {
        by_model
            .entry(response.model.as_str())
            .or_default()
            .push(response);
    }
    let mut models = Vec::with_capacity(by_model.len());
    for (model, responses) in by_model {
        let n = responses.len() as f64;
        let mean = |f: &dyn Fn(&ScoreTriple) -> f64| {
            responses.iter().map(|r| f(&r.scores)).sum::<f64>() / n
        };
        let mut bin_totals: BTreeMap<SimilarityBin, (f64, usize)> = BTreeMap::new();
        for r in &responses {
            let bin = bins[&r.question_id];
            let entry = bin_totals.entry(bin).or_insert((0.0, 0));
            entry.0 += r.scores.sum() as f64;
            entry.1 += 1;
        }
        models.push(ModelSummary {
            model: model.to_string(),
            questions: responses.len(),
            mean_grammar: mean(&|t| t.grammar as f64),
            mean_coherence: mean(&|t| t.coherence as f64),
            mean_specificity: mean(&|t| t.specificity as f64),
            mean_sum: mean(&|t| t.sum() as f64),
            bin_mean_sum: bin_totals
                .into_iter()
                .map(|(bin, (total, count))| (bin, total / count as f64))
                .collect(),
        });
    }
    Ok(JudgeReport { models })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn response(q: &str, model: &str, g: u8, c: u8, s: u8) -> ScoredResponse {
        ScoredResponse {
            question_id: q.to_string(),
            model: model.to_string(),
            scores: ScoreTriple::new(g, c, s).unwrap(),
        }
    }

    fn bins(pairs: &[(&str, SimilarityBin)]) -> QuestionBins {
        pairs
            .iter()
            .map(|(q, b)| (q.to_string(), *b))
            .collect()
    }

    #[test]
    fn mean_sum_by_hand() {
        let scored = vec![
            response("q1", "m", 1, 1, 0),
            response("q2", "m", 2, 1, 1),
        ];
        let bins = bins(&[("q1", SimilarityBin::Low), ("q2", SimilarityBin::Low)]);
        let report = aggregate(&scored, &bins).unwrap();
        assert_eq!(report.models.len(), 1);
        let m = &report.models[0];
        assert!((m.mean_sum - 3.0).abs() < 1e-12);
        assert!((m.mean_grammar - 1.5).abs() < 1e-12);
        assert_eq!(m.questions, 2);
    }

    #[test]
    fn empty_bins_are_absent_not_zero() {
        let scored = vec![response("q1", "m", 5, 5, 5)];
        let bins = bins(&[("q1", SimilarityBin::Mid)]);
        let report = aggregate(&scored, &bins).unwrap();
        let m = &report.models[0];
        assert_eq!(m.bin_mean_sum.len(), 1);
        assert!(m.bin_mean_sum.contains_key(&SimilarityBin::Mid));
        assert!(!m.bin_mean_sum.contains_key(&SimilarityBin::Low));
        // the empty-bin cell renders empty
        let table = report.to_table();
        let row = &table.rows[0];
        assert_eq!(row[5], "");
        assert_eq!(row[6], "15.0");
    }

    #[test]
    fn duplicating_responses_leaves_means_unchanged() {
        let base = vec![
            response("q1", "m", 4, 3, 2),
            response("q2", "m", 1, 0, 2),
        ];
        let mut doubled = base.clone();
        doubled.extend(base.clone());
        let bins = bins(&[("q1", SimilarityBin::Low), ("q2", SimilarityBin::Top)]);
        let a = aggregate(&base, &bins).unwrap();
        let b = aggregate(&doubled, &bins).unwrap();
        assert_eq!(a.models[0].mean_sum, b.models[0].mean_sum);
        assert_eq!(a.models[0].mean_grammar, b.models[0].mean_grammar);
        assert_eq!(a.models[0].bin_mean_sum, b.models[0].bin_mean_sum);
    }

    #[test]
    fn missing_bin_is_an_error() {
        let scored = vec![response("q9", "m", 1, 1, 1)];
        assert!(matches!(
            aggregate(&scored, &QuestionBins::new()),
            Err(JudgeError::MissingBin(q)) if q == "q9"
        ));
    }

    #[test]
    fn csv_has_table5_columns() {
        let scored = vec![
            response("q1", "model-x", 1, 1, 1),
            response("q1", "model-y", 2, 2, 2),
        ];
        let bins = bins(&[("q1", SimilarityBin::High)]);
        let report = aggregate(&scored, &bins).unwrap();
        let csv = report.to_csv();
        assert!(csv.starts_with(
            "model,grammar,coherence,specificity,sum,0-0.7,0.7-0.8,0.8-0.9,0.9-1\n"
        ));
        assert!(csv.contains("model-x,1.0,1.0,1.0,3.0"));
    }
}
