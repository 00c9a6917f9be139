//! Dataset complexity: the multinomial pattern count N!/(c_1!...c_V!), its
//! entropy bounds, and the pseudo-complexity of a context-window partition.

use std::hash::Hash;

use num_bigint::BigUint;
use statrs::function::gamma::ln_gamma;

use super::{count_ngrams, entropy_nats, AnalysisError, CountTable};

/// Exact factorials below this size; log-gamma above.
const EXACT_FACTORIAL_LIMIT: u64 = 1000;
const REL_TOL: f64 = 1e-9;

/// ln(x) of an arbitrary-size positive integer.
fn ln_biguint(x: &BigUint) -> f64 {
    let bits = x.bits();
    if bits <= 63 {
        let v: u64 = x.try_into().expect("fits u64");
        return (v as f64).ln();
    }
    let shift = bits - 53;
    let mantissa: u64 = (x >> shift).try_into().expect("53 bits fit u64");
    (mantissa as f64).ln() + shift as f64 * std::f64::consts::LN_2
}

fn factorial_big(n: u64) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for k in 2..=n {
        acc *= k;
    }
    acc
}

/// ln(n!): exact integer arithmetic for small n, log-gamma beyond.
pub fn ln_factorial(n: u64) -> f64 {
    if n <= 1 {
        0.0
    } else if n <= EXACT_FACTORIAL_LIMIT {
        ln_biguint(&factorial_big(n))
    } else {
        ln_gamma(n as f64 + 1.0)
    }
}

/// The complexity of a unigram count table, with its theorem bounds.
///
/// All quantities are natural logarithms of pattern counts.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityReport {
    /// ln(N! / prod c_v!), the log pattern count.
    pub log_c_exact: f64,
    /// ln(N!/N^N), the constant term shared by both bounds.
    pub c_const: f64,
    /// c_const + N * H (entropy in nats).
    pub lower: f64,
    /// c_const + N * ln N.
    pub upper: f64,
    pub total: u64,
    pub distinct: usize,
}

/// Compute the complexity report for a unigram count table.
///
/// For N within exact-factorial range the log count is cross-checked
/// against the big-integer multinomial coefficient to 1e-9 relative.
pub fn complexity_report<T: Eq + Hash>(
    table: &CountTable<T>,
) -> Result<ComplexityReport, AnalysisError> {
    if table.total() == 0 {
        return Err(AnalysisError::EmptyTable);
    }
    let n = table.total();
    let n_f = n as f64;

    let mut log_c_exact = ln_factorial(n);
    for (_, count) in table.counts() {
        log_c_exact -= ln_factorial(count);
    }

    let h_nats = entropy_nats(table)?;
    let c_const = ln_factorial(n) - n_f * n_f.ln();
    let lower = c_const + n_f * h_nats;
    let upper = c_const + n_f * n_f.ln();

    if n <= EXACT_FACTORIAL_LIMIT {
        // Exact multinomial: N! / prod(c_v!) divides evenly.
        let mut denom = BigUint::from(1u32);
        for (_, count) in table.counts() {
            denom *= factorial_big(count);
        }
        let exact = factorial_big(n) / denom;
        let reference = ln_biguint(&exact);
        let tol = REL_TOL * reference.abs().max(1.0);
        if (log_c_exact - reference).abs() > tol {
            return Err(AnalysisError::BoundViolation(format!(
                "log-factorial route {log_c_exact} disagrees with exact multinomial {reference}"
            )));
        }
    }

    let tol = REL_TOL * log_c_exact.abs().max(1.0);
    if lower > log_c_exact + tol || log_c_exact > upper + tol {
        return Err(AnalysisError::BoundViolation(format!(
            "expected {lower} <= {log_c_exact} <= {upper}"
        )));
    }

    Ok(ComplexityReport {
        log_c_exact,
        c_const,
        lower,
        upper,
        total: n,
        distinct: table.distinct(),
    })
}

/// Log pattern-count sum across fixed-length context windows, with its
/// lower bound. A trailing window shorter than L is dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoComplexityReport {
    /// ln of the summed per-window complexities.
    pub log_sum: f64,
    /// ln(S * L!/L^L) + L * mean window entropy (nats).
    pub lower: f64,
    pub window_len: usize,
    pub window_count: usize,
}

/// Partition `tokens` into windows of exactly `window_len` tokens and
/// combine the per-window complexities with a stable log-sum-exp.
pub fn pseudo_complexity<T: Eq + Hash + Clone>(
    tokens: &[T],
    window_len: usize,
) -> Result<PseudoComplexityReport, AnalysisError> {
    pseudo_complexity_streams([tokens], window_len)
}

/// As [`pseudo_complexity`], with windows drawn from several token
/// streams; windows never cross a stream boundary and each stream's
/// trailing partial window is dropped.
pub fn pseudo_complexity_streams<'a, T, I>(
    streams: I,
    window_len: usize,
) -> Result<PseudoComplexityReport, AnalysisError>
where
    T: Eq + Hash + Clone + 'a,
    I: IntoIterator<Item = &'a [T]>,
{
    if window_len == 0 {
        return Err(AnalysisError::ZeroWindow);
    }
    let l_f = window_len as f64;

    let mut window_logs = Vec::new();
    let mut entropy_sum = 0.0;
    let mut longest = 0usize;
    for tokens in streams {
        longest = longest.max(tokens.len());
        let stream_windows = tokens.len() / window_len;
        for s in 0..stream_windows {
            let window = &tokens[s * window_len..(s + 1) * window_len];
            let counts = count_ngrams(window, 1)?;
            let mut w = ln_factorial(window_len as u64);
            for (_, c) in counts.counts() {
                w -= ln_factorial(c);
            }
            window_logs.push(w);
            entropy_sum += entropy_nats(&counts)?;
        }
    }
    let window_count = window_logs.len();
    if window_count == 0 {
        return Err(AnalysisError::TooFewTokens(window_len, longest));
    }

    let log_sum = log_sum_exp(&window_logs);
    let mean_entropy = entropy_sum / window_count as f64;
    let lower = (window_count as f64).ln() + ln_factorial(window_len as u64) - l_f * l_f.ln()
        + l_f * mean_entropy;

    let tol = REL_TOL * log_sum.abs().max(1.0);
    if lower > log_sum + tol {
        return Err(AnalysisError::BoundViolation(format!(
            "pseudo-complexity lower bound {lower} exceeds log-sum {log_sum}"
        )));
    }

    Ok(PseudoComplexityReport {
        log_sum,
        lower,
        window_len,
        window_count,
    })
}

fn log_sum_exp(logs: &[f64]) -> f64 {
    let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let sum: f64 = logs.iter().map(|&w| (w - max).exp()).sum();
    max + sum.ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    fn table(counts: &[(&str, u64)]) -> CountTable<&'static str> {
        let map: HashMap<Vec<&str>, u64> = counts
            .iter()
            .map(|&(tok, c)| {
                let tok: &'static str = Box::leak(tok.to_string().into_boxed_str());
                (vec![tok], c)
            })
            .collect();
        CountTable::from_counts(1, map)
    }

    #[test]
    fn two_by_two_table_matches_hand_values() {
        // 4!/(2! 2!) = 6
        let report = complexity_report(&table(&[("a", 2), ("b", 2)])).unwrap();
        assert!((report.log_c_exact - 6f64.ln()).abs() < 1e-12);
        let c = (24.0f64 / 256.0).ln();
        assert!((report.c_const - c).abs() < 1e-12);
        assert!((report.lower - (c + 4.0 * 2f64.ln())).abs() < 1e-12);
        assert!((report.upper - (c + 4.0 * 4f64.ln())).abs() < 1e-12);
        assert!(report.lower <= report.log_c_exact);
        assert!(report.log_c_exact <= report.upper);
    }

    #[test]
    fn single_symbol_corpus_has_one_pattern() {
        for n in [1u64, 5, 40] {
            let report = complexity_report(&table(&[("a", n)])).unwrap();
            assert!(report.log_c_exact.abs() < 1e-9, "n={n}");
            assert!(report.lower <= 1e-9);
        }
    }

    #[test]
    fn ln_factorial_routes_agree_near_the_switch() {
        // Stirling route against the exact product around the cutoff.
        let exact = ln_biguint(&factorial_big(1200));
        let gamma = ln_gamma(1200f64 + 1.0);
        assert!((exact - gamma).abs() / exact < 1e-12);
    }

    #[test]
    fn window_trace_by_hand() {
        let tokens: Vec<&str> = "a b a b".split_whitespace().collect();
        let report = pseudo_complexity(&tokens, 2).unwrap();
        // Two [a b] windows, each 2!/(1!1!) = 2; sum = 4.
        assert!((report.log_sum - 4f64.ln()).abs() < 1e-12);
        // ln(2*2!/2^2) + 2*ln 2 = ln 4: bound met with equality.
        assert!((report.lower - 4f64.ln()).abs() < 1e-12);
        assert_eq!(report.window_count, 2);
    }

    #[test]
    fn constant_stream_has_zero_log_sum() {
        let tokens = vec!["a"; 4];
        let report = pseudo_complexity(&tokens, 4).unwrap();
        assert!(report.log_sum.abs() < 1e-12);
        assert_eq!(report.window_count, 1);
    }

    #[test]
    fn tail_window_is_dropped() {
        let tokens: Vec<&str> = "a b c a b".split_whitespace().collect();
        let report = pseudo_complexity(&tokens, 2).unwrap();
        assert_eq!(report.window_count, 2);
    }

    #[test]
    fn too_few_tokens_is_an_error() {
        let tokens = vec!["a"];
        assert!(matches!(
            pseudo_complexity(&tokens, 2),
            Err(AnalysisError::TooFewTokens(2, 1))
        ));
    }
}
