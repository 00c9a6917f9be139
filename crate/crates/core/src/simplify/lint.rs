//! Advisory lint for the world-simplification guidelines: unknown name
//! candidates, URLs, email addresses, and 4-digit years. Findings are
//! informational only; the prompts carry the enforcement.

use std::sync::OnceLock;

use regex::Regex;

use super::SimplifyError;

/// Replacement name lists, one name per initial letter A-Z per gender.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameTables {
    pub male: Vec<String>,
    pub female: Vec<String>,
}

const MALE_NAMES: [&str; 26] = [
    "Adam", "Benjamin", "Cameron", "David", "Ethan", "Frank", "Gabriel", "Henry", "Isaac",
    "Jack", "Kevin", "Liam", "Matthew", "Nathan", "Oliver", "Patrick", "Quentin", "Ryan",
    "Samuel", "Thomas", "Ulysses", "Victor", "William", "Xavier", "Yosef", "Zachary",
];

const FEMALE_NAMES: [&str; 26] = [
    "Alice", "Bella", "Charlotte", "Diana", "Emma", "Fiona", "Grace", "Hannah", "Isabel",
    "Jessica", "Katherine", "Lily", "Madison", "Nora", "Olivia", "Penelope", "Quinn", "Rachel",
    "Sophia", "Taylor", "Uma", "Victoria", "Wendy", "Xena", "Yara", "Zoe",
];

impl NameTables {
    pub fn new(male: Vec<String>, female: Vec<String>) -> Result<Self, SimplifyError> {
        for list in [&male, &female] {
            if list.len() != 26 {
                return Err(SimplifyError::BadNameTable);
            }
            let mut initials: Vec<char> = list
                .iter()
                .filter_map(|n| n.chars().next())
                .map(|c| c.to_ascii_uppercase())
                .collect();
            initials.sort_unstable();
            initials.dedup();
            if initials.len() != 26 || initials[0] != 'A' || initials[25] != 'Z' {
                return Err(SimplifyError::BadNameTable);
            }
        }
        Ok(NameTables { male, female })
    }

    pub fn contains(&self, name: &str) -> bool {
        self.male.iter().any(|n| n == name) || self.female.iter().any(|n| n == name)
    }
}

impl Default for NameTables {
    fn default() -> Self {
        NameTables {
            male: MALE_NAMES.iter().map(|s| s.to_string()).collect(),
            female: FEMALE_NAMES.iter().map(|s| s.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LintKind {
    UnknownName,
    Url,
    Email,
    Year,
}

/// One advisory finding with its byte offset in the text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LintFlag {
    pub kind: LintKind,
    pub text: String,
    pub offset: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LintReport {
    pub flags: Vec<LintFlag>,
}

impl LintReport {
    pub fn is_clean(&self) -> bool {
        self.flags.is_empty()
    }

    pub fn count(&self, kind: LintKind) -> usize {
        self.flags.iter().filter(|f| f.kind == kind).count()
    }
}

fn url_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)\b(?:https?://|www\.)\S+").expect("valid regex"))
}

fn email_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| {
        Regex::new(r"[A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,}").expect("valid regex")
    })
}

fn year_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\b[12][0-9]{3}\b").expect("valid regex"))
}

fn word_re() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[A-Za-z][A-Za-z'\-]*").expect("valid regex"))
}

/// Scan revised text for guideline violations.
pub fn lint_world_simplification(text: &str, tables: &NameTables) -> LintReport {
    let mut flags = Vec::new();
    let mut masked: Vec<(usize, usize)> = Vec::new();

    for m in url_re().find_iter(text) {
        masked.push((m.start(), m.end()));
        flags.push(LintFlag {
            kind: LintKind::Url,
            text: m.as_str().to_string(),
            offset: m.start(),
        });
    }
    for m in email_re().find_iter(text) {
        if masked.iter().any(|&(s, e)| m.start() >= s && m.end() <= e) {
            continue;
        }
        masked.push((m.start(), m.end()));
        flags.push(LintFlag {
            kind: LintKind::Email,
            text: m.as_str().to_string(),
            offset: m.start(),
        });
    }
    for m in year_re().find_iter(text) {
        if masked.iter().any(|&(s, e)| m.start() >= s && m.end() <= e) {
            continue;
        }
        flags.push(LintFlag {
            kind: LintKind::Year,
            text: m.as_str().to_string(),
            offset: m.start(),
        });
    }

    flags.extend(name_flags(text, tables, &masked));
    flags.sort_by_key(|f| f.offset);
    LintReport { flags }
}

/// A candidate is a capitalized word; runs of adjacent candidates group
/// into one flag. A run is exempt when every member is a table name, or
/// when it is a single sentence-initial word.
fn name_flags(text: &str, tables: &NameTables, masked: &[(usize, usize)]) -> Vec<LintFlag> {
    #[derive(Debug)]
    struct Word {
        start: usize,
        end: usize,
        capitalized: bool,
        sentence_initial: bool,
        known: bool,
    }

    let words: Vec<Word> = word_re()
        .find_iter(text)
        .filter(|m| !masked.iter().any(|&(s, e)| m.start() >= s && m.end() <= e))
        .map(|m| {
            let word = m.as_str();
            let mut chars = word.chars();
            let first_upper = chars.next().is_some_and(|c| c.is_uppercase());
            let all_upper = word.chars().all(|c| c.is_uppercase());
            let before = text[..m.start()]
                .chars()
                .rev()
                .find(|c| !c.is_whitespace());
            let sentence_initial =
                matches!(before, None | Some('.') | Some('!') | Some('?') | Some('"'));
            Word {
                start: m.start(),
                end: m.end(),
                capitalized: first_upper && !all_upper && word.len() >= 2,
                sentence_initial,
                known: tables.contains(word),
            }
        })
        .collect();

    let mut flags = Vec::new();
    let mut i = 0;
    while i < words.len() {
        if !words[i].capitalized {
            i += 1;
            continue;
        }
        // group adjacent capitalized words separated only by spaces
        let mut j = i;
        while j + 1 < words.len()
            && words[j + 1].capitalized
            && text[words[j].end..words[j + 1].start]
                .chars()
                .all(|c| c == ' ')
        {
            j += 1;
        }
        let run = &words[i..=j];
        let all_known = run.iter().all(|w| w.known);
        let exempt_initial = run.len() == 1 && run[0].sentence_initial && !run[0].known;
        // a known sentence-initial name is simply fine; an unknown
        // sentence-initial singleton is indistinguishable from an
        // ordinary sentence opener, so it is not flagged either
        let exempt = all_known || exempt_initial || (run.len() == 1 && run[0].sentence_initial);
        if !exempt {
            let start = run[0].start;
            let end = run[run.len() - 1].end;
            flags.push(LintFlag {
                kind: LintKind::UnknownName,
                text: text[start..end].to_string(),
                offset: start,
            });
        }
        i = j + 1;
    }
    flags
}
