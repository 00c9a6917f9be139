//! Vocabulary persistence: a token list, a merge list in application
//! order, and a JSON manifest. Token bytes are escaped so the text files
//! survive any byte content and load back exactly.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ReplacedToken, TokenizerError, Vocab};

const TOKENS_FILE: &str = "tokens.txt";
const MERGES_FILE: &str = "merges.txt";
const MANIFEST_FILE: &str = "manifest.json";

/// Escape arbitrary bytes into printable ASCII: backslash doubles, and
/// anything outside 0x20..=0x7e becomes \xNN.
pub fn escape_bytes(bytes: &[u8]) -> String {
    let mut out = String::with_capacity(bytes.len());
    for &b in bytes {
        match b {
            b'\\' => out.push_str("\\\\"),
            0x20..=0x7e => out.push(b as char),
            _ => out.push_str(&format!("\\x{b:02x}")),
        }
    }
    out
}

pub fn unescape_bytes(s: &str) -> Result<Vec<u8>, TokenizerError> {
    let mut out = Vec::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            let mut buf = [0u8; 4];
            out.extend_from_slice(c.encode_utf8(&mut buf).as_bytes());
            continue;
        }
        match chars.next() {
            Some('\\') => out.push(b'\\'),
            Some('x') => {
                let hi = chars.next();
                let lo = chars.next();
                let (Some(hi), Some(lo)) = (hi, lo) else {
                    return Err(TokenizerError::Format("truncated \\x escape".into()));
                };
                let byte = u8::from_str_radix(&format!("{hi}{lo}"), 16)
                    .map_err(|_| TokenizerError::Format(format!("bad escape \\x{hi}{lo}")))?;
                out.push(byte);
            }
            other => {
                return Err(TokenizerError::Format(format!(
                    "unknown escape '\\{}'",
                    other.map(String::from).unwrap_or_default()
                )))
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    target_size: usize,
    specials: BTreeMap<String, u32>,
    frequencies: Vec<u64>,
    replaced: Vec<ManifestReplacement>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ManifestReplacement {
    id: u32,
    former: String,
    special: String,
    frequency: u64,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> TokenizerError + '_ {
    move |source| TokenizerError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Write tokens, merges, and manifest into `dir`.
pub fn save_vocab(vocab: &Vocab, dir: impl AsRef<Path>) -> Result<(), TokenizerError> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let tokens_path = dir.join(TOKENS_FILE);
    let mut tokens_text = String::new();
    for id in 0..vocab.len() as u32 {
        let bytes = vocab.token_bytes(id)?;
        tokens_text.push_str(&format!("{id}\t{}\n", escape_bytes(bytes)));
    }
    fs::write(&tokens_path, tokens_text).map_err(io_err(&tokens_path))?;

    let merges_path = dir.join(MERGES_FILE);
    let mut merges_text = String::new();
    for &(left, right) in vocab.merges() {
        merges_text.push_str(&format!("{left} {right}\n"));
    }
    fs::write(&merges_path, merges_text).map_err(io_err(&merges_path))?;

    let manifest = Manifest {
        target_size: vocab.target_size(),
        specials: vocab.specials().clone(),
        frequencies: (0..vocab.len() as u32).map(|id| vocab.frequency(id)).collect(),
        replaced: vocab
            .replaced()
            .iter()
            .map(|r| ManifestReplacement {
                id: r.id,
                former: escape_bytes(&r.former_bytes),
                special: r.special.clone(),
                frequency: r.frequency,
            })
            .collect(),
    };
    let manifest_path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest)
        .map_err(|e| TokenizerError::Format(e.to_string()))?;
    fs::write(&manifest_path, json).map_err(io_err(&manifest_path))?;
    Ok(())
}

/// Load a vocabulary saved by [`save_vocab`], validating id density,
/// merge outputs, and special ids.
pub fn load_vocab(dir: impl AsRef<Path>) -> Result<Vocab, TokenizerError> {
    let dir = dir.as_ref();

    let tokens_path = dir.join(TOKENS_FILE);
    let tokens_text = fs::read_to_string(&tokens_path).map_err(io_err(&tokens_path))?;
    let mut tokens: Vec<Vec<u8>> = Vec::new();
    for (line_no, line) in tokens_text.lines().enumerate() {
        let (id, escaped) = line.split_once('\t').ok_or_else(|| {
            TokenizerError::Format(format!("{TOKENS_FILE}:{}: missing tab", line_no + 1))
        })?;
        let id: usize = id
            .parse()
            .map_err(|_| TokenizerError::Format(format!("bad id at line {}", line_no + 1)))?;
        if id != tokens.len() {
            return Err(TokenizerError::Format(format!(
                "ids must be dense; expected {} got {id}",
                tokens.len()
            )));
        }
        tokens.push(unescape_bytes(escaped)?);
    }

    let merges_path = dir.join(MERGES_FILE);
    let merges_text = fs::read_to_string(&merges_path).map_err(io_err(&merges_path))?;
    let mut merges: Vec<(u32, u32)> = Vec::new();
    for (line_no, line) in merges_text.lines().enumerate() {
        let (l, r) = line.split_once(' ').ok_or_else(|| {
            TokenizerError::Format(format!("{MERGES_FILE}:{}: missing space", line_no + 1))
        })?;
        let parse = |s: &str| {
            s.parse::<u32>()
                .map_err(|_| TokenizerError::Format(format!("bad merge id '{s}'")))
        };
        let pair = (parse(l)?, parse(r)?);
        let output = 256 + merges.len();
        if output >= tokens.len() || pair.0 as usize >= tokens.len() || pair.1 as usize >= tokens.len()
        {
            return Err(TokenizerError::Format(format!(
                "merge {} references missing token",
                merges.len()
            )));
        }
        merges.push(pair);
    }

    let manifest_path = dir.join(MANIFEST_FILE);
    let manifest_text = fs::read_to_string(&manifest_path).map_err(io_err(&manifest_path))?;
    let manifest: Manifest = serde_json::from_str(&manifest_text)
        .map_err(|e| TokenizerError::Format(e.to_string()))?;
    if manifest.frequencies.len() != tokens.len() {
        return Err(TokenizerError::Format(
            "frequency table length mismatch".into(),
        ));
    }
    let mut seen_special_ids = std::collections::HashSet::new();
    for (&id, name) in manifest.specials.values().zip(manifest.specials.keys()) {
        if id as usize >= tokens.len() || !seen_special_ids.insert(id) {
            return Err(TokenizerError::Format(format!(
                "special '{name}' has invalid or duplicate id {id}"
            )));
        }
    }

    let replaced = manifest
        .replaced
        .into_iter()
        .map(|r| {
            Ok(ReplacedToken {
                id: r.id,
                former_bytes: unescape_bytes(&r.former)?,
                special: r.special,
                frequency: r.frequency,
            })
        })
        .collect::<Result<Vec<_>, TokenizerError>>()?;

    Ok(Vocab {
        tokens,
        merges,
        specials: manifest.specials,
        target_size: manifest.target_size,
        frequencies: manifest.frequencies,
        replaced,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{Document, DocumentCollection, Genre, Split};
    use crate::tokenizer::train_bpe;

    #[test]
    fn escape_round_trips_all_bytes() {
        let all: Vec<u8> = (0..=255).collect();
        let escaped = escape_bytes(&all);
        assert!(escaped.is_ascii());
        assert_eq!(unescape_bytes(&escaped).unwrap(), all);
    }

    #[test]
    fn save_load_is_byte_exact() {
        let docs = vec![Document::new(
            "d0",
            Genre::Web,
            Split::Train,
            "the quick brown fox jumps over the lazy dog \u{00e9}\u{00e9}",
        )];
        let corpus = DocumentCollection::from_documents(docs).unwrap();
        let vocab = train_bpe(&corpus, 280)
            .unwrap()
            .substitute_special(&["<pad>".to_string()])
            .unwrap();

        let dir = tempfile::tempdir().unwrap();
        save_vocab(&vocab, dir.path()).unwrap();
        let loaded = load_vocab(dir.path()).unwrap();
        assert_eq!(vocab, loaded);

        // Saving the loaded vocabulary reproduces identical files.
        let dir2 = tempfile::tempdir().unwrap();
        save_vocab(&loaded, dir2.path()).unwrap();
        for file in [TOKENS_FILE, MERGES_FILE, MANIFEST_FILE] {
            let a = fs::read(dir.path().join(file)).unwrap();
            let b = fs::read(dir2.path().join(file)).unwrap();
            assert_eq!(a, b, "{file} differs");
        }
    }

    #[test]
    fn malformed_escape_is_rejected() {
        assert!(unescape_bytes("\\x1").is_err());
        assert!(unescape_bytes("\\q").is_err());
    }
}
