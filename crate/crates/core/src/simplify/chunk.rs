//! Chunk documents to a revision window.
//!
//! Chunks carry the separator consumed after them, so the original text
//! is always recoverable byte-exactly: concat(text + trailing_sep) = doc.
//! Boundaries prefer paragraph breaks, then sentence ends, then
//! whitespace; sizes are measured in whitespace tokens.

use crate::corpus::whitespace_token_count;

/// One revision unit and the separator that followed it in the source.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub text: String,
    pub trailing_sep: String,
}

impl Chunk {
    fn whole(text: &str) -> Chunk {
        Chunk {
            text: text.to_string(),
            trailing_sep: String::new(),
        }
    }
}

/// Rebuild the original text from chunks.
pub fn reassemble(chunks: &[Chunk]) -> String {
    let mut out = String::new();
    for chunk in chunks {
        out.push_str(&chunk.text);
        out.push_str(&chunk.trailing_sep);
    }
    out
}

fn tokens(text: &str) -> usize {
    whitespace_token_count(text) as usize
}

/// Split the text into chunks of at most `max_units` whitespace tokens.
/// A single indivisible unit larger than the window is kept whole.
pub fn chunk_document(text: &str, max_units: usize) -> Vec<Chunk> {
    assert!(max_units >= 1, "max_units must be >= 1");
    if text.is_empty() {
        return Vec::new();
    }
    chunk_level(text, max_units, 0)
}

/// Levels: 0 splits at paragraph breaks, 1 at sentence ends, 2 at
/// whitespace. Word pieces are single tokens, so level 2 always fits.
fn chunk_level(text: &str, max_units: usize, level: usize) -> Vec<Chunk> {
    if tokens(text) <= max_units || level > 2 {
        return vec![Chunk::whole(text)];
    }
    let pieces = match level {
        0 => split_paragraphs(text),
        1 => split_sentences(text),
        _ => split_whitespace_pieces(text),
    };
    if pieces.len() <= 1 {
        return chunk_level(text, max_units, level + 1);
    }
    pack(pieces, max_units, level)
}

/// Greedily pack (piece, separator) pairs into chunks; oversized pieces
/// recurse to the next split level.
fn pack(pieces: Vec<(String, String)>, max_units: usize, level: usize) -> Vec<Chunk> {
    let mut chunks: Vec<Chunk> = Vec::new();
    let mut current: Vec<(String, String)> = Vec::new();
    let mut current_tokens = 0usize;

    let flush = |current: &mut Vec<(String, String)>, chunks: &mut Vec<Chunk>| {
        if current.is_empty() {
            return;
        }
        let mut text = String::new();
        for (piece, sep) in current.iter().take(current.len() - 1) {
            text.push_str(piece);
            text.push_str(sep);
        }
        let (last_piece, last_sep) = current.last().expect("non-empty");
        text.push_str(last_piece);
        chunks.push(Chunk {
            text,
            trailing_sep: last_sep.clone(),
        });
        current.clear();
    };

    for (piece, sep) in pieces {
        let piece_tokens = tokens(&piece);
        if piece_tokens > max_units {
            flush(&mut current, &mut chunks);
            current_tokens = 0;
            let mut sub = chunk_level(&piece, max_units, level + 1);
            if let Some(last) = sub.last_mut() {
                last.trailing_sep.push_str(&sep);
            }
            chunks.extend(sub);
        } else if !current.is_empty() && current_tokens + piece_tokens > max_units {
            flush(&mut current, &mut chunks);
            current_tokens = piece_tokens;
            current.push((piece, sep));
        } else {
            current_tokens += piece_tokens;
            current.push((piece, sep));
        }
    }
    flush(&mut current, &mut chunks);
    chunks
}

/// Split at exact "\n\n" occurrences; the separator is those two bytes.
fn split_paragraphs(text: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut start = 0;
    let bytes = text.as_bytes();
    let mut i = 0;
    while i + 1 < bytes.len() {
        if bytes[i] == b'\n' && bytes[i + 1] == b'\n' {
            out.push((text[start..i].to_string(), "\n\n".to_string()));
            start = i + 2;
            i += 2;
        } else {
            i += 1;
        }
    }
    out.push((text[start..].to_string(), String::new()));
    out
}

/// Split after runs of sentence terminators followed by whitespace.
fn split_sentences(text: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut start = 0usize;
    let mut i = 0usize;
    while i < chars.len() {
        if matches!(chars[i].1, '.' | '!' | '?') {
            // extend over a terminator run
            let mut j = i;
            while j + 1 < chars.len() && matches!(chars[j + 1].1, '.' | '!' | '?') {
                j += 1;
            }
            let term_end = if j + 1 < chars.len() {
                chars[j + 1].0
            } else {
                text.len()
            };
            // a sentence boundary needs trailing whitespace (or text end)
            let mut k = j + 1;
            while k < chars.len() && chars[k].1.is_whitespace() {
                k += 1;
            }
            if k > j + 1 {
                let sep_end = if k < chars.len() { chars[k].0 } else { text.len() };
                out.push((
                    text[start..term_end].to_string(),
                    text[term_end..sep_end].to_string(),
                ));
                start = sep_end;
                i = k;
                continue;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    if start < text.len() {
        out.push((text[start..].to_string(), String::new()));
    }
    out
}

/// Split into non-whitespace pieces with their trailing whitespace runs.
fn split_whitespace_pieces(text: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    let mut piece_start = 0usize;
    let mut in_ws = false;
    let mut ws_start = 0usize;
    for (idx, c) in text.char_indices() {
        if c.is_whitespace() {
            if !in_ws {
                ws_start = idx;
                in_ws = true;
            }
        } else if in_ws {
            out.push((
                text[piece_start..ws_start].to_string(),
                text[ws_start..idx].to_string(),
            ));
            piece_start = idx;
            in_ws = false;
        }
    }
    if in_ws {
        out.push((
            text[piece_start..ws_start].to_string(),
            text[ws_start..].to_string(),
        ));
    } else {
        out.push((text[piece_start..].to_string(), String::new()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_paragraphs_split_at_breaks() {
        let text = "one two three\n\nfour five six\n\nseven eight nine";
        let chunks = chunk_document(text, 3);
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[0].text, "one two three");
        assert_eq!(chunks[0].trailing_sep, "\n\n");
        assert_eq!(chunks[2].text, "seven eight nine");
        assert_eq!(chunks[2].trailing_sep, "");
        assert_eq!(reassemble(&chunks), text);
    }

    #[test]
    fn short_text_is_one_chunk() {
        let text = "just a short line";
        let chunks = chunk_document(text, 100);
        assert_eq!(chunks.len(), 1);
        assert_eq!(chunks[0].text, text);
    }

    #[test]
    fn empty_text_has_no_chunks() {
        assert!(chunk_document("", 10).is_empty());
    }

    #[test]
    fn oversized_paragraph_falls_back_to_sentences() {
        let text = "First one here. Second bit now. Third part ends.";
        let chunks = chunk_document(text, 4);
        assert_eq!(chunks.len(), 3);
        assert_eq!(chunks[0].text, "First one here.");
        assert_eq!(chunks[0].trailing_sep, " ");
        assert_eq!(reassemble(&chunks), text);
    }

    #[test]
    fn sentences_pack_up_to_the_window() {
        let text = "A b. C d. E f g h i j k.";
        let chunks = chunk_document(text, 5);
        assert_eq!(chunks[0].text, "A b. C d.");
        assert_eq!(reassemble(&chunks), text);
    }

    #[test]
    fn no_sentence_boundaries_falls_back_to_whitespace() {
        let text = "w1 w2 w3 w4 w5 w6 w7";
        let chunks = chunk_document(text, 3);
        assert!(chunks.len() >= 3);
        for chunk in &chunks {
            assert!(tokens(&chunk.text) <= 3);
        }
        assert_eq!(reassemble(&chunks), text);
    }

    #[test]
    fn irregular_whitespace_reassembles_exactly() {
        let text = "a  b\tc\n\n\nd. e!  f\r\ng   h\n\n i";
        for max in [1, 2, 3, 10] {
            let chunks = chunk_document(text, max);
            assert_eq!(reassemble(&chunks), text, "max_units={max}");
        }
    }
}
