//! Bundled prompt library.
//!
//! Templates are plain-text files with `{{slot}}` markers, embedded at
//! build time and overridable from a directory at run time.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use crate::corpus::Genre;
use crate::simplify::{PromptTemplate, SimplifyError};

pub const WEB: &str = include_str!("../templates/web.txt");
pub const BOOK: &str = include_str!("../templates/book.txt");
pub const WIKI: &str = include_str!("../templates/wiki.txt");
pub const CODE: &str = include_str!("../templates/code.txt");
pub const INSTRUCT: &str = include_str!("../templates/instruct.txt");
pub const GLUE_REVISE: &str = include_str!("../templates/glue_revise.txt");
pub const GLUE_EVAL: &str = include_str!("../templates/glue_eval.txt");
pub const EVAL_GENERATION: &str = include_str!("../templates/eval_generation.txt");
pub const JUDGE_EVAL: &str = include_str!("../templates/judge_eval.txt");
pub const MATH_GRADING: &str = include_str!("../templates/math_grading.txt");

/// The genre-to-template map used by corpus revision. Book covers
/// textbook and conversation; math reuses the book prompt (math content
/// is normally excluded from revision, but the map stays total).
pub fn builtin_revision_templates() -> BTreeMap<Genre, PromptTemplate> {
    let make = |id: &str, genre: Genre, body: &str| PromptTemplate::new(id, Some(genre), body);
    BTreeMap::from([
        (Genre::Web, make("web", Genre::Web, WEB)),
        (Genre::Book, make("book", Genre::Book, BOOK)),
        (Genre::Wiki, make("wiki", Genre::Wiki, WIKI)),
        (Genre::Textbook, make("book", Genre::Textbook, BOOK)),
        (Genre::Conversation, make("book", Genre::Conversation, BOOK)),
        (Genre::Code, make("code", Genre::Code, CODE)),
        (Genre::Math, make("book", Genre::Math, BOOK)),
        (Genre::Instruct, make("instruct", Genre::Instruct, INSTRUCT)),
    ])
}

/// Load `<genre>.txt` overrides from a directory; genres without a file
/// fall back to the builtin template.
pub fn load_revision_templates(
    dir: impl AsRef<Path>,
) -> Result<BTreeMap<Genre, PromptTemplate>, SimplifyError> {
    let dir = dir.as_ref();
    let mut map = builtin_revision_templates();
    for genre in Genre::ALL {
        let path = dir.join(format!("{genre}.txt"));
        if path.exists() {
            let body = fs::read_to_string(&path).map_err(|source| SimplifyError::Io {
                path: path.display().to_string(),
                source,
            })?;
            map.insert(
                genre,
                PromptTemplate::new(genre.as_str(), Some(genre), body),
            );
        }
    }
    Ok(map)
}
