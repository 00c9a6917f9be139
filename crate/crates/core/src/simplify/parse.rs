//! Parse marker-delimited revision outputs.
//!
//! Every format terminates sections with `<end>`; the instruction format
//! additionally separates its three fields with `<split>`.

use super::SimplifyError;

pub const END_MARKER: &str = "<end>";
pub const SPLIT_MARKER: &str = "<split>";

const PLAIN_HEADER: &str = "EDITED:";
const CODE_TASK_HEADER: &str = "EDITED TASK DESCRIPTION:";
const CODE_SOLUTION_HEADER: &str = "EDITED SOLUTION AND CODE:";
const INSTRUCT_HEADER: &str = "[EDITED]";
const NO_INPUT: &str = "None";

/// Which output layout to expect.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseVariant {
    Plain,
    Code,
    Instruct,
}

/// A parsed revision in one of the three output layouts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedRevision {
    Plain(String),
    Code { task: String, solution: String },
    Instruct {
        task: String,
        input: Option<String>,
        response: String,
    },
}

impl ParsedRevision {
    /// Flatten to the text that replaces the original chunk.
    pub fn to_text(&self) -> String {
        match self {
            ParsedRevision::Plain(text) => text.clone(),
            ParsedRevision::Code { task, solution } => render_code_document(task, solution),
            ParsedRevision::Instruct {
                task,
                input,
                response,
            } => render_instruct_document(task, input.as_deref(), response),
        }
    }
}

fn parse_err(reason: impl Into<String>, raw: &str) -> SimplifyError {
    SimplifyError::Parse {
        reason: reason.into(),
        raw: raw.to_string(),
    }
}

/// Text between `header` and the next `<end>`, searched from `from`.
/// Returns the span and the index just past the end marker.
fn section(raw: &str, header: &str, from: usize) -> Result<(String, usize), String> {
    let start = raw[from..]
        .find(header)
        .map(|i| from + i + header.len())
        .ok_or_else(|| format!("missing \"{header}\" marker"))?;
    let end = raw[start..]
        .find(END_MARKER)
        .map(|i| start + i)
        .ok_or_else(|| format!("missing \"{END_MARKER}\" after \"{header}\""))?;
    Ok((
        raw[start..end].trim().to_string(),
        end + END_MARKER.len(),
    ))
}

/// Parse a raw completion according to the expected output layout.
pub fn parse_revision(raw: &str, variant: ParseVariant) -> Result<ParsedRevision, SimplifyError> {
    match variant {
        ParseVariant::Plain => {
            let (text, _) = section(raw, PLAIN_HEADER, 0).map_err(|r| parse_err(r, raw))?;
            Ok(ParsedRevision::Plain(text))
        }
        ParseVariant::Code => {
            let (task, next) =
                section(raw, CODE_TASK_HEADER, 0).map_err(|r| parse_err(r, raw))?;
            let (solution, _) =
                section(raw, CODE_SOLUTION_HEADER, next).map_err(|r| parse_err(r, raw))?;
            Ok(ParsedRevision::Code { task, solution })
        }
        ParseVariant::Instruct => {
            // The prompt ends with "[EDITED]"; completions may repeat it.
            let body_start = raw
                .find(INSTRUCT_HEADER)
                .map(|i| i + INSTRUCT_HEADER.len())
                .unwrap_or(0);
            let end = raw[body_start..]
                .find(END_MARKER)
                .map(|i| body_start + i)
                .ok_or_else(|| parse_err(format!("missing \"{END_MARKER}\""), raw))?;
            let body = &raw[body_start..end];
            let fields: Vec<&str> = body.split(SPLIT_MARKER).collect();
            if fields.len() != 3 {
                return Err(parse_err(
                    format!(
                        "expected 3 fields separated by \"{SPLIT_MARKER}\", found {}",
                        fields.len()
                    ),
                    raw,
                ));
            }
            let task = fields[0].trim().to_string();
            let input = fields[1].trim();
            let response = fields[2].trim().to_string();
            Ok(ParsedRevision::Instruct {
                task,
                input: (input != NO_INPUT).then(|| input.to_string()),
                response,
            })
        }
    }
}

/// Render plain revised text in the documented output format.
pub fn render_plain(text: &str) -> String {
    format!("{PLAIN_HEADER}\n{text} {END_MARKER}")
}

/// Render a code revision in the documented output format.
pub fn render_code(task: &str, solution: &str) -> String {
    format!(
        "{CODE_TASK_HEADER}\n{task} {END_MARKER}\n{CODE_SOLUTION_HEADER}\n{solution} {END_MARKER}"
    )
}

/// Render an instruction revision in the documented output format.
pub fn render_instruct(task: &str, input: Option<&str>, response: &str) -> String {
    format!(
        "{INSTRUCT_HEADER}{task} {SPLIT_MARKER} {} {SPLIT_MARKER} {response} {END_MARKER}",
        input.unwrap_or(NO_INPUT)
    )
}

/// Document-side layout for structured code documents.
pub fn render_code_document(task: &str, solution: &str) -> String {
    format!("TASK DESCRIPTION:\n{task}\nSOLUTION AND CODE:\n{solution}")
}

/// Split a structured code document into (task, solution).
pub fn split_code_document(text: &str) -> (String, String) {
    let task_start = text
        .find("TASK DESCRIPTION:")
        .map(|i| i + "TASK DESCRIPTION:".len());
    match (task_start, text.find("SOLUTION AND CODE:")) {
        (Some(ts), Some(ss)) if ts <= ss => (
            text[ts..ss].trim().to_string(),
            text[ss + "SOLUTION AND CODE:".len()..].trim().to_string(),
        ),
        _ => (text.trim().to_string(), String::new()),
    }
}

/// Document-side layout for structured instruction documents.
pub fn render_instruct_document(task: &str, input: Option<&str>, response: &str) -> String {
    format!(
        "[TASK]{task}\n\n[INPUT]{}\n\n[RESPONSE]{response}",
        input.unwrap_or(NO_INPUT)
    )
}

/// Split a structured instruction document into (task, input, response).
pub fn split_instruct_document(text: &str) -> (String, Option<String>, String) {
    let field = |header: &str, next: &[&str]| -> Option<String> {
        let start = text.find(header)? + header.len();
        let end = next
            .iter()
            .filter_map(|h| text[start..].find(h).map(|i| start + i))
            .min()
            .unwrap_or(text.len());
        Some(text[start..end].trim().to_string())
    };
    let task = field("[TASK]", &["[INPUT]", "[RESPONSE]"]);
    let input = field("[INPUT]", &["[RESPONSE]"]);
    let response = field("[RESPONSE]", &[]);
    match (task, response) {
        (Some(task), Some(response)) => {
            let input = input.filter(|i| i != NO_INPUT && !i.is_empty());
            (task, input, response)
        }
        // Unstructured instruction text: treat the whole text as the task.
        _ => (text.trim().to_string(), None, String::new()),
    }
}
