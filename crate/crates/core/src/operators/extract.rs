use thiserror::Error;

use crate::wire::{END, START};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("response contains no extractable prompt")]
pub struct ExtractionFailure;

/// Text between the first `<START>` and the next `<END>`, trimmed. A response
/// without markers is accepted whole when it is a single nonempty paragraph.
pub fn extract_bracketed(text: &str) -> Result<String, ExtractionFailure> {
    if let Some(open) = text.find(START) {
        let rest = &text[open + START.len()..];
        let close = rest.find(END).ok_or(ExtractionFailure)?;
        let inner = rest[..close].trim();
        return if inner.is_empty() { Err(ExtractionFailure) } else { Ok(inner.to_string()) };
    }
    if text.contains(END) {
        return Err(ExtractionFailure);
    }
    let trimmed = text.trim();
    let single_paragraph = !trimmed.is_empty()
        && !trimmed.lines().any(|l| l.trim().is_empty());
    if single_paragraph {
        Ok(trimmed.to_string())
    } else {
        Err(ExtractionFailure)
    }
}
