//! Small text utilities shared by the prompt operators and the mock provider.

/// Splits prose into sentences at `.`, `!` or `?` followed by whitespace or
/// end of text. Sentences are trimmed and keep their terminal punctuation.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut start = 0;
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    for (k, &(i, c)) in chars.iter().enumerate() {
        if matches!(c, '.' | '!' | '?') {
            let at_boundary = chars.get(k + 1).map_or(true, |&(_, n)| n.is_whitespace());
            if at_boundary {
                let end = i + c.len_utf8();
                push_trimmed(&mut out, &text[start..end]);
                start = end;
            }
        }
    }
    push_trimmed(&mut out, &text[start..]);
    out
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

/// Collapses every whitespace run to one space and trims the ends.
pub fn normalize_whitespace(text: &str) -> String {
    text.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Longest prefix of `text` that is at most `max_chars` characters and ends
/// on a sentence boundary when one is available.
pub fn truncate_to_sentences(text: &str, max_chars: usize) -> String {
    if text.chars().count() <= max_chars {
        return text.to_string();
    }
    let mut out = String::new();
    for s in split_sentences(text) {
        let extra = if out.is_empty() { s.chars().count() } else { s.chars().count() + 1 };
        if out.chars().count() + extra > max_chars {
            break;
        }
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(&s);
    }
    if out.is_empty() {
        out = text.chars().take(max_chars).collect();
    }
    out
}
