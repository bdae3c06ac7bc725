//! Naive tokenization shared by every stage.
//!
//! Tokens are whitespace-separated chunks with leading and trailing
//! punctuation detached one character at a time. Known abbreviations
//! ("Mr.", "e.g.") and single-letter initials keep their trailing period.

use std::ops::Range;

use crate::resources;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub text: String,
    /// Byte range of the token inside the source text.
    pub range: Range<usize>,
}

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric()
}

/// True when `word` is kept whole by the tokenizer because it is an
/// abbreviation or an initial.
pub fn is_abbreviation(word: &str) -> bool {
    if !word.ends_with('.') {
        return false;
    }
    let mut chars = word.chars();
    if let (Some(c), Some('.'), None) = (chars.next(), chars.next(), chars.next()) {
        if c.is_ascii_uppercase() {
            return true;
        }
    }
    resources::abbreviations().contains(word.to_ascii_lowercase().as_str())
}

pub fn tokenize_with_offsets(text: &str) -> Vec<Token> {
    let mut out = Vec::new();
    let mut idx = 0;
    for chunk in text.split_whitespace() {
        // split_whitespace yields subslices, so recover the offset.
        let start = text[idx..].find(chunk).map(|p| p + idx).unwrap_or(idx);
        let end = start + chunk.len();
        idx = end;
        split_chunk(chunk, start, &mut out);
    }
    out
}

fn split_chunk(chunk: &str, base: usize, out: &mut Vec<Token>) {
    let push = |out: &mut Vec<Token>, s: &str, at: usize| {
        out.push(Token {
            text: s.to_string(),
            range: at..at + s.len(),
        })
    };

    let mut lead_end = 0;
    for (i, c) in chunk.char_indices() {
        if is_punct(c) {
            lead_end = i + c.len_utf8();
        } else {
            break;
        }
    }
    if lead_end == chunk.len() {
        for (i, c) in chunk.char_indices() {
            push(out, &chunk[i..i + c.len_utf8()], base + i);
        }
        return;
    }
    for (i, c) in chunk[..lead_end].char_indices() {
        push(out, &chunk[i..i + c.len_utf8()], base + i);
    }

    let rest = &chunk[lead_end..];
    let mut core_end = rest.len();
    for (i, c) in rest.char_indices().rev() {
        if is_punct(c) {
            core_end = i;
        } else {
            break;
        }
    }

    // "Mr." or "e.g." keeps the period attached.
    let with_period = rest[..core_end].len() + 1;
    if core_end < rest.len()
        && rest[core_end..].starts_with('.')
        && is_abbreviation(&rest[..with_period])
    {
        core_end = with_period;
    }

    push(out, &rest[..core_end], base + lead_end);
    for (i, c) in rest[core_end..].char_indices() {
        push(out, &rest[core_end + i..core_end + i + c.len_utf8()], base + lead_end + core_end + i);
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with_offsets(text).into_iter().map(|t| t.text).collect()
}

/// Rebuilds readable text from tokens when no source text is available.
pub fn detokenize<S: AsRef<str>>(tokens: &[S]) -> String {
    const NO_SPACE_BEFORE: &[&str] = &[".", ",", ";", ":", "!", "?", ")", "]", "}", "%", "'s"];
    const NO_SPACE_AFTER: &[&str] = &["(", "[", "{"];
    let mut out = String::new();
    let mut prev: Option<&str> = None;
    for tok in tokens {
        let tok = tok.as_ref();
        if let Some(p) = prev {
            if !NO_SPACE_BEFORE.contains(&tok) && !NO_SPACE_AFTER.contains(&p) {
                out.push(' ');
            }
        }
        out.push_str(tok);
        prev = Some(tok);
    }
    out
}

pub fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphanumeric)
}

/// Strips a trailing possessive "'s" (or a bare apostrophe after "s").
pub fn strip_possessive(token: &str) -> &str {
    if let Some(stem) = token.strip_suffix("'s") {
        stem
    } else if token.len() > 1 && token.ends_with("s'") {
        &token[..token.len() - 1]
    } else {
        token
    }
}

/// 64-bit FNV-1a; used to derive stable per-instance seeds.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        hash ^= u64::from(*b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn instance_seed(global: u64, id: &str) -> u64 {
    global ^ fnv1a(id.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn detaches_edge_punctuation() {
        assert_eq!(
            tokenize("Paul helped Lionel hide when he was pursued by the authorities."),
            vec!["Paul", "helped", "Lionel", "hide", "when", "he", "was", "pursued", "by", "the", "authorities", "."]
        );
        assert_eq!(tokenize("\"Hi,\" she said."), vec!["\"", "Hi", ",", "\"", "she", "said", "."]);
        assert_eq!(tokenize("Paulo's lead..."), vec!["Paulo's", "lead", ".", ".", "."]);
    }

    #[test]
    fn keeps_abbreviations_and_initials() {
        assert_eq!(tokenize("Mr. Smith met J. Doe."), vec!["Mr.", "Smith", "met", "J.", "Doe", "."]);
        assert_eq!(tokenize("(e.g. this)"), vec!["(", "e.g.", "this", ")"]);
    }

    #[test]
    fn offsets_point_into_source() {
        let text = "  Wanda tries,  but she   refuses.";
        for tok in tokenize_with_offsets(text) {
            assert_eq!(&text[tok.range.clone()], tok.text);
        }
    }

    #[test]
    fn detokenize_reattaches_punctuation() {
        let toks = tokenize("Alex tells Paulo, but he does not believe him.");
        assert_eq!(detokenize(&toks), "Alex tells Paulo, but he does not believe him.");
    }

    #[test]
    fn possessive_stripping() {
        assert_eq!(strip_possessive("Rose's"), "Rose");
        assert_eq!(strip_possessive("James'"), "James");
        assert_eq!(strip_possessive("Rose"), "Rose");
    }
}
