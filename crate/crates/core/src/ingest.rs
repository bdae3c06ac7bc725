//! Text cleanup, sentence splitting and the initial length/shape filter.

use std::str::FromStr;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{RejectReason, SentenceRecord, Stage, Verdict};
use crate::text::is_abbreviation;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanupConfig {
    pub strip_markup: bool,
    pub strip_parentheticals: bool,
    pub strip_non_ascii: bool,
    /// Drop subtitle cue numbers, timing lines and leading dialogue dashes.
    pub strip_subtitle_cues: bool,
    pub min_tokens: usize,
    pub max_tokens: usize,
}

impl Default for CleanupConfig {
    fn default() -> Self {
        Self {
            strip_markup: true,
            strip_parentheticals: true,
            strip_non_ascii: true,
            strip_subtitle_cues: false,
            min_tokens: 9,
            max_tokens: 33,
        }
    }
}

impl CleanupConfig {
    pub fn for_style(style: SourceStyle) -> Self {
        let base = Self::default();
        match style {
            SourceStyle::Plain => Self {
                strip_markup: false,
                ..base
            },
            SourceStyle::WikiExtract => base,
            SourceStyle::Subtitles => Self {
                strip_subtitle_cues: true,
                ..base
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_tokens < 1 || self.min_tokens > self.max_tokens {
            return Err(Error::InvalidConfig(format!(
                "need 1 <= min_tokens ({}) <= max_tokens ({})",
                self.min_tokens, self.max_tokens
            )));
        }
        Ok(())
    }
}

/// Input flavour; selects how aggressive cleanup is.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SourceStyle {
    Plain,
    WikiExtract,
    Subtitles,
}

impl FromStr for SourceStyle {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "plain" => Ok(SourceStyle::Plain),
            "wiki-extract" => Ok(SourceStyle::WikiExtract),
            "subtitles" => Ok(SourceStyle::Subtitles),
            other => Err(format!("unknown source style `{other}`")),
        }
    }
}

static HEADING_OR_LIST: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^(=+.*=+$|#|[-*•]|\d+[.)] )").unwrap());
static MARKUP: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"<[^<>]*>").unwrap());
static SUBTITLE_TIMING: LazyLock<Regex> =
    LazyLock::new(|| Regex::new(r"^\d+$|^\d\d:\d\d:\d\d[,.]\d+\s*-->").unwrap());
static SPACES: LazyLock<Regex> = LazyLock::new(|| Regex::new(r"[ \t]+").unwrap());
static SPACE_BEFORE_PUNCT: LazyLock<Regex> = LazyLock::new(|| Regex::new(r" ([.,;:!?])").unwrap());

/// Removes markup, parentheticals, non-ASCII characters, headings and list
/// items. Blank lines are preserved as paragraph separators.
pub fn clean_text(raw: &str, config: &CleanupConfig) -> String {
    let mut out: Vec<String> = Vec::new();
    for line in raw.lines() {
        let mut line = line.trim().to_string();
        if config.strip_subtitle_cues {
            if SUBTITLE_TIMING.is_match(&line) {
                continue;
            }
            line = line.trim_start_matches("- ").to_string();
        }
        if config.strip_markup {
            line = MARKUP.replace_all(&line, "").trim().to_string();
        }
        if HEADING_OR_LIST.is_match(&line) {
            continue;
        }
        if config.strip_parentheticals {
            line = remove_parentheticals(&line);
        }
        if config.strip_non_ascii {
            line.retain(|c| c.is_ascii());
        }
        let line = SPACES.replace_all(&line, " ");
        let line = SPACE_BEFORE_PUNCT.replace_all(line.trim(), "$1");
        out.push(line.into_owned());
    }
    // Collapse runs of blank lines and trim the ends.
    let mut cleaned: Vec<String> = Vec::new();
    for line in out {
        if line.is_empty() && cleaned.last().is_none_or(|l: &String| l.is_empty()) {
            continue;
        }
        cleaned.push(line);
    }
    while cleaned.last().is_some_and(|l| l.is_empty()) {
        cleaned.pop();
    }
    cleaned.join("\n")
}

/// Drops balanced `( … )` spans, nested ones included. Unbalanced
/// parentheses are left alone.
fn remove_parentheticals(line: &str) -> String {
    let chars: Vec<char> = line.chars().collect();
    let mut keep = vec![true; chars.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, &c) in chars.iter().enumerate() {
        match c {
            '(' => stack.push(i),
            ')' => {
                if let Some(open) = stack.pop() {
                    if stack.is_empty() {
                        keep[open..=i].iter_mut().for_each(|k| *k = false);
                    }
                }
            }
            _ => {}
        }
    }
    chars
        .into_iter()
        .zip(keep)
        .filter_map(|(c, k)| k.then_some(c))
        .collect()
}

/// Splits cleaned text into sentences.
///
/// A boundary is `.`, `?` or `!` (optionally followed by closing quotes or
/// brackets) before whitespace and an uppercase letter, unless the word is a
/// known abbreviation. Blank lines always end a sentence.
pub fn split_sentences(text: &str) -> Vec<SentenceRecord> {
    let mut records = Vec::new();
    for paragraph in text.split("\n\n") {
        let joined = paragraph.lines().map(str::trim).collect::<Vec<_>>().join(" ");
        for sentence in split_paragraph(&joined) {
            let id = records.len().to_string();
            records.push(SentenceRecord::new(id, sentence, ""));
        }
    }
    records
}

fn split_paragraph(par: &str) -> Vec<String> {
    let words: Vec<(usize, &str)> = {
        let mut v = Vec::new();
        let mut idx = 0;
        for w in par.split_whitespace() {
            let start = par[idx..].find(w).map(|p| p + idx).unwrap_or(idx);
            idx = start + w.len();
            v.push((start, w));
        }
        v
    };
    let mut sentences = Vec::new();
    let mut start = 0;
    for (i, &(pos, word)) in words.iter().enumerate() {
        let end = pos + word.len();
        let is_last = i + 1 == words.len();
        if is_last || ends_sentence(word, words[i + 1].1) {
            let s = par[start..end].trim();
            if !s.is_empty() {
                sentences.push(s.to_string());
            }
            if !is_last {
                start = words[i + 1].0;
            }
        }
    }
    sentences
}

fn ends_sentence(word: &str, next: &str) -> bool {
    let core = word.trim_end_matches(['"', '\'', ')', ']']);
    let Some(last) = core.chars().last() else {
        return false;
    };
    if !matches!(last, '.' | '?' | '!') {
        return false;
    }
    if last == '.' {
        let bare = core.trim_start_matches(|c: char| !c.is_alphanumeric());
        if is_abbreviation(bare) {
            return false;
        }
    }
    next.trim_start_matches(['"', '\'', '(', '['])
        .chars()
        .next()
        .is_some_and(|c| c.is_ascii_uppercase())
}

/// Cleans and splits one document, assigning ids `<doc_id>:<n>`.
pub fn split_document(doc_id: &str, source: &str, raw: &str, config: &CleanupConfig) -> Vec<SentenceRecord> {
    split_sentences(&clean_text(raw, config))
        .into_iter()
        .map(|mut r| {
            r.id = format!("{doc_id}:{}", r.id);
            r.source = source.to_string();
            r
        })
        .collect()
}

const MATH_SYMBOLS: &[char] = &['=', '+', '<', '>', '^', '|', '\\', '%'];
const MATH_OPERATORS: &[&str] = &["/", "*", "-"];

/// True if the sentence looks like it contains a formula.
pub fn contains_math(text: &str, tokens: &[String]) -> bool {
    if text.contains(MATH_SYMBOLS) {
        return true;
    }
    let has_digit = |t: &String| t.chars().any(|c| c.is_ascii_digit());
    tokens.windows(3).any(|w| {
        MATH_OPERATORS.contains(&w[1].as_str()) && has_digit(&w[0]) && has_digit(&w[2])
    })
}

/// Length, leading-uppercase and no-math checks. Never mutates the record.
pub fn initial_filter(record: &SentenceRecord, config: &CleanupConfig) -> Verdict {
    let n = record.tokens.len();
    if n < config.min_tokens {
        return Verdict::Reject(RejectReason::TooShort);
    }
    if n > config.max_tokens {
        return Verdict::Reject(RejectReason::TooLong);
    }
    if !record.text.chars().next().is_some_and(|c| c.is_ascii_uppercase()) {
        return Verdict::Reject(RejectReason::NoLeadingUppercase);
    }
    if contains_math(&record.text, &record.tokens) {
        return Verdict::Reject(RejectReason::ContainsMath);
    }
    Verdict::Accept
}

/// Runs the initial filter and records the verdict on the sentence.
pub fn apply_initial_filter(record: &mut SentenceRecord, config: &CleanupConfig) -> bool {
    let verdict = initial_filter(record, config);
    record.record(Stage::Initial, verdict);
    verdict.is_accept()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> CleanupConfig {
        CleanupConfig::default()
    }

    #[test]
    fn removes_parenthetical() {
        assert_eq!(clean_text("Paul (b. 1970) helped Lionel.", &cfg()), "Paul helped Lionel.");
        assert_eq!(clean_text("A (b (c) d) e.", &cfg()), "A e.");
        assert_eq!(clean_text("Unbalanced ( stays.", &cfg()), "Unbalanced ( stays.");
    }

    #[test]
    fn removes_headings_and_lists() {
        let keep_unicode = CleanupConfig {
            strip_non_ascii: false,
            ..cfg()
        };
        assert_eq!(
            clean_text("== History ==\nRadu appeared…", &keep_unicode),
            "Radu appeared…"
        );
        let raw = "# Title\n- item one\n* item two\n• bullet\n1. first\n2) second\nBody text here.";
        assert_eq!(clean_text(raw, &keep_unicode), "Body text here.");
    }

    #[test]
    fn strips_non_ascii_and_markup() {
        assert_eq!(clean_text("café", &cfg()), "caf");
        assert_eq!(clean_text("<b>Bold</b> move.", &cfg()), "Bold move.");
    }

    #[test]
    fn subtitle_cues() {
        let raw = "12\n00:01:02,500 --> 00:01:04,000\n- Where is he going?";
        let c = CleanupConfig::for_style(SourceStyle::Subtitles);
        assert_eq!(clean_text(raw, &c), "Where is he going?");
    }

    #[test]
    fn splits_simple_sentences() {
        let recs = split_sentences("A b c. D e f.");
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].text, "A b c.");
        assert_eq!(recs[1].text, "D e f.");
        assert!(split_sentences("").is_empty());
    }

    #[test]
    fn abbreviation_does_not_split() {
        let recs = split_sentences("Mr. Smith left. He ran.");
        let texts: Vec<_> = recs.iter().map(|r| r.text.as_str()).collect();
        assert_eq!(texts, vec!["Mr. Smith left.", "He ran."]);
    }

    #[test]
    fn blank_line_is_boundary() {
        let recs = split_sentences("No period here\n\nNext one");
        assert_eq!(recs.len(), 2);
    }

    #[test]
    fn initial_filter_examples() {
        let c = cfg();
        let rec = SentenceRecord::new("a", "He ran.", "");
        assert_eq!(initial_filter(&rec, &c), Verdict::Reject(RejectReason::TooShort));
        let rec = SentenceRecord::new("b", "Paul helped Lionel hide when he was pursued by the authorities.", "");
        assert_eq!(initial_filter(&rec, &c), Verdict::Accept);
        let rec = SentenceRecord::new("c", "Let x = 4 + y because the sum must balance somehow here.", "");
        assert_eq!(initial_filter(&rec, &c), Verdict::Reject(RejectReason::ContainsMath));
        let rec = SentenceRecord::new("d", "paul helped Lionel hide when he was pursued by the authorities.", "");
        assert_eq!(initial_filter(&rec, &c), Verdict::Reject(RejectReason::NoLeadingUppercase));
        let long = format!("Paul {}.", "very ".repeat(40));
        let rec = SentenceRecord::new("e", long, "");
        assert_eq!(initial_filter(&rec, &c), Verdict::Reject(RejectReason::TooLong));
    }

    #[test]
    fn math_predicate_spares_dates() {
        let check = |s: &str| contains_math(s, &crate::text::tokenize(s));
        assert!(!check("He served from 2001-2005 and left on 3/4/2010 quietly."));
        assert!(check("The answer is 3 * 4 in this case."));
        assert!(check("Growth was 5% last year."));
        assert!(!check("She was born in 1970 in Paris."));
    }

    #[test]
    fn config_validation() {
        let bad = CleanupConfig {
            min_tokens: 10,
            max_tokens: 5,
            ..cfg()
        };
        assert!(bad.validate().is_err());
        assert!(cfg().validate().is_ok());
    }
}
