//! Word lists and lexicons bundled with the crate.

use std::collections::{HashMap, HashSet};
use std::sync::LazyLock;

pub const ABBREVIATIONS: &str = include_str!("../data/abbreviations.txt");
pub const STOPWORDS: &str = include_str!("../data/stopwords.txt");
pub const HONORIFICS: &str = include_str!("../data/honorifics.tsv");
pub const PERSON_NOUNS: &str = include_str!("../data/person_nouns.txt");
pub const NAMES: &str = include_str!("../data/names.tsv");
pub const TAGGED_TRAINING: &str = include_str!("../data/tagged_train.txt");

fn lines(data: &str) -> impl Iterator<Item = &str> {
    data.lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.starts_with('#'))
}

pub fn word_set(data: &str) -> HashSet<String> {
    lines(data).map(|l| l.trim().to_lowercase()).collect()
}

static ABBREV_SET: LazyLock<HashSet<String>> = LazyLock::new(|| word_set(ABBREVIATIONS));
static STOPWORD_SET: LazyLock<HashSet<String>> = LazyLock::new(|| word_set(STOPWORDS));
static PERSON_NOUN_SET: LazyLock<HashSet<String>> = LazyLock::new(|| word_set(PERSON_NOUNS));
static HONORIFIC_MAP: LazyLock<HashMap<String, Honorific>> = LazyLock::new(|| {
    lines(HONORIFICS)
        .filter_map(|l| {
            let mut cols = l.split('\t');
            let word = cols.next()?.trim().to_lowercase();
            let gender = match cols.next()?.trim() {
                "F" => Some(crate::lexicon::Gender::Female),
                "M" => Some(crate::lexicon::Gender::Male),
                _ => None,
            };
            let counterpart = cols
                .next()
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(str::to_string);
            Some((word, Honorific { gender, counterpart }))
        })
        .collect()
});

pub fn abbreviations() -> &'static HashSet<String> {
    &ABBREV_SET
}

pub fn stopwords() -> &'static HashSet<String> {
    &STOPWORD_SET
}

pub fn person_nouns() -> &'static HashSet<String> {
    &PERSON_NOUN_SET
}

#[derive(Debug, Clone)]
pub struct Honorific {
    /// `None` for gender-neutral titles such as "Dr" or "Captain".
    pub gender: Option<crate::lexicon::Gender>,
    /// Lowercase opposite-gender form ("sister" for "brother").
    pub counterpart: Option<String>,
}

/// Looks up a title, ignoring case and a trailing period ("Mr." == "mr").
pub fn honorific(token: &str) -> Option<&'static Honorific> {
    let key = token.trim_end_matches('.').to_lowercase();
    HONORIFIC_MAP.get(&key)
}

pub fn is_honorific(token: &str) -> bool {
    honorific(token).is_some()
}
