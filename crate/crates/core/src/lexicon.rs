//! First-name gender lexicon.
//!
//! File format is TSV: `name<TAB>F|M|A[<TAB>frequency]`, `#` comments allowed.
//! A name listed as both F and M collapses to ambiguous.

use std::collections::HashMap;
use std::io::BufRead;
use std::sync::{Arc, LazyLock};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::PronounGender;
use crate::resources;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gender {
    Female,
    Male,
    Ambiguous,
}

impl Gender {
    pub fn matches(self, pronoun: PronounGender) -> bool {
        matches!(
            (self, pronoun),
            (Gender::Female, PronounGender::Feminine) | (Gender::Male, PronounGender::Masculine)
        )
    }

    pub fn of_pronoun(pronoun: PronounGender) -> Self {
        match pronoun {
            PronounGender::Masculine => Gender::Male,
            PronounGender::Feminine => Gender::Female,
        }
    }

    fn code(self) -> &'static str {
        match self {
            Gender::Female => "F",
            Gender::Male => "M",
            Gender::Ambiguous => "A",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexiconEntry {
    pub display: String,
    pub gender: Gender,
    pub frequency: Option<u64>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GenderLexicon {
    entries: HashMap<String, LexiconEntry>,
}

static BUNDLED: LazyLock<Arc<GenderLexicon>> = LazyLock::new(|| {
    Arc::new(GenderLexicon::from_tsv(resources::NAMES).expect("bundled lexicon parses"))
});

impl GenderLexicon {
    pub fn new() -> Self {
        Self::default()
    }

    /// The starter lexicon shipped with the crate.
    pub fn bundled() -> Arc<GenderLexicon> {
        BUNDLED.clone()
    }

    pub fn from_tsv(data: &str) -> Result<Self> {
        Self::from_reader(data.as_bytes())
    }

    pub fn from_reader<R: BufRead>(reader: R) -> Result<Self> {
        let mut lex = Self::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            let line = line.trim_end();
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let mut cols = line.split('\t');
            let name = cols.next().unwrap_or_default().trim();
            let gender = match cols.next().map(str::trim) {
                Some("F") | Some("f") => Gender::Female,
                Some("M") | Some("m") => Gender::Male,
                Some("A") | Some("a") => Gender::Ambiguous,
                other => {
                    return Err(Error::Parse {
                        offset: n,
                        message: format!("line {}: bad gender column {other:?}", n + 1),
                    })
                }
            };
            let frequency = match cols.next().map(str::trim).filter(|s| !s.is_empty()) {
                Some(f) => Some(f.parse::<u64>().map_err(|_| Error::Parse {
                    offset: n,
                    message: format!("line {}: bad frequency `{f}`", n + 1),
                })?),
                None => None,
            };
            if name.is_empty() {
                continue;
            }
            lex.insert(name, gender, frequency);
        }
        Ok(lex)
    }

    pub fn insert(&mut self, name: &str, gender: Gender, frequency: Option<u64>) {
        let key = name.to_lowercase();
        match self.entries.get_mut(&key) {
            Some(entry) => {
                if entry.gender != gender {
                    entry.gender = Gender::Ambiguous;
                }
                entry.frequency = entry.frequency.max(frequency);
            }
            None => {
                self.entries.insert(
                    key,
                    LexiconEntry {
                        display: name.to_string(),
                        gender,
                        frequency,
                    },
                );
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&LexiconEntry> {
        self.entries.get(&name.to_lowercase())
    }

    pub fn gender(&self, name: &str) -> Option<Gender> {
        self.get(name).map(|e| e.gender)
    }

    pub fn frequency(&self, name: &str) -> Option<u64> {
        self.get(name).and_then(|e| e.frequency)
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(&name.to_lowercase())
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Display forms of every unambiguous name of `gender`, sorted so that
    /// seeded draws are reproducible.
    pub fn names_of(&self, gender: Gender) -> Vec<&str> {
        let mut names: Vec<&str> = self
            .entries
            .values()
            .filter(|e| e.gender == gender)
            .map(|e| e.display.as_str())
            .collect();
        names.sort_unstable();
        names
    }

    pub fn to_tsv(&self) -> String {
        let mut rows: Vec<_> = self.entries.values().collect();
        rows.sort_by(|a, b| a.display.cmp(&b.display));
        rows.iter()
            .map(|e| match e.frequency {
                Some(f) => format!("{}\t{}\t{f}\n", e.display, e.gender.code()),
                None => format!("{}\t{}\n", e.display, e.gender.code()),
            })
            .collect()
    }
}
