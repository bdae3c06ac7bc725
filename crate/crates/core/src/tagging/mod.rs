//! POS tagging and flat NP chunking.
//!
//! Two tagger providers sit behind [`TaggerHandle`]: a pre-tagged stream
//! produced by any external tagger (`word_TAG` tokens, one sentence per
//! line), and the built-in averaged perceptron. The perceptron is always
//! constrained by a closed-class lexicon, so pronouns, determiners and
//! punctuation never receive learned tags.

mod chunk;
mod perceptron;

pub use chunk::{chunk_nps, Chunk, ChunkKind};
pub use perceptron::{parse_tagged_corpus, PerceptronTagger, TrainConfig};

use std::collections::{BTreeSet, HashMap};
use std::io::BufRead;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Penn Treebank tags understood by the toolkit.
pub const PENN_TAGS: &[&str] = &[
    "CC", "CD", "DT", "EX", "FW", "IN", "JJ", "JJR", "JJS", "LS", "MD", "NN", "NNS", "NNP",
    "NNPS", "PDT", "POS", "PRP", "PRP$", "RB", "RBR", "RBS", "RP", "SYM", "TO", "UH", "VB",
    "VBD", "VBG", "VBN", "VBP", "VBZ", "WDT", "WP", "WP$", "WRB", ",", ".", ":", "(", ")",
    "``", "''", "$", "#",
];

const REQUIRED_TAGS: &[&str] = &["NNP", "NN", "NNS", "DT", "JJ", "PRP", "PRP$"];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagSet {
    tags: BTreeSet<String>,
}

impl TagSet {
    pub fn penn() -> Self {
        Self {
            tags: PENN_TAGS.iter().map(|t| t.to_string()).collect(),
        }
    }

    pub fn new<I, S>(tags: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let tags: BTreeSet<String> = tags.into_iter().map(Into::into).collect();
        if let Some(missing) = REQUIRED_TAGS.iter().find(|t| !tags.contains(**t)) {
            return Err(Error::InvalidConfig(format!("tag set lacks required tag {missing}")));
        }
        Ok(Self { tags })
    }

    pub fn contains(&self, tag: &str) -> bool {
        self.tags.contains(tag)
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.tags.iter().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

/// Tags a closed-class word may take. The first entry is the default.
pub fn closed_class_tags(word: &str) -> Option<&'static [&'static str]> {
    let lower = word.to_lowercase();
    let tags: &'static [&'static str] = match lower.as_str() {
        "he" | "she" | "him" | "it" | "they" | "them" | "i" | "you" | "we" | "me" | "us"
        | "himself" | "herself" | "itself" | "themselves" | "myself" | "yourself"
        | "ourselves" | "hers" => &["PRP"],
        "his" | "its" | "their" | "my" | "your" | "our" => &["PRP$"],
        "her" => &["PRP$", "PRP"],
        "the" | "a" | "an" | "these" | "those" | "every" | "each" => &["DT"],
        "to" => &["TO"],
        "and" | "but" | "or" | "nor" => &["CC"],
        "of" | "in" | "at" | "with" | "from" | "into" | "onto" | "during" | "without"
        | "because" | "although" | "though" | "if" | "whether" | "than" | "upon" | "among"
        | "against" | "toward" | "towards" | "by" => &["IN"],
        "can" | "could" | "will" | "would" | "shall" | "should" | "may" | "might" | "must" => {
            &["MD"]
        }
        "," => &[","],
        "." | "!" | "?" => &["."],
        ";" | ":" | "-" | "--" => &[":"],
        "(" | "[" | "{" => &["("],
        ")" | "]" | "}" => &[")"],
        "\"" | "'" | "`" => &["''"],
        "$" => &["$"],
        "#" => &["#"],
        _ => {
            if !word.is_empty() && word.chars().all(|c| !c.is_alphanumeric()) {
                &["SYM"]
            } else {
                return None;
            }
        }
    };
    Some(tags)
}

/// Sentences tagged by an external tool, keyed by their token sequence.
#[derive(Debug, Clone, Default)]
pub struct PreTaggedStream {
    sentences: HashMap<Vec<String>, Vec<String>>,
}

impl PreTaggedStream {
    pub fn from_reader<R: BufRead>(reader: R, tagset: &TagSet) -> Result<Self> {
        let mut sentences = HashMap::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let (tokens, tags) = parse_pretagged_line(&line).map_err(|message| Error::Parse {
                offset: n,
                message: format!("line {}: {message}", n + 1),
            })?;
            if let Some(bad) = tags.iter().find(|t| !tagset.contains(t)) {
                return Err(Error::Parse {
                    offset: n,
                    message: format!("line {}: tag `{bad}` not in tag set", n + 1),
                });
            }
            sentences.insert(tokens, tags);
        }
        Ok(Self { sentences })
    }

    pub fn insert(&mut self, tokens: Vec<String>, tags: Vec<String>) {
        self.sentences.insert(tokens, tags);
    }

    pub fn get(&self, tokens: &[String]) -> Option<&Vec<String>> {
        self.sentences.get(tokens)
    }

    pub fn len(&self) -> usize {
        self.sentences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.is_empty()
    }
}

/// Splits `word_TAG word_TAG …` at the last underscore of each item.
pub fn parse_pretagged_line(line: &str) -> std::result::Result<(Vec<String>, Vec<String>), String> {
    let mut tokens = Vec::new();
    let mut tags = Vec::new();
    for item in line.split_whitespace() {
        let (word, tag) = item
            .rsplit_once('_')
            .filter(|(w, t)| !w.is_empty() && !t.is_empty())
            .ok_or_else(|| format!("`{item}` is not word_TAG"))?;
        tokens.push(word.to_string());
        tags.push(tag.to_string());
    }
    Ok((tokens, tags))
}

pub fn format_pretagged_line<S: AsRef<str>, T: AsRef<str>>(tokens: &[S], tags: &[T]) -> String {
    tokens
        .iter()
        .zip(tags)
        .map(|(w, t)| format!("{}_{}", w.as_ref(), t.as_ref()))
        .collect::<Vec<_>>()
        .join(" ")
}

#[derive(Debug, Clone)]
pub enum TaggerHandle {
    PreTagged(Arc<PreTaggedStream>),
    Perceptron(Arc<PerceptronTagger>),
}

impl TaggerHandle {
    /// Perceptron trained on the bundled hand-tagged corpus.
    pub fn bundled() -> Self {
        TaggerHandle::Perceptron(PerceptronTagger::bundled())
    }

    pub fn tag(&self, tokens: &[String]) -> Result<Vec<String>> {
        if tokens.is_empty() {
            return Ok(Vec::new());
        }
        match self {
            TaggerHandle::PreTagged(stream) => stream.get(tokens).cloned().ok_or_else(|| {
                Error::TaggerUnavailable(format!(
                    "no pre-tagged entry for `{}`",
                    tokens.join(" ")
                ))
            }),
            TaggerHandle::Perceptron(model) => Ok(model.tag(tokens)),
        }
    }
}

/// Convenience wrapper over [`TaggerHandle::tag`].
pub fn tag(tokens: &[String], tagger: &TaggerHandle) -> Result<Vec<String>> {
    tagger.tag(tokens)
}
