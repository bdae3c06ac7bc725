//! Connective filtering and antecedent filtering.

use std::collections::HashSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::{apply_initial_filter, CleanupConfig};
use crate::lexicon::GenderLexicon;
use crate::model::{
    is_any_pronoun, is_target_pronoun, MentionSpan, PronounGender, ProblemInstance, RejectReason,
    SentenceRecord, Stage, Verdict,
};
use crate::resources;
use crate::tagging::{chunk_nps, Chunk, ChunkKind, TaggerHandle};
use crate::text::{is_word, strip_possessive};

pub const DEFAULT_CONNECTIVES: &[&str] = &[
    ",", ";", "or", "since", "but", "because", "although", "though", "while", "and", "when",
    "until", "after", "before", "as",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectiveConfig {
    pub connectives: Vec<String>,
    pub min_content_words_before: usize,
    pub stopwords: HashSet<String>,
}

impl Default for ConnectiveConfig {
    fn default() -> Self {
        Self {
            connectives: DEFAULT_CONNECTIVES.iter().map(|s| s.to_string()).collect(),
            min_content_words_before: 2,
            stopwords: resources::stopwords().clone(),
        }
    }
}

impl ConnectiveConfig {
    pub fn validate(&self) -> Result<()> {
        if self.connectives.is_empty() {
            return Err(Error::InvalidConfig("connective list is empty".into()));
        }
        if self.min_content_words_before == 0 {
            return Err(Error::InvalidConfig(
                "min_content_words_before must be at least 1".into(),
            ));
        }
        Ok(())
    }

    pub fn is_connective(&self, token: &str) -> bool {
        self.connectives.iter().any(|c| c.eq_ignore_ascii_case(token))
    }

    fn is_content_word(&self, token: &str) -> bool {
        is_word(token)
            && !self.is_connective(token)
            && !is_any_pronoun(token)
            && !self.stopwords.contains(&token.to_lowercase())
    }
}

/// Maximal runs of connective tokens, as half-open token ranges.
fn clusters(tokens: &[String], config: &ConnectiveConfig) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        if config.is_connective(&tokens[i]) {
            let start = i;
            while i < tokens.len() && config.is_connective(&tokens[i]) {
                i += 1;
            }
            out.push((start, i));
        } else {
            i += 1;
        }
    }
    out
}

/// Picks the connective cluster splitting the candidate context from the
/// pronoun clause.
///
/// The connective is the first cluster with enough content words before it.
/// Only the stretch from the sentence start to the first pronoun after the
/// connective must hold a single cluster; the pronoun's own clause may
/// contain further connectives.
pub fn connective_filter(
    record: &SentenceRecord,
    config: &ConnectiveConfig,
) -> std::result::Result<MentionSpan, RejectReason> {
    let tokens = &record.tokens;
    let runs = clusters(tokens, config);
    if runs.is_empty() {
        return Err(RejectReason::NoConnective);
    }

    let mut content = 0;
    let mut next = 0;
    let mut chosen = None;
    for &(start, end) in &runs {
        content += tokens[next..start]
            .iter()
            .filter(|t| config.is_content_word(t))
            .count();
        next = end;
        if content >= config.min_content_words_before {
            chosen = Some((start, end));
            break;
        }
    }
    let (start, end) = chosen.ok_or(RejectReason::TooFewContentWordsBefore)?;

    let pronoun_after = (end..tokens.len()).find(|&i| is_any_pronoun(&tokens[i]));
    let scope_end = pronoun_after.unwrap_or(tokens.len());
    if runs.iter().filter(|(s, _)| *s < scope_end).count() != 1 {
        return Err(RejectReason::MultipleConnectiveClusters);
    }
    if pronoun_after.is_none() {
        return Err(RejectReason::NoPronounAfter);
    }
    if tokens[..start].iter().any(|t| is_any_pronoun(t)) {
        return Err(RejectReason::PronounBeforeConnective);
    }
    Ok(MentionSpan::from_tokens(tokens, start, end))
}

/// Decides whether a chunk denotes a person.
#[derive(Debug, Clone)]
pub struct PersonTest {
    pub lexicon: Arc<GenderLexicon>,
    pub person_nouns: HashSet<String>,
}

impl Default for PersonTest {
    fn default() -> Self {
        Self {
            lexicon: GenderLexicon::bundled(),
            person_nouns: resources::person_nouns().clone(),
        }
    }
}

impl PersonTest {
    pub fn new(lexicon: Arc<GenderLexicon>, person_nouns: HashSet<String>) -> Self {
        Self {
            lexicon,
            person_nouns,
        }
    }

    pub fn is_person(&self, chunk: &Chunk, tokens: &[String]) -> bool {
        person_test(chunk, tokens, &self.lexicon, &self.person_nouns)
    }
}

/// A proper NP whose head (or given name) is a known first name, any NP with
/// an honorific, or a common NP headed by a person noun.
pub fn person_test(
    chunk: &Chunk,
    tokens: &[String],
    lexicon: &GenderLexicon,
    person_nouns: &HashSet<String>,
) -> bool {
    if chunk.has_honorific(tokens) {
        return true;
    }
    let head = strip_possessive(&tokens[chunk.head]);
    match chunk.kind {
        ChunkKind::ProperNP => {
            let first = strip_possessive(&tokens[chunk.span.start]);
            lexicon.contains(head) || lexicon.contains(first)
        }
        ChunkKind::CommonNP => person_nouns.contains(&head.to_lowercase()),
    }
}

/// Builds an unlabeled instance from a sentence that passed the connective
/// filter.
pub fn antecedent_filter(
    record: &SentenceRecord,
    connective: &MentionSpan,
    chunks: &[Chunk],
    person: &PersonTest,
) -> std::result::Result<ProblemInstance, RejectReason> {
    let tokens = &record.tokens;
    let before: Vec<&Chunk> = chunks
        .iter()
        .filter(|c| c.span.end <= connective.start)
        .collect();
    let [first, second] = before[..] else {
        return Err(RejectReason::WrongNPCount);
    };

    let after: HashSet<String> = tokens[connective.end..]
        .iter()
        .map(|t| strip_possessive(t).to_lowercase())
        .collect();
    let head_key = |c: &Chunk| strip_possessive(&tokens[c.head]).to_lowercase();
    if after.contains(&head_key(first)) || after.contains(&head_key(second)) {
        return Err(RejectReason::NPReoccurs);
    }
    if !person.is_person(first, tokens) || !person.is_person(second, tokens) {
        return Err(RejectReason::NotPersonNP);
    }
    let p = (connective.end..tokens.len())
        .find(|&i| is_target_pronoun(&tokens[i]))
        .ok_or(RejectReason::NoTargetPronoun)?;
    let pronoun = MentionSpan::from_tokens(tokens, p, p + 1);
    let pronoun_gender = PronounGender::of(&pronoun.surface).expect("target pronoun has a gender");

    Ok(ProblemInstance {
        id: record.id.clone(),
        text: record.text.clone(),
        tokens: tokens.clone(),
        c1: first.span.clone(),
        c2: second.span.clone(),
        pronoun,
        connective: Some(connective.clone()),
        label: None,
        pronoun_gender,
        source: record.source.clone(),
        derived_from: None,
        switched: false,
    })
}

/// One line of the rejection log.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    pub id: String,
    pub stage: Stage,
    pub reason: RejectReason,
}

impl Rejection {
    pub fn to_line(&self) -> String {
        format!("{}\t{}\t{}", self.id, self.stage, self.reason)
    }
}

/// The three filter stages wired together.
#[derive(Debug, Clone)]
pub struct Miner {
    pub cleanup: CleanupConfig,
    pub connectives: ConnectiveConfig,
    pub tagger: TaggerHandle,
    pub person: PersonTest,
}

impl Miner {
    pub fn new(tagger: TaggerHandle) -> Self {
        Self {
            cleanup: CleanupConfig::default(),
            connectives: ConnectiveConfig::default(),
            tagger,
            person: PersonTest::default(),
        }
    }

    /// Runs every stage on `record`, recording verdicts as it goes. Tagger
    /// failures are errors, not rejections.
    pub fn mine(&self, record: &mut SentenceRecord) -> Result<Option<ProblemInstance>> {
        if record.verdicts.is_empty() && !apply_initial_filter(record, &self.cleanup) {
            return Ok(None);
        }
        if record.rejection().is_some() {
            return Ok(None);
        }
        let connective = match connective_filter(record, &self.connectives) {
            Ok(span) => {
                record.record(Stage::Connective, Verdict::Accept);
                span
            }
            Err(reason) => {
                record.record(Stage::Connective, Verdict::Reject(reason));
                return Ok(None);
            }
        };
        let tags = match &record.tags {
            Some(tags) => tags.clone(),
            None => self.tagger.tag(&record.tokens)?,
        };
        record.set_tags(tags)?;
        let chunks = chunk_nps(&record.tokens, record.tags.as_deref().unwrap_or_default());
        match antecedent_filter(record, &connective, &chunks, &self.person) {
            Ok(instance) => {
                record.record(Stage::Antecedent, Verdict::Accept);
                Ok(Some(instance))
            }
            Err(reason) => {
                record.record(Stage::Antecedent, Verdict::Reject(reason));
                Ok(None)
            }
        }
    }

    pub fn rejection(record: &SentenceRecord) -> Option<Rejection> {
        record.rejection().map(|(stage, reason)| Rejection {
            id: record.id.clone(),
            stage,
            reason,
        })
    }
}
