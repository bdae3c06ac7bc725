//! Core data types and the line-delimited corpus format.
//!
//! Every stage reads and writes [`ProblemInstance`] records as one JSON
//! object per line. Spans are token-index ranges into `tokens`; character
//! offsets are never stored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Masculine target pronouns.
pub const MASCULINE_PRONOUNS: &[&str] = &["he", "him", "his"];
/// Feminine target pronouns.
pub const FEMININE_PRONOUNS: &[&str] = &["she", "her", "hers"];
/// Pronouns that only matter for rejecting sentences.
pub const OTHER_PRONOUNS: &[&str] = &["it", "its", "they", "them", "their"];

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MentionSpan {
    pub start: usize,
    pub end: usize,
    pub surface: String,
}

impl MentionSpan {
    pub fn from_tokens<S: AsRef<str>>(tokens: &[S], start: usize, end: usize) -> Self {
        let surface = tokens[start..end]
            .iter()
            .map(AsRef::as_ref)
            .collect::<Vec<_>>()
            .join(" ");
        Self { start, end, surface }
    }

    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.start >= self.end
    }

    pub fn overlaps(&self, other: &MentionSpan) -> bool {
        self.start < other.end && other.start < self.end
    }

    pub fn contains(&self, index: usize) -> bool {
        (self.start..self.end).contains(&index)
    }
}

/// Which candidate antecedent is meant. Serialized as `1` or `2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum AntecedentId {
    First,
    Second,
}

impl AntecedentId {
    pub fn other(self) -> Self {
        match self {
            AntecedentId::First => AntecedentId::Second,
            AntecedentId::Second => AntecedentId::First,
        }
    }
}

impl TryFrom<u8> for AntecedentId {
    type Error = String;

    fn try_from(v: u8) -> std::result::Result<Self, String> {
        match v {
            1 => Ok(AntecedentId::First),
            2 => Ok(AntecedentId::Second),
            other => Err(format!("label must be 1, 2 or null, got {other}")),
        }
    }
}

impl From<AntecedentId> for u8 {
    fn from(id: AntecedentId) -> u8 {
        match id {
            AntecedentId::First => 1,
            AntecedentId::Second => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PronounGender {
    #[serde(rename = "m")]
    Masculine,
    #[serde(rename = "f")]
    Feminine,
}

impl PronounGender {
    /// Gender of a target pronoun, case-insensitive; `None` for anything else.
    pub fn of(word: &str) -> Option<Self> {
        let w = word.to_lowercase();
        if MASCULINE_PRONOUNS.contains(&w.as_str()) {
            Some(PronounGender::Masculine)
        } else if FEMININE_PRONOUNS.contains(&w.as_str()) {
            Some(PronounGender::Feminine)
        } else {
            None
        }
    }
}

pub fn is_target_pronoun(word: &str) -> bool {
    PronounGender::of(word).is_some()
}

pub fn is_any_pronoun(word: &str) -> bool {
    is_target_pronoun(word) || OTHER_PRONOUNS.contains(&word.to_lowercase().as_str())
}

/// One task tuple: sentence, two candidates, target pronoun and answer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemInstance {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub c1: MentionSpan,
    pub c2: MentionSpan,
    pub pronoun: MentionSpan,
    pub connective: Option<MentionSpan>,
    pub label: Option<AntecedentId>,
    pub pronoun_gender: PronounGender,
    pub source: String,
    pub derived_from: Option<String>,
    pub switched: bool,
}

impl ProblemInstance {
    pub fn candidate(&self, which: AntecedentId) -> &MentionSpan {
        match which {
            AntecedentId::First => &self.c1,
            AntecedentId::Second => &self.c2,
        }
    }

    /// Surface of the correct antecedent, if labeled.
    pub fn answer_surface(&self) -> Option<&str> {
        self.label.map(|l| self.candidate(l).surface.as_str())
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvariantViolation {
                id: self.id.clone(),
                reason,
            })
        };
        let n = self.tokens.len();
        let mut spans = vec![("c1", &self.c1), ("c2", &self.c2), ("pronoun", &self.pronoun)];
        if let Some(conn) = &self.connective {
            spans.push(("connective", conn));
        }
        for (name, span) in &spans {
            if span.start >= span.end || span.end > n {
                return fail(format!(
                    "{name} span [{}, {}) out of bounds for {n} tokens",
                    span.start, span.end
                ));
            }
            let joined = self.tokens[span.start..span.end].join(" ");
            if joined != span.surface {
                return fail(format!(
                    "{name} surface `{}` does not match tokens `{joined}`",
                    span.surface
                ));
            }
        }
        for (i, (a_name, a)) in spans.iter().enumerate() {
            for (b_name, b) in &spans[i + 1..] {
                if a.overlaps(b) {
                    return fail(format!("{a_name} and {b_name} spans overlap"));
                }
            }
        }
        if self.c1.end > self.c2.start {
            return fail("c1 must precede c2".into());
        }
        if self.c2.end > self.pronoun.start {
            return fail("both candidates must precede the pronoun".into());
        }
        if self.pronoun.len() != 1 {
            return fail("pronoun span must be a single token".into());
        }
        match PronounGender::of(&self.pronoun.surface) {
            Some(g) if g == self.pronoun_gender => {}
            Some(_) => return fail("pronoun_gender disagrees with the pronoun".into()),
            None => {
                return fail(format!(
                    "`{}` is not a target pronoun",
                    self.pronoun.surface
                ))
            }
        }
        if self.switched && self.derived_from.is_none() {
            return fail("switched instance without derived_from".into());
        }
        Ok(())
    }
}

/// Serializes one instance as a single record line (no trailing newline).
pub fn serialize_instance(instance: &ProblemInstance) -> Result<String> {
    instance.validate()?;
    Ok(serde_json::to_string(instance)?)
}

/// Parses and validates one record line.
pub fn parse_instance(line: &str) -> Result<ProblemInstance> {
    let instance: ProblemInstance = serde_json::from_str(line).map_err(|e| json_error(line, e))?;
    instance.validate()?;
    Ok(instance)
}

fn json_error(line: &str, e: serde_json::Error) -> Error {
    // serde_json reports 1-based line/column positions; convert to a byte offset.
    let mut offset = 0;
    for (i, l) in line.split_inclusive('\n').enumerate() {
        if i + 1 == e.line() {
            offset += e.column().saturating_sub(1).min(l.len());
            break;
        }
        offset += l.len();
    }
    Error::Parse {
        offset,
        message: e.to_string(),
    }
}

/// Pipeline stages in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Initial,
    Connective,
    Antecedent,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Initial => "initial",
            Stage::Connective => "connective",
            Stage::Antecedent => "antecedent",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RejectReason {
    TooShort,
    TooLong,
    NoLeadingUppercase,
    ContainsMath,
    NoConnective,
    MultipleConnectiveClusters,
    TooFewContentWordsBefore,
    NoPronounAfter,
    PronounBeforeConnective,
    WrongNPCount,
    NPReoccurs,
    NotPersonNP,
    NoTargetPronoun,
}

impl RejectReason {
    pub const ALL: [RejectReason; 13] = [
        RejectReason::TooShort,
        RejectReason::TooLong,
        RejectReason::NoLeadingUppercase,
        RejectReason::ContainsMath,
        RejectReason::NoConnective,
        RejectReason::MultipleConnectiveClusters,
        RejectReason::TooFewContentWordsBefore,
        RejectReason::NoPronounAfter,
        RejectReason::PronounBeforeConnective,
        RejectReason::WrongNPCount,
        RejectReason::NPReoccurs,
        RejectReason::NotPersonNP,
        RejectReason::NoTargetPronoun,
    ];

    pub fn stage(self) -> Stage {
        use RejectReason::*;
        match self {
            TooShort | TooLong | NoLeadingUppercase | ContainsMath => Stage::Initial,
            NoConnective
            | MultipleConnectiveClusters
            | TooFewContentWordsBefore
            | NoPronounAfter
            | PronounBeforeConnective => Stage::Connective,
            WrongNPCount | NPReoccurs | NotPersonNP | NoTargetPronoun => Stage::Antecedent,
        }
    }
}

impl fmt::Display for RejectReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for RejectReason {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        RejectReason::ALL
            .into_iter()
            .find(|r| r.to_string() == s)
            .ok_or_else(|| Error::Parse {
                offset: 0,
                message: format!("unknown rejection reason `{s}`"),
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Accept,
    Reject(RejectReason),
}

impl Verdict {
    pub fn is_accept(&self) -> bool {
        matches!(self, Verdict::Accept)
    }
}

/// A cleaned candidate sentence travelling through the filter stages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SentenceRecord {
    pub id: String,
    pub text: String,
    pub tokens: Vec<String>,
    pub tags: Option<Vec<String>>,
    pub source: String,
    pub verdicts: Vec<(Stage, Verdict)>,
}

impl SentenceRecord {
    pub fn new(id: impl Into<String>, text: impl Into<String>, source: impl Into<String>) -> Self {
        let text = text.into();
        Self {
            id: id.into(),
            tokens: crate::text::tokenize(&text),
            text,
            tags: None,
            source: source.into(),
            verdicts: Vec::new(),
        }
    }

    /// Appends a stage verdict; stages must arrive in pipeline order.
    pub fn record(&mut self, stage: Stage, verdict: Verdict) {
        if let Some((last, _)) = self.verdicts.last() {
            assert!(*last < stage, "stage {stage} recorded after {last}");
        }
        self.verdicts.push((stage, verdict));
    }

    pub fn set_tags(&mut self, tags: Vec<String>) -> Result<()> {
        if tags.len() != self.tokens.len() {
            return Err(Error::InvalidConfig(format!(
                "sentence `{}` has {} tokens but {} tags",
                self.id,
                self.tokens.len(),
                tags.len()
            )));
        }
        self.tags = Some(tags);
        Ok(())
    }

    /// The first rejection recorded, if any.
    pub fn rejection(&self) -> Option<(Stage, RejectReason)> {
        self.verdicts.iter().find_map(|(s, v)| match v {
            Verdict::Reject(r) => Some((*s, *r)),
            Verdict::Accept => None,
        })
    }
}

/// Parses a `id<TAB>text` sentence line.
pub fn parse_sentence_line(line: &str, source: &str) -> Result<SentenceRecord> {
    let (id, text) = line.split_once('\t').ok_or_else(|| Error::Parse {
        offset: 0,
        message: "sentence line needs `id<TAB>text`".into(),
    })?;
    Ok(SentenceRecord::new(id, text, source))
}

pub fn format_sentence_line(record: &SentenceRecord) -> String {
    format!("{}\t{}", record.id, record.text.replace(['\t', '\n'], " "))
}

/// A resolver's decision for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Choice {
    First,
    Second,
    Both,
    None,
}

impl Choice {
    pub fn decision(self) -> Option<AntecedentId> {
        match self {
            Choice::First => Some(AntecedentId::First),
            Choice::Second => Some(AntecedentId::Second),
            Choice::Both | Choice::None => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Choice::First => "1",
            Choice::Second => "2",
            Choice::Both => "both",
            Choice::None => "none",
        }
    }
}

impl From<AntecedentId> for Choice {
    fn from(id: AntecedentId) -> Self {
        match id {
            AntecedentId::First => Choice::First,
            AntecedentId::Second => Choice::Second,
        }
    }
}

impl FromStr for Choice {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_lowercase().as_str() {
            "1" => Ok(Choice::First),
            "2" => Ok(Choice::Second),
            "both" => Ok(Choice::Both),
            "none" => Ok(Choice::None),
            other => Err(format!("choice must be 1, 2, both or none, got `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub instance_id: String,
    pub choice: Choice,
    pub score_first: Option<f64>,
}

impl Prediction {
    pub fn new(instance_id: impl Into<String>, choice: Choice) -> Self {
        Self {
            instance_id: instance_id.into(),
            choice,
            score_first: None,
        }
    }

    /// `id<TAB>choice[<TAB>score]`
    pub fn to_line(&self) -> String {
        match self.score_first {
            Some(s) => format!("{}\t{}\t{s}", self.instance_id, self.choice.as_str()),
            None => format!("{}\t{}", self.instance_id, self.choice.as_str()),
        }
    }

    pub fn parse_line(line: &str) -> std::result::Result<Self, String> {
        let mut cols = line.trim_end_matches(['\r', '\n']).split('\t');
        let id = cols.next().filter(|s| !s.is_empty()).ok_or("missing id")?;
        let choice: Choice = cols.next().ok_or("missing choice")?.parse()?;
        let score_first = match cols.next().map(str::trim).filter(|s| !s.is_empty()) {
            Some(s) => {
                let v: f64 = s.parse().map_err(|_| format!("bad score `{s}`"))?;
                if !(0.0..=1.0).contains(&v) {
                    return Err(format!("score {v} outside [0, 1]"));
                }
                Some(v)
            }
            None => None,
        };
        if cols.next().is_some() {
            return Err("too many columns".into());
        }
        Ok(Self {
            instance_id: id.to_string(),
            choice,
            score_first,
        })
    }
}

#[cfg(test)]
pub(crate) use tests::example_one;

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::tokenize;

    pub(crate) fn example_one() -> ProblemInstance {
        let text = "Paul helped Lionel hide when he was pursued by the authorities.";
        let tokens = tokenize(text);
        ProblemInstance {
            id: "ex1".into(),
            text: text.into(),
            c1: MentionSpan::from_tokens(&tokens, 0, 1),
            c2: MentionSpan::from_tokens(&tokens, 2, 3),
            pronoun: MentionSpan::from_tokens(&tokens, 5, 6),
            connective: Some(MentionSpan::from_tokens(&tokens, 4, 5)),
            tokens,
            label: Some(AntecedentId::Second),
            pronoun_gender: PronounGender::Masculine,
            source: "example".into(),
            derived_from: None,
            switched: false,
        }
    }

    #[test]
    fn serializes_label_as_two() {
        let line = serialize_instance(&example_one()).unwrap();
        assert!(!line.contains('\n'));
        let v: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(v["label"], 2);
        assert_eq!(v["pronoun_gender"], "m");
        assert_eq!(v["c2"]["surface"], "Lionel");
        assert_eq!(v["derived_from"], serde_json::Value::Null);
    }

    #[test]
    fn unlabeled_serializes_null() {
        let mut inst = example_one();
        inst.label = None;
        let v: serde_json::Value = serde_json::from_str(&serialize_instance(&inst).unwrap()).unwrap();
        assert!(v["label"].is_null());
    }

    #[test]
    fn overlapping_spans_rejected() {
        let mut inst = example_one();
        inst.c2 = MentionSpan::from_tokens(&inst.tokens, 0, 1);
        assert!(matches!(serialize_instance(&inst), Err(Error::InvariantViolation { .. })));
    }

    #[test]
    fn round_trip_example() {
        let inst = example_one();
        let back = parse_instance(&serialize_instance(&inst).unwrap()).unwrap();
        assert_eq!(back, inst);
    }

    #[test]
    fn label_three_is_parse_error() {
        let line = serialize_instance(&example_one()).unwrap().replace("\"label\":2", "\"label\":3");
        match parse_instance(&line) {
            Err(Error::Parse { offset, .. }) => assert!(offset > 0 && offset <= line.len()),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn truncated_line_is_parse_error() {
        let line = serialize_instance(&example_one()).unwrap();
        let cut = &line[..line.len() / 2];
        assert!(matches!(parse_instance(cut), Err(Error::Parse { .. })));
    }

    #[test]
    fn valid_syntax_bad_spans_is_invariant_violation() {
        let mut inst = example_one();
        inst.c1.surface = "Lionel".into();
        let line = serde_json::to_string(&inst).unwrap();
        assert!(matches!(parse_instance(&line), Err(Error::InvariantViolation { .. })));
    }

    #[test]
    fn switched_needs_derived_from() {
        let mut inst = example_one();
        inst.switched = true;
        assert!(inst.validate().is_err());
    }

    #[test]
    fn prediction_lines() {
        let p = Prediction::parse_line("x1\tboth").unwrap();
        assert_eq!(p.choice, Choice::Both);
        let p = Prediction::parse_line("x1\t1\t0.62").unwrap();
        assert_eq!(p.score_first, Some(0.62));
        assert_eq!(p.to_line(), "x1\t1\t0.62");
        assert!(Prediction::parse_line("x1\t3").is_err());
        assert!(Prediction::parse_line("x1").is_err());
    }

    #[test]
    fn pronoun_inventory() {
        assert_eq!(PronounGender::of("His"), Some(PronounGender::Masculine));
        assert_eq!(PronounGender::of("hers"), Some(PronounGender::Feminine));
        assert_eq!(PronounGender::of("they"), None);
        assert!(is_any_pronoun("They"));
    }
}

