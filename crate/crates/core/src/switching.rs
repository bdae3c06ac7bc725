//! Antecedent switching: swap the two candidates everywhere they occur.
//!
//! The correct answer keeps its position (First stays First) while its
//! surface name changes, which is what the consistency metric relies on.

use serde::{Deserialize, Serialize};

use crate::edit::{self, Edit};
use crate::error::{Error, Result};
use crate::model::{MentionSpan, ProblemInstance};
use crate::text::strip_possessive;

pub const SWITCHED_SUFFIX: &str = "-sw";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwitchedPair {
    pub original: ProblemInstance,
    pub switched: ProblemInstance,
}

/// A mention's tokens with any possessive on the last token removed.
fn key(tokens: &[String], span: &MentionSpan) -> Vec<String> {
    let mut k: Vec<String> = tokens[span.start..span.end].to_vec();
    if let Some(last) = k.last_mut() {
        *last = strip_possessive(last).to_string();
    }
    k
}

fn contains_run(haystack: &[String], needle: &[String]) -> bool {
    haystack.windows(needle.len()).any(|w| w == needle)
}

/// Length of an occurrence of `pattern` at `i` (exact, or with a possessive
/// on its last token), or `None`.
fn occurrence_at(tokens: &[String], i: usize, pattern: &[String]) -> Option<String> {
    let n = pattern.len();
    if i + n > tokens.len() || tokens[i..i + n - 1] != pattern[..n - 1] {
        return None;
    }
    let last = &tokens[i + n - 1];
    let stem = strip_possessive(last);
    (stem == pattern[n - 1]).then(|| last[stem.len()..].to_string())
}

fn with_suffix(pattern: &[String], suffix: &str) -> Vec<String> {
    let mut out = pattern.to_vec();
    if let Some(last) = out.last_mut() {
        last.push_str(suffix);
    }
    out
}

/// Swaps every occurrence of the two candidates simultaneously.
pub fn switch_antecedents(instance: &ProblemInstance) -> Result<ProblemInstance> {
    instance.validate()?;
    let a = key(&instance.tokens, &instance.c1);
    let b = key(&instance.tokens, &instance.c2);
    if a == b {
        return Err(Error::IdenticalCandidates(instance.id.clone()));
    }
    if contains_run(&a, &b) || contains_run(&b, &a) {
        return Err(Error::OverlappingOccurrences(instance.id.clone()));
    }

    // One left-to-right pass collects all matches before any rewrite, so a
    // replaced name is never matched again.
    let mut edits = Vec::new();
    let mut i = 0;
    while i < instance.tokens.len() {
        if instance.pronoun.contains(i) {
            i += 1;
            continue;
        }
        let hit = occurrence_at(&instance.tokens, i, &a)
            .map(|s| (a.len(), with_suffix(&b, &s)))
            .or_else(|| occurrence_at(&instance.tokens, i, &b).map(|s| (b.len(), with_suffix(&a, &s))));
        match hit {
            Some((len, replacement)) => {
                edits.push(Edit {
                    start: i,
                    end: i + len,
                    replacement,
                });
                i += len;
            }
            None => i += 1,
        }
    }

    let mut out = instance.clone();
    edit::apply(&mut out, &edits);
    if instance.switched {
        if let Some(base) = instance.id.strip_suffix(SWITCHED_SUFFIX) {
            out.id = base.to_string();
        }
        out.derived_from = None;
        out.switched = false;
    } else {
        out.id = format!("{}{SWITCHED_SUFFIX}", instance.id);
        out.derived_from = Some(instance.id.clone());
        out.switched = true;
    }
    out.validate()?;
    Ok(out)
}

/// An instance that could not be switched.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub id: String,
    pub reason: String,
}

fn skip(instance: &ProblemInstance, err: Error) -> Skipped {
    let reason = match err {
        Error::IdenticalCandidates(_) => "IdenticalCandidates".to_string(),
        Error::OverlappingOccurrences(_) => "OverlappingOccurrences".to_string(),
        other => other.to_string(),
    };
    Skipped {
        id: instance.id.clone(),
        reason,
    }
}

/// Original/switched pairs for every instance that switches cleanly.
pub fn pair_corpus<I>(corpus: I) -> (Vec<SwitchedPair>, Vec<Skipped>)
where
    I: IntoIterator<Item = ProblemInstance>,
{
    let mut pairs = Vec::new();
    let mut skipped = Vec::new();
    for original in corpus {
        match switch_antecedents(&original) {
            Ok(switched) => pairs.push(SwitchedPair { original, switched }),
            Err(e) => skipped.push(skip(&original, e)),
        }
    }
    (pairs, skipped)
}

/// The input plus one switched copy per cleanly switching instance. Each
/// switched copy directly follows its original. Instances that cannot be
/// switched are kept once and reported.
pub fn augment_corpus<I>(corpus: I) -> (Vec<ProblemInstance>, Vec<Skipped>)
where
    I: IntoIterator<Item = ProblemInstance>,
{
    let mut out = Vec::new();
    let mut skipped = Vec::new();
    for original in corpus {
        let switched = switch_antecedents(&original);
        out.push(original);
        match switched {
            Ok(s) => out.push(s),
            Err(e) => skipped.push(skip(out.last().unwrap(), e)),
        }
    }
    (out, skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{AntecedentId, PronounGender};
    use crate::text::tokenize;

    fn instance(text: &str, c1: (usize, usize), c2: (usize, usize), p: usize) -> ProblemInstance {
        let tokens = tokenize(text);
        ProblemInstance {
            id: "ex".into(),
            text: text.into(),
            c1: MentionSpan::from_tokens(&tokens, c1.0, c1.1),
            c2: MentionSpan::from_tokens(&tokens, c2.0, c2.1),
            pronoun: MentionSpan::from_tokens(&tokens, p, p + 1),
            connective: None,
            pronoun_gender: PronounGender::of(&tokens[p]).unwrap(),
            tokens,
            label: Some(AntecedentId::Second),
            source: "test".into(),
            derived_from: None,
            switched: false,
        }
    }

    #[test]
    fn swaps_names_keeps_position() {
        let x = instance("Alex tells Paulo, but he does not believe him.", (0, 1), (2, 3), 5);
        let s = switch_antecedents(&x).unwrap();
        assert_eq!(s.text, "Paulo tells Alex, but he does not believe him.");
        assert_eq!(s.label, Some(AntecedentId::Second));
        assert_eq!(s.answer_surface(), Some("Alex"));
        assert_eq!(x.answer_surface(), Some("Paulo"));
        assert_eq!(s.id, "ex-sw");
        assert_eq!(s.derived_from.as_deref(), Some("ex"));
        assert!(s.switched);
        assert_eq!(switch_antecedents(&s).unwrap(), x);
    }

    #[test]
    fn multi_token_candidate() {
        let text = "Radu appeared to be killed by Brother Paulo, but he reappears a short while later injured, but alive.";
        let x = instance(text, (0, 1), (6, 8), 10);
        let s = switch_antecedents(&x).unwrap();
        assert_eq!(
            s.text,
            "Brother Paulo appeared to be killed by Radu, but he reappears a short while later injured, but alive."
        );
        assert_eq!((s.c1.start, s.c1.end), (0, 2));
        assert_eq!(s.c1.surface, "Brother Paulo");
        assert_eq!((s.c2.start, s.c2.end), (7, 8));
        assert_eq!(s.c2.surface, "Radu");
        assert_eq!((s.pronoun.start, s.pronoun.surface.as_str()), (10, "he"));
        assert_eq!(switch_antecedents(&s).unwrap(), x);
    }

    #[test]
    fn possessive_occurrences_follow() {
        let x = instance("Alex met Paulo, but he took Alex's car.", (0, 1), (2, 3), 5);
        let s = switch_antecedents(&x).unwrap();
        assert_eq!(s.text, "Paulo met Alex, but he took Paulo's car.");
    }

    #[test]
    fn degenerate_candidates() {
        let x = instance("Alex met Alex, but he left early.", (0, 1), (2, 3), 5);
        assert!(matches!(switch_antecedents(&x), Err(Error::IdenticalCandidates(_))));
        let (out, skipped) = augment_corpus(vec![x]);
        assert_eq!(out.len(), 1);
        assert_eq!(skipped[0].reason, "IdenticalCandidates");

        let y = instance("Paulo met Brother Paulo, but he left.", (0, 1), (2, 4), 6);
        assert!(matches!(switch_antecedents(&y), Err(Error::OverlappingOccurrences(_))));
    }

    #[test]
    fn augment_doubles() {
        let x = instance("Alex tells Paulo, but he does not believe him.", (0, 1), (2, 3), 5);
        let (out, skipped) = augment_corpus(vec![x]);
        assert!(skipped.is_empty());
        assert_eq!(out.len(), 2);
        assert_eq!(out[1].derived_from.as_deref(), Some("ex"));
    }
}
