//! Gender-based label inference and removal of the gender giveaway.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::edit::{self, Edit};
use crate::error::{Error, Result};
use crate::lexicon::{Gender, GenderLexicon};
use crate::model::{AntecedentId, MentionSpan, ProblemInstance};
use crate::resources::{honorific, is_honorific};
use crate::tagging::Chunk;
use crate::text::{instance_seed, strip_possessive};

/// Source suffix marking a label produced by the gender heuristic.
pub const HEURISTIC_SUFFIX: &str = ":heuristic";
/// Source suffix marking a label produced by human annotation.
pub const ANNOTATED_SUFFIX: &str = ":annotated";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum InferredGender {
    Female,
    Male,
    Ambiguous,
    Unknown,
}

impl From<Gender> for InferredGender {
    fn from(g: Gender) -> Self {
        match g {
            Gender::Female => InferredGender::Female,
            Gender::Male => InferredGender::Male,
            Gender::Ambiguous => InferredGender::Ambiguous,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AbstainReason {
    SameGender,
    AmbiguousGender,
    UnknownName,
}

impl fmt::Display for AbstainReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LabelDecision {
    Label(AntecedentId),
    Abstain(AbstainReason),
}

/// Gender of a mention given its tokens. A gendered honorific decides;
/// otherwise the first non-honorific token is looked up.
pub fn infer_gender_tokens<S: AsRef<str>>(tokens: &[S], lexicon: &GenderLexicon) -> InferredGender {
    for t in tokens {
        if let Some(gender) = honorific(t.as_ref()).and_then(|h| h.gender) {
            return gender.into();
        }
    }
    tokens
        .iter()
        .map(AsRef::as_ref)
        .find(|t| !is_honorific(t))
        .and_then(|t| lexicon.gender(strip_possessive(t)))
        .map_or(InferredGender::Unknown, Into::into)
}

pub fn infer_gender(chunk: &Chunk, tokens: &[String], lexicon: &GenderLexicon) -> InferredGender {
    infer_gender_tokens(&tokens[chunk.span.start..chunk.span.end], lexicon)
}

fn span_gender(instance: &ProblemInstance, span: &MentionSpan, lexicon: &GenderLexicon) -> InferredGender {
    infer_gender_tokens(&instance.tokens[span.start..span.end], lexicon)
}

/// Labels the candidate whose gender matches the pronoun, provided the two
/// candidates are known, unambiguous and of different genders.
pub fn infer_label(instance: &ProblemInstance, lexicon: &GenderLexicon) -> LabelDecision {
    let g1 = span_gender(instance, &instance.c1, lexicon);
    let g2 = span_gender(instance, &instance.c2, lexicon);
    use InferredGender::*;
    if g1 == Unknown || g2 == Unknown {
        return LabelDecision::Abstain(AbstainReason::UnknownName);
    }
    if g1 == Ambiguous || g2 == Ambiguous {
        return LabelDecision::Abstain(AbstainReason::AmbiguousGender);
    }
    if g1 == g2 {
        return LabelDecision::Abstain(AbstainReason::SameGender);
    }
    let target: InferredGender = Gender::of_pronoun(instance.pronoun_gender).into();
    if g1 == target {
        LabelDecision::Label(AntecedentId::First)
    } else {
        LabelDecision::Label(AntecedentId::Second)
    }
}

fn capitalize(word: &str) -> String {
    let mut chars = word.chars();
    match chars.next() {
        Some(c) => c.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Replacement tokens for a candidate: gendered honorifics become their
/// counterpart, the given name becomes `name`, everything else stays.
fn replacement_tokens(tokens: &[String], name: &str) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len());
    let mut replaced = false;
    for t in tokens {
        match honorific(t) {
            Some(h) if h.gender.is_some() => {
                if let Some(counterpart) = &h.counterpart {
                    let period = if t.ends_with('.') { "." } else { "" };
                    out.push(format!("{}{period}", capitalize(counterpart)));
                }
            }
            Some(_) => out.push(t.clone()),
            None if !replaced => {
                let suffix = &t[strip_possessive(t).len()..];
                out.push(format!("{name}{suffix}"));
                replaced = true;
            }
            None => out.push(t.clone()),
        }
    }
    if !replaced {
        out.push(name.to_string());
    }
    out
}

/// Replaces the candidate whose gender mismatches the pronoun with a
/// seeded draw of a name of the pronoun's gender. Instances that are not
/// labelable by [`infer_label`] come back unchanged.
pub fn neutralize_gender(
    instance: &ProblemInstance,
    lexicon: &GenderLexicon,
    seed: u64,
) -> Result<ProblemInstance> {
    let LabelDecision::Label(answer) = infer_label(instance, lexicon) else {
        return Ok(instance.clone());
    };
    let target = Gender::of_pronoun(instance.pronoun_gender);
    let span = instance.candidate(answer.other()).clone();
    let taken: Vec<String> = instance
        .tokens
        .iter()
        .map(|t| strip_possessive(t).to_lowercase())
        .collect();
    let pool: Vec<&str> = lexicon
        .names_of(target)
        .into_iter()
        .filter(|n| !n.contains(' ') && !taken.contains(&n.to_lowercase()))
        .collect();
    if pool.is_empty() {
        return Err(Error::NoReplacementAvailable(format!("{target:?}").to_lowercase()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(seed, &instance.id));
    let name = pool[rng.random_range(0..pool.len())];

    let mut out = instance.clone();
    let replacement = replacement_tokens(&instance.tokens[span.start..span.end], name);
    edit::apply(
        &mut out,
        &[Edit {
            start: span.start,
            end: span.end,
            replacement,
        }],
    );
    out.validate()?;
    Ok(out)
}

// Short-lived per instance, so the unboxed variant is fine.
#[allow(clippy::large_enum_variant)]
#[derive(Debug, Clone, PartialEq)]
pub enum LabelOutcome {
    Labeled(ProblemInstance),
    Abstained { id: String, reason: AbstainReason },
}

/// The labeling pass for one mined instance: infer the label, mark its
/// provenance, and optionally neutralize. Neutralized output is checked to
/// have lost its giveaway.
pub fn label_instance(
    instance: &ProblemInstance,
    lexicon: &GenderLexicon,
    neutralize: bool,
    seed: u64,
) -> Result<LabelOutcome> {
    let answer = match infer_label(instance, lexicon) {
        LabelDecision::Label(a) => a,
        LabelDecision::Abstain(reason) => {
            return Ok(LabelOutcome::Abstained {
                id: instance.id.clone(),
                reason,
            })
        }
    };
    let mut labeled = instance.clone();
    labeled.label = Some(answer);
    if !labeled.source.ends_with(HEURISTIC_SUFFIX) {
        labeled.source.push_str(HEURISTIC_SUFFIX);
    }
    if neutralize {
        labeled = neutralize_gender(&labeled, lexicon, seed)?;
        let after = infer_label(&labeled, lexicon);
        if after != LabelDecision::Abstain(AbstainReason::SameGender) {
            return Err(Error::InvariantViolation {
                id: labeled.id.clone(),
                reason: format!("gender giveaway survived neutralization: {after:?}"),
            });
        }
    }
    Ok(LabelOutcome::Labeled(labeled))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PronounGender;
    use crate::text::tokenize;

    fn instance(text: &str, c1: (usize, usize), c2: (usize, usize), p: usize) -> ProblemInstance {
        let tokens = tokenize(text);
        ProblemInstance {
            id: "x".into(),
            text: text.into(),
            c1: MentionSpan::from_tokens(&tokens, c1.0, c1.1),
            c2: MentionSpan::from_tokens(&tokens, c2.0, c2.1),
            pronoun: MentionSpan::from_tokens(&tokens, p, p + 1),
            connective: None,
            pronoun_gender: PronounGender::of(&tokens[p]).unwrap(),
            tokens,
            label: None,
            source: "test".into(),
            derived_from: None,
            switched: false,
        }
    }

    #[test]
    fn gender_lookup() {
        let lex = GenderLexicon::bundled();
        assert_eq!(infer_gender_tokens(&["Jessica"], &lex), InferredGender::Female);
        assert_eq!(infer_gender_tokens(&["Sister", "Paula"], &lex), InferredGender::Female);
        assert_eq!(infer_gender_tokens(&["Sister", "Zzyzx"], &lex), InferredGender::Female);
        assert_eq!(infer_gender_tokens(&["Zzyzx"], &lex), InferredGender::Unknown);
        assert_eq!(infer_gender_tokens(&["Dr.", "James"], &lex), InferredGender::Male);
    }

    #[test]
    fn label_examples() {
        let lex = GenderLexicon::bundled();
        let i = instance("James met Jessica , but she left .", (0, 1), (2, 3), 5);
        assert_eq!(infer_label(&i, &lex), LabelDecision::Label(AntecedentId::Second));
        let i = instance("Wanda met Rose , but she left .", (0, 1), (2, 3), 5);
        assert_eq!(infer_label(&i, &lex), LabelDecision::Abstain(AbstainReason::SameGender));
        let i = instance("Alex met Rose , but she left .", (0, 1), (2, 3), 5);
        assert_eq!(
            infer_label(&i, &lex),
            LabelDecision::Abstain(AbstainReason::AmbiguousGender)
        );
        let i = instance("Zzyzx met Rose , but she left .", (0, 1), (2, 3), 5);
        assert_eq!(infer_label(&i, &lex), LabelDecision::Abstain(AbstainReason::UnknownName));
    }

    #[test]
    fn neutralizes_with_honorific_counterpart() {
        let lex = GenderLexicon::bundled();
        let text = "Radu appeared to be killed by Sister Paula, but he reappears a short while later injured, but alive.";
        let i = instance(text, (0, 1), (6, 8), 10);
        let out = neutralize_gender(&i, &lex, 7).unwrap();
        assert_eq!(out.tokens[6], "Brother");
        assert_eq!(out.c2.len(), 2);
        assert_eq!(lex.gender(&out.tokens[7]), Some(Gender::Male));
        assert_eq!(out.pronoun.surface, "he");
        assert!(out.text.starts_with("Radu appeared to be killed by Brother "));
        assert!(out.text.ends_with(", but he reappears a short while later injured, but alive."));
        assert_eq!(infer_label(&out, &lex), LabelDecision::Abstain(AbstainReason::SameGender));
        // Same seed, same draw.
        assert_eq!(neutralize_gender(&i, &lex, 7).unwrap(), out);
    }

    #[test]
    fn uniform_instance_is_untouched() {
        let lex = GenderLexicon::bundled();
        let i = instance("Wanda met Rose , but she left .", (0, 1), (2, 3), 5);
        assert_eq!(neutralize_gender(&i, &lex, 1).unwrap(), i);
    }

    #[test]
    fn empty_pool_errors() {
        let lex = GenderLexicon::from_tsv("James\tM\nJessica\tF\n").unwrap();
        let i = instance("James met Jessica , but she left .", (0, 1), (2, 3), 5);
        assert!(matches!(
            neutralize_gender(&i, &lex, 0),
            Err(Error::NoReplacementAvailable(_))
        ));
    }

    #[test]
    fn label_pass_marks_provenance() {
        let lex = GenderLexicon::bundled();
        let i = instance("James met Jessica , but she left .", (0, 1), (2, 3), 5);
        let LabelOutcome::Labeled(out) = label_instance(&i, &lex, true, 3).unwrap() else {
            panic!("expected a label");
        };
        assert_eq!(out.label, Some(AntecedentId::Second));
        assert_eq!(out.source, "test:heuristic");
        assert_eq!(out.c2.surface, "Jessica");
        assert_ne!(out.c1.surface, "James");
    }
}
