//! Resolver baselines and candidate-substitution scoring.

mod external;
mod ngram;

pub use external::ExternalPredictions;
pub use ngram::{NGramModel, BOS, EOS};

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::labeling::{infer_gender_tokens, InferredGender};
use crate::lexicon::{Gender, GenderLexicon};
use crate::model::{AntecedentId, Choice, MentionSpan, Prediction, ProblemInstance};
use crate::resources::{is_honorific, stopwords};
use crate::text::{instance_seed, is_word, strip_possessive};

pub const DEFAULT_ORDER: usize = 3;
pub const DEFAULT_K: f64 = 0.1;

/// True when the target pronoun is used as a possessive. "her" counts as
/// possessive when a content word follows it ("her lead", not "her.").
pub fn is_possessive_pronoun(tokens: &[String], index: usize) -> bool {
    match tokens[index].to_lowercase().as_str() {
        "his" | "hers" => true,
        "her" => tokens.get(index + 1).is_some_and(|next| {
            is_word(next) && !stopwords().contains(&next.to_lowercase())
        }),
        _ => false,
    }
}

/// The sentence with the pronoun replaced by one candidate's surface.
pub fn substitute_candidate(instance: &ProblemInstance, which: AntecedentId) -> Vec<String> {
    let candidate = instance.candidate(which);
    let p = instance.pronoun.start;
    let mut replacement: Vec<String> = instance.tokens[candidate.start..candidate.end].to_vec();
    if let Some(last) = replacement.last_mut() {
        let stem = strip_possessive(last).to_string();
        *last = if is_possessive_pronoun(&instance.tokens, p) {
            format!("{stem}'s")
        } else {
            stem
        };
    }
    let mut out = Vec::with_capacity(instance.tokens.len() + replacement.len());
    out.extend_from_slice(&instance.tokens[..p]);
    out.extend(replacement);
    out.extend_from_slice(&instance.tokens[instance.pronoun.end..]);
    out
}

/// Two-way softmax, shifted by the larger score so large inputs never
/// overflow.
pub fn binary_softmax(s1: f64, s2: f64) -> (f64, f64) {
    let m = s1.max(s2);
    let e1 = (s1 - m).exp();
    let e2 = (s2 - m).exp();
    let p1 = e1 / (e1 + e2);
    (p1, 1.0 - p1)
}

#[derive(Debug, Clone)]
pub enum ResolverHandle {
    Random { seed: u64 },
    AlwaysFirst,
    AlwaysSecond,
    GenderRule(Arc<GenderLexicon>),
    NGramSubstitution(Arc<NGramModel>),
    External(Arc<ExternalPredictions>),
}

fn given_name<'a>(tokens: &'a [String], span: &MentionSpan) -> Option<&'a str> {
    tokens[span.start..span.end]
        .iter()
        .find(|t| !is_honorific(t))
        .map(|t| strip_possessive(t))
}

impl ResolverHandle {
    pub fn name(&self) -> &'static str {
        match self {
            ResolverHandle::Random { .. } => "random",
            ResolverHandle::AlwaysFirst => "always-first",
            ResolverHandle::AlwaysSecond => "always-second",
            ResolverHandle::GenderRule(_) => "gender-rule",
            ResolverHandle::NGramSubstitution(_) => "ngram",
            ResolverHandle::External(_) => "external",
        }
    }

    pub fn resolve(&self, instance: &ProblemInstance) -> Result<Prediction> {
        let id = instance.id.clone();
        Ok(match self {
            ResolverHandle::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(instance_seed(*seed, &instance.id));
                let choice = if rng.random_bool(0.5) {
                    Choice::First
                } else {
                    Choice::Second
                };
                Prediction::new(id, choice)
            }
            ResolverHandle::AlwaysFirst => Prediction::new(id, Choice::First),
            ResolverHandle::AlwaysSecond => Prediction::new(id, Choice::Second),
            ResolverHandle::GenderRule(lexicon) => Prediction::new(id, gender_rule(instance, lexicon)),
            ResolverHandle::NGramSubstitution(model) => {
                let s1 = model.score(&substitute_candidate(instance, AntecedentId::First));
                let s2 = model.score(&substitute_candidate(instance, AntecedentId::Second));
                let (p1, p2) = binary_softmax(s1, s2);
                let choice = if p1 >= p2 { Choice::First } else { Choice::Second };
                Prediction {
                    instance_id: id,
                    choice,
                    score_first: Some(p1),
                }
            }
            ResolverHandle::External(preds) => preds
                .get(&instance.id)
                .cloned()
                .ok_or(Error::MissingPrediction(id))?,
        })
    }
}

/// Gender agreement first; when gender cannot separate the candidates, the
/// more frequent first name wins. Keys entirely on names, never on context.
fn gender_rule(instance: &ProblemInstance, lexicon: &GenderLexicon) -> Choice {
    let target: InferredGender = Gender::of_pronoun(instance.pronoun_gender).into();
    let tokens = &instance.tokens;
    let g1 = infer_gender_tokens(&tokens[instance.c1.start..instance.c1.end], lexicon);
    let g2 = infer_gender_tokens(&tokens[instance.c2.start..instance.c2.end], lexicon);
    match (g1 == target, g2 == target) {
        (true, false) => return Choice::First,
        (false, true) => return Choice::Second,
        _ => {}
    }
    let freq = |span| given_name(tokens, span).and_then(|n| lexicon.frequency(n));
    match (freq(&instance.c1), freq(&instance.c2)) {
        (Some(f1), Some(f2)) if f1 > f2 => Choice::First,
        (Some(f1), Some(f2)) if f2 > f1 => Choice::Second,
        _ => Choice::None,
    }
}
