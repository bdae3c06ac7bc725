//! Inputs shared by the benchmarks.

use knowref_core::text::tokenize;
use knowref_core::{MentionSpan, ProblemInstance, PronounGender, SentenceRecord};

const FIRST: &[&str] = &["James", "Mary", "Robert", "Linda", "Daniel", "Sarah", "Peter", "Helen"];
const SECOND: &[&str] = &["Jessica", "Michael", "Laura", "Kevin", "Susan", "George", "Anna", "David"];

/// `n` mineable sentences built from a fixed template.
pub fn sentences(n: usize) -> Vec<SentenceRecord> {
    (0..n)
        .map(|i| {
            let a = FIRST[i % FIRST.len()];
            let b = SECOND[(i / FIRST.len()) % SECOND.len()];
            SentenceRecord::new(
                i.to_string(),
                format!("{a} thanked {b} warmly, but she had already left for the airport."),
                "bench",
            )
        })
        .collect()
}

/// `n` two-candidate instances: "<A> thanked <B> warmly, but he ...".
pub fn instances(n: usize) -> Vec<ProblemInstance> {
    (0..n)
        .map(|i| {
            let a = FIRST[i % FIRST.len()];
            let b = SECOND[(i / FIRST.len()) % SECOND.len()];
            let text = format!("{a} thanked {b} warmly, but he had already left for the airport.");
            let tokens = tokenize(&text);
            ProblemInstance {
                id: format!("b{i}"),
                c1: MentionSpan::from_tokens(&tokens, 0, 1),
                c2: MentionSpan::from_tokens(&tokens, 2, 3),
                connective: Some(MentionSpan::from_tokens(&tokens, 5, 6)),
                pronoun: MentionSpan::from_tokens(&tokens, 6, 7),
                text,
                tokens,
                label: None,
                pronoun_gender: PronounGender::Masculine,
                source: "bench".into(),
                derived_from: None,
                switched: false,
            }
        })
        .collect()
}
