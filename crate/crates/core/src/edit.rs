//! Token-range rewrites that keep text, tokens and spans in step.

use crate::model::{MentionSpan, ProblemInstance};
use crate::text::{detokenize, tokenize_with_offsets};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct Edit {
    pub start: usize,
    pub end: usize,
    pub replacement: Vec<String>,
}

/// Applies non-overlapping edits to an instance. Text outside the edited
/// tokens is preserved byte for byte when the text re-tokenizes to the
/// instance's tokens; otherwise it is rebuilt from the tokens.
pub(crate) fn apply(instance: &mut ProblemInstance, edits: &[Edit]) {
    let mut edits = edits.to_vec();
    edits.sort_by_key(|e| e.start);
    debug_assert!(edits.windows(2).all(|w| w[0].end <= w[1].start));

    let offsets: Option<Vec<_>> = {
        let toks = tokenize_with_offsets(&instance.text);
        (toks.len() == instance.tokens.len()
            && toks.iter().zip(&instance.tokens).all(|(a, b)| &a.text == b))
        .then(|| toks.into_iter().map(|t| t.range).collect())
    };

    let mut tokens = Vec::with_capacity(instance.tokens.len());
    let mut next = 0;
    for e in &edits {
        tokens.extend_from_slice(&instance.tokens[next..e.start]);
        tokens.extend(e.replacement.iter().cloned());
        next = e.end;
    }
    tokens.extend_from_slice(&instance.tokens[next..]);

    let text = match offsets {
        Some(offsets) => {
            let mut text = instance.text.clone();
            for e in edits.iter().rev() {
                let range = offsets[e.start].start..offsets[e.end - 1].end;
                text.replace_range(range, &e.replacement.join(" "));
            }
            text
        }
        None => detokenize(&tokens),
    };

    let remap = |span: &MentionSpan| -> MentionSpan {
        let mut shift: isize = 0;
        for e in &edits {
            let delta = e.replacement.len() as isize - (e.end - e.start) as isize;
            if e.start == span.start && e.end == span.end {
                let start = (span.start as isize + shift) as usize;
                return MentionSpan::from_tokens(&tokens, start, start + e.replacement.len());
            }
            if e.end <= span.start {
                shift += delta;
            }
        }
        let start = (span.start as isize + shift) as usize;
        MentionSpan::from_tokens(&tokens, start, start + span.len())
    };

    instance.c1 = remap(&instance.c1);
    instance.c2 = remap(&instance.c2);
    instance.pronoun = remap(&instance.pronoun);
    instance.connective = instance.connective.as_ref().map(remap);
    instance.tokens = tokens;
    instance.text = text;
}
