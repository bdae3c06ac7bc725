use serde::{Deserialize, Serialize};

use crate::model::MentionSpan;
use crate::resources::is_honorific;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChunkKind {
    /// `(honorific)? NNP+`
    ProperNP,
    /// `DT? JJ* (NN|NNS)+`
    CommonNP,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chunk {
    pub span: MentionSpan,
    pub kind: ChunkKind,
    /// Index of the head token (always the last token of the chunk).
    pub head: usize,
}

impl Chunk {
    pub fn head_token<'a>(&self, tokens: &'a [String]) -> &'a str {
        &tokens[self.head]
    }

    pub fn has_honorific(&self, tokens: &[String]) -> bool {
        tokens[self.span.start..self.span.end]
            .iter()
            .any(|t| is_honorific(t))
    }
}

fn is_proper(tag: &str) -> bool {
    tag == "NNP" || tag == "NNPS"
}

fn is_common(tag: &str) -> bool {
    tag == "NN" || tag == "NNS"
}

fn is_adj(tag: &str) -> bool {
    matches!(tag, "JJ" | "JJR" | "JJS")
}

/// Greedy left-to-right maximal NP chunks over a flat POS sequence.
pub fn chunk_nps<S: AsRef<str>, T: AsRef<str>>(tokens: &[S], tags: &[T]) -> Vec<Chunk> {
    assert_eq!(tokens.len(), tags.len(), "tags must be parallel to tokens");
    let tokens: Vec<&str> = tokens.iter().map(AsRef::as_ref).collect();
    let tags: Vec<&str> = tags.iter().map(AsRef::as_ref).collect();
    let n = tokens.len();
    let run = |mut j: usize, pred: fn(&str) -> bool| {
        while j < n && pred(tags[j]) {
            j += 1;
        }
        j
    };

    let mut chunks = Vec::new();
    let mut i = 0;
    while i < n {
        // Proper: an optional honorific (whatever its tag) then NNP+.
        let proper_from = if is_honorific(tokens[i]) && i + 1 < n && is_proper(tags[i + 1]) {
            Some(i + 1)
        } else if is_proper(tags[i]) {
            Some(i)
        } else {
            None
        };
        if let Some(from) = proper_from {
            let end = run(from, is_proper);
            chunks.push(make(&tokens, i, end, ChunkKind::ProperNP));
            i = end;
            continue;
        }

        let mut j = i;
        if tags[j] == "DT" {
            j += 1;
        }
        j = run(j, is_adj);
        let end = run(j, is_common);
        if end > j {
            chunks.push(make(&tokens, i, end, ChunkKind::CommonNP));
            i = end;
        } else {
            i += 1;
        }
    }
    chunks
}

fn make(tokens: &[&str], start: usize, end: usize, kind: ChunkKind) -> Chunk {
    Chunk {
        span: MentionSpan::from_tokens(tokens, start, end),
        kind,
        head: end - 1,
    }
}
