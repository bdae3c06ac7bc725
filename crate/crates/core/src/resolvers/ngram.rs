//! Add-k smoothed n-gram language model used to score substituted sentences.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use crate::binio;
use crate::error::{Error, Result};

const MAGIC: &[u8; 8] = b"KRNGRAM\0";
const VERSION: u32 = 1;
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    order: usize,
    k: f64,
    counts: HashMap<Vec<String>, u64>,
    contexts: HashMap<Vec<String>, u64>,
    vocab: HashSet<String>,
}

fn normalize(token: &str) -> String {
    token.to_lowercase()
}

/// `n - 1` begin markers, the lowercased tokens, and one end marker when
/// `n > 1`.
fn pad<S: AsRef<str>>(tokens: &[S], order: usize) -> Vec<String> {
    let mut out: Vec<String> = std::iter::repeat_n(BOS.to_string(), order - 1).collect();
    out.extend(tokens.iter().map(|t| normalize(t.as_ref())));
    if order > 1 {
        out.push(EOS.to_string());
    }
    out
}

impl NGramModel {
    pub fn train<S: AsRef<str>>(sentences: &[Vec<S>], order: usize, k: f64) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidConfig("n-gram order must be at least 1".into()));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidConfig(format!("smoothing k must be positive, got {k}")));
        }
        let mut counts: HashMap<Vec<String>, u64> = HashMap::new();
        let mut vocab = HashSet::new();
        for sentence in sentences {
            let padded = pad(sentence, order);
            for i in order - 1..padded.len() {
                vocab.insert(padded[i].clone());
                *counts.entry(padded[i + 1 - order..=i].to_vec()).or_default() += 1;
            }
        }
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        Ok(Self::assemble(order, k, counts, vocab))
    }

    fn assemble(
        order: usize,
        k: f64,
        counts: HashMap<Vec<String>, u64>,
        vocab: HashSet<String>,
    ) -> Self {
        let mut contexts: HashMap<Vec<String>, u64> = HashMap::new();
        for (gram, c) in &counts {
            *contexts.entry(gram[..order - 1].to_vec()).or_default() += c;
        }
        Self {
            order,
            k,
            counts,
            contexts,
            vocab,
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    /// Number of distinct predicted types, including the end marker.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len()
    }

    pub fn count<S: AsRef<str>>(&self, gram: &[S]) -> u64 {
        let key: Vec<String> = gram.iter().map(|t| t.as_ref().to_string()).collect();
        self.counts.get(&key).copied().unwrap_or(0)
    }

    pub fn context_count<S: AsRef<str>>(&self, context: &[S]) -> u64 {
        let key: Vec<String> = context.iter().map(|t| t.as_ref().to_string()).collect();
        self.contexts.get(&key).copied().unwrap_or(0)
    }

    /// Natural-log probability of the padded sentence.
    pub fn score<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let padded = pad(tokens, self.order);
        let kv = self.k * self.vocab.len() as f64;
        let n = self.order;
        (n - 1..padded.len())
            .map(|i| {
                let gram = &padded[i + 1 - n..=i];
                let c = self.counts.get(gram).copied().unwrap_or(0) as f64;
                let h = self.contexts.get(&gram[..n - 1]).copied().unwrap_or(0) as f64;
                ((c + self.k) / (h + kv)).ln()
            })
            .sum()
    }

    /// Entries in sorted order so that equal models serialize identically.
    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let mut buf = Vec::new();
        self.write_to(&mut buf)?;
        Ok(buf)
    }

    pub fn write_to<W: Write>(&self, w: &mut W) -> Result<()> {
        binio::write_header(w, MAGIC, VERSION)?;
        binio::write_u32(w, self.order as u32)?;
        binio::write_f64(w, self.k)?;
        let mut vocab: Vec<&String> = self.vocab.iter().collect();
        vocab.sort();
        binio::write_len(w, vocab.len())?;
        for v in vocab {
            binio::write_str(w, v)?;
        }
        let sorted: BTreeMap<&Vec<String>, u64> = self.counts.iter().map(|(g, c)| (g, *c)).collect();
        binio::write_len(w, sorted.len())?;
        for (gram, c) in sorted {
            for t in gram {
                binio::write_str(w, t)?;
            }
            binio::write_u64(w, c)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(r: &mut R) -> Result<Self> {
        let version = binio::read_header(r, MAGIC)?;
        if version != VERSION {
            return Err(Error::Model(format!("unsupported n-gram model version {version}")));
        }
        let order = binio::read_u32(r)? as usize;
        let k = binio::read_f64(r)?;
        if order == 0 || !(k > 0.0 && k.is_finite()) {
            return Err(Error::Model(format!("invalid order {order} or k {k}")));
        }
        let mut vocab = HashSet::new();
        for _ in 0..binio::read_len(r)? {
            vocab.insert(binio::read_str(r)?);
        }
        let mut counts = HashMap::new();
        for _ in 0..binio::read_len(r)? {
            let gram = (0..order)
                .map(|_| binio::read_str(r))
                .collect::<Result<Vec<_>>>()?;
            counts.insert(gram, binio::read_u64(r)?);
        }
        Ok(Self::assemble(order, k, counts, vocab))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_bytes()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path)?;
        Self::read_from(&mut bytes.as_slice())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sents(data: &[&str]) -> Vec<Vec<String>> {
        data.iter()
            .map(|s| s.split_whitespace().map(String::from).collect())
            .collect()
    }

    #[test]
    fn unigram_hand_arithmetic() {
        let m = NGramModel::train(&sents(&["a"]), 1, 1.0).unwrap();
        assert_eq!(m.vocab_size(), 1);
        assert_eq!(m.score(&["a"]), 0.0);
    }

    #[test]
    fn trigram_counts_and_padding() {
        let m = NGramModel::train(&sents(&["a b", "a c"]), 3, 0.5).unwrap();
        assert_eq!(m.count(&[BOS, BOS, "a"]), 2);
        assert_eq!(m.context_count(&[BOS, "a"]), 2);
        assert_eq!(m.count(&[BOS, "a", "b"]), 1);
        assert_eq!(m.count(&["a", "b", EOS]), 1);
        // a, b, c, </s>
        assert_eq!(m.vocab_size(), 4);
        // P(a|<s><s>) = 2.5/4, P(b|<s>a) = 1.5/4, P(</s>|a b) = 1.5/3
        let expected = (2.5f64 / 4.0).ln() + (1.5f64 / 4.0).ln() + (1.5f64 / 3.0).ln();
        assert!((m.score(&["a", "b"]) - expected).abs() < 1e-12);
    }

    #[test]
    fn unseen_tokens_stay_finite() {
        let m = NGramModel::train(&sents(&["a b c"]), 3, 0.1).unwrap();
        assert!(m.score(&["zz", "yy"]).is_finite());
        assert!(m.score::<&str>(&[]).is_finite());
    }

    #[test]
    fn bad_config() {
        assert!(NGramModel::train(&sents(&["a"]), 0, 1.0).is_err());
        assert!(NGramModel::train(&sents(&["a"]), 2, 0.0).is_err());
        assert!(matches!(
            NGramModel::train::<String>(&[], 2, 1.0),
            Err(Error::EmptyCorpus)
        ));
    }

    #[test]
    fn bytes_round_trip() {
        let m = NGramModel::train(&sents(&["the cat sat", "the dog ran"]), 3, 0.1).unwrap();
        let bytes = m.to_bytes().unwrap();
        assert_eq!(NGramModel::read_from(&mut bytes.as_slice()).unwrap(), m);
        let again = NGramModel::train(&sents(&["the cat sat", "the dog ran"]), 3, 0.1).unwrap();
        assert_eq!(again.to_bytes().unwrap(), bytes);
        assert!(NGramModel::read_from(&mut &bytes[..10]).is_err());
    }
}
