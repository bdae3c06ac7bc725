//! Averaged perceptron tagger, after Honnibal's greedy left-to-right design.

use std::collections::{BTreeMap, HashMap};
use std::io::{Read, Write};
use std::sync::{Arc, LazyLock};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{closed_class_tags, parse_pretagged_line, TagSet};
use crate::binio;
use crate::error::{Error, Result};
use crate::resources;

const MAGIC: &[u8; 8] = b"KRTAGGER";
const VERSION: u32 = 1;
const START: [&str; 2] = ["-START-", "-START2-"];
const END: [&str; 2] = ["-END-", "-END2-"];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub seed: u64,
    /// Words seen at least this often with one dominant tag skip the model.
    pub tagdict_min_count: usize,
    pub tagdict_min_ratio: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 5,
            seed: 0,
            tagdict_min_count: 3,
            tagdict_min_ratio: 0.97,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Param {
    weight: f64,
    total: f64,
    stamp: u64,
}

/// Training-time weights with the bookkeeping needed for averaging.
#[derive(Default)]
struct Trainer {
    params: HashMap<String, HashMap<u16, Param>>,
    instances: u64,
}

impl Trainer {
    fn scores(&self, features: &[String], n_classes: usize) -> Vec<f64> {
        let mut scores = vec![0.0; n_classes];
        for f in features {
            if let Some(ws) = self.params.get(f) {
                for (&c, p) in ws {
                    scores[c as usize] += p.weight;
                }
            }
        }
        scores
    }

    fn update(&mut self, truth: u16, guess: u16, features: &[String]) {
        self.instances += 1;
        if truth == guess {
            return;
        }
        let now = self.instances;
        for f in features {
            let ws = self.params.entry(f.clone()).or_default();
            for (class, delta) in [(truth, 1.0), (guess, -1.0)] {
                let p = ws.entry(class).or_default();
                p.total += (now - p.stamp) as f64 * p.weight;
                p.stamp = now;
                p.weight += delta;
            }
        }
    }

    fn averaged(self) -> HashMap<String, Vec<(u16, f64)>> {
        let now = self.instances.max(1);
        self.params
            .into_iter()
            .filter_map(|(f, ws)| {
                let mut avg: Vec<(u16, f64)> = ws
                    .into_iter()
                    .filter_map(|(c, p)| {
                        let total = p.total + (now - p.stamp) as f64 * p.weight;
                        let w = total / now as f64;
                        (w != 0.0).then_some((c, w))
                    })
                    .collect();
                avg.sort_by_key(|(c, _)| *c);
                (!avg.is_empty()).then_some((f, avg))
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronTagger {
    tagset: TagSet,
    classes: Vec<String>,
    tagdict: HashMap<String, u16>,
    weights: HashMap<String, Vec<(u16, f64)>>,
}

static BUNDLED: LazyLock<Arc<PerceptronTagger>> = LazyLock::new(|| {
    let corpus = parse_tagged_corpus(resources::TAGGED_TRAINING).expect("bundled corpus parses");
    Arc::new(
        PerceptronTagger::train(&corpus, &TrainConfig::default()).expect("bundled corpus is non-empty"),
    )
});

/// Reads `word_TAG` lines into (tokens, tags) pairs, skipping `#` comments.
pub fn parse_tagged_corpus(data: &str) -> Result<Vec<(Vec<String>, Vec<String>)>> {
    data.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| {
            parse_pretagged_line(l).map_err(|message| Error::Parse {
                offset: n,
                message: format!("line {}: {message}", n + 1),
            })
        })
        .collect()
}

fn normalize(word: &str) -> String {
    if word.contains('-') && !word.starts_with('-') {
        "!HYPHEN".into()
    } else if word.len() == 4 && word.chars().all(|c| c.is_ascii_digit()) {
        "!YEAR".into()
    } else if word.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        "!DIGITS".into()
    } else {
        word.to_lowercase()
    }
}

fn suffix(word: &str, n: usize) -> &str {
    let start = word
        .char_indices()
        .rev()
        .nth(n.saturating_sub(1))
        .map(|(i, _)| i)
        .unwrap_or(0);
    &word[start..]
}

fn features(i: usize, raw: &str, context: &[String], prev: &str, prev2: &str) -> Vec<String> {
    // `i` indexes `context`, which carries two padding items on each side.
    let word = &context[i];
    let first_char = word.chars().next().unwrap_or(' ');
    let title = raw.chars().next().is_some_and(char::is_uppercase);
    let mut f = vec![
        "bias".to_string(),
        format!("i suffix {}", suffix(word, 3)),
        format!("i pref1 {first_char}"),
        format!("i-1 tag {prev}"),
        format!("i-2 tag {prev2}"),
        format!("i tag+i-2 tag {prev} {prev2}"),
        format!("i word {word}"),
        format!("i-1 tag+i word {prev} {word}"),
        format!("i-1 word {}", context[i - 1]),
        format!("i-1 suffix {}", suffix(&context[i - 1], 3)),
        format!("i-2 word {}", context[i - 2]),
        format!("i+1 word {}", context[i + 1]),
        format!("i+1 suffix {}", suffix(&context[i + 1], 3)),
        format!("i+2 word {}", context[i + 2]),
        format!("i title {title}"),
    ];
    if title && i == 2 {
        f.push("i sentence-initial title".into());
    }
    if title && raw.len() > 1 && raw.chars().all(|c| c.is_uppercase()) {
        f.push("i allcaps".into());
    }
    f
}

fn context_for(tokens: &[String]) -> Vec<String> {
    START
        .iter()
        .map(|s| s.to_string())
        .chain(tokens.iter().map(|t| normalize(t)))
        .chain(END.iter().map(|s| s.to_string()))
        .collect()
}

impl PerceptronTagger {
    pub fn bundled() -> Arc<PerceptronTagger> {
        BUNDLED.clone()
    }

    /// Trains deterministically: sentence order is shuffled each epoch by a
    /// ChaCha stream seeded from `config.seed`.
    pub fn train(corpus: &[(Vec<String>, Vec<String>)], config: &TrainConfig) -> Result<Self> {
        if corpus.is_empty() || corpus.iter().all(|(t, _)| t.is_empty()) {
            return Err(Error::EmptyTrainingData);
        }
        if config.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be at least 1".into()));
        }
        for (tokens, tags) in corpus {
            if tokens.len() != tags.len() {
                return Err(Error::InvalidConfig(format!(
                    "sentence `{}` has {} tokens and {} tags",
                    tokens.join(" "),
                    tokens.len(),
                    tags.len()
                )));
            }
        }

        let mut class_set: std::collections::BTreeSet<String> =
            corpus.iter().flat_map(|(_, tags)| tags.iter().cloned()).collect();
        class_set.extend(TagSet::penn().iter().map(String::from));
        let classes: Vec<String> = class_set.into_iter().collect();
        let class_index: HashMap<String, u16> = classes
            .iter()
            .enumerate()
            .map(|(i, c)| (c.clone(), i as u16))
            .collect();
        let tagset = TagSet::new(classes.iter().cloned())?;

        let tagdict = build_tagdict(corpus, config, &class_index);
        let mut trainer = Trainer::default();
        let mut order: Vec<usize> = (0..corpus.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut shell = PerceptronTagger {
            tagset,
            classes,
            tagdict,
            weights: HashMap::new(),
        };

        for _ in 0..config.epochs {
            for &idx in &order {
                let (tokens, tags) = &corpus[idx];
                let context = context_for(tokens);
                let mut prev = START[0].to_string();
                let mut prev2 = START[1].to_string();
                for (i, (word, gold)) in tokens.iter().zip(tags).enumerate() {
                    let truth = class_index[gold.as_str()];
                    let guess = match shell.fixed_class(word) {
                        Some(c) => c,
                        None => {
                            let feats = features(i + 2, word, &context, &prev, &prev2);
                            let scores = trainer.scores(&feats, shell.classes.len());
                            let guess = shell.best_class(word, &scores);
                            trainer.update(truth, guess, &feats);
                            guess
                        }
                    };
                    prev2 = std::mem::replace(&mut prev, shell.classes[guess as usize].clone());
                }
            }
            order.shuffle(&mut rng);
        }
        shell.weights = trainer.averaged();
        Ok(shell)
    }

    /// Class forced without consulting weights: tag dictionary or a
    /// single-tag closed-class word.
    fn fixed_class(&self, word: &str) -> Option<u16> {
        if let Some(&[only]) = closed_class_tags(word) {
            return self.class_of(only);
        }
        if closed_class_tags(word).is_some() {
            return None;
        }
        self.tagdict.get(word).copied()
    }

    fn class_of(&self, tag: &str) -> Option<u16> {
        self.classes.iter().position(|c| c == tag).map(|i| i as u16)
    }

    /// Argmax over classes, restricted to the closed-class options when the
    /// word has several. Ties go to the lexicographically smaller tag.
    fn best_class(&self, word: &str, scores: &[f64]) -> u16 {
        let allowed: Option<Vec<u16>> = closed_class_tags(word)
            .map(|tags| tags.iter().filter_map(|t| self.class_of(t)).collect());
        let candidates: Box<dyn Iterator<Item = u16>> = match &allowed {
            Some(a) if !a.is_empty() => Box::new(a.iter().copied()),
            _ => Box::new(0..self.classes.len() as u16),
        };
        let mut best: Option<(u16, f64)> = None;
        for c in candidates {
            let s = scores[c as usize];
            if best.is_none_or(|(_, bs)| s > bs) {
                best = Some((c, s));
            }
        }
        best.map(|(c, _)| c).unwrap_or(0)
    }

    fn scores(&self, features: &[String]) -> Vec<f64> {
        let mut scores = vec![0.0; self.classes.len()];
        for f in features {
            if let Some(ws) = self.weights.get(f) {
                for &(c, w) in ws {
                    scores[c as usize] += w;
                }
            }
        }
        scores
    }

    pub fn tag(&self, tokens: &[String]) -> Vec<String> {
        let context = context_for(tokens);
        let mut prev = START[0].to_string();
        let mut prev2 = START[1].to_string();
        let mut out = Vec::with_capacity(tokens.len());
        for (i, word) in tokens.iter().enumerate() {
            let class = match self.fixed_class(word) {
                Some(c) => c,
                None => {
                    let feats = features(i + 2, word, &context, &prev, &prev2);
                    self.best_class(word, &self.scores(&feats))
                }
            };
            let tag = self.classes[class as usize].clone();
            prev2 = std::mem::replace(&mut prev, tag.clone());
            out.push(tag);
        }
        out
    }

    pub fn tagset(&self) -> &TagSet {
        &self.tagset
    }

    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        binio::write_header(&mut w, MAGIC, VERSION)?;
        binio::write_len(&mut w, self.classes.len())?;
        for c in &self.classes {
            binio::write_str(&mut w, c)?;
        }
        let dict: BTreeMap<_, _> = self.tagdict.iter().collect();
        binio::write_len(&mut w, dict.len())?;
        for (word, class) in dict {
            binio::write_str(&mut w, word)?;
            binio::write_u16(&mut w, *class)?;
        }
        let weights: BTreeMap<_, _> = self.weights.iter().collect();
        binio::write_len(&mut w, weights.len())?;
        for (feat, ws) in weights {
            binio::write_str(&mut w, feat)?;
            binio::write_len(&mut w, ws.len())?;
            for &(c, v) in ws {
                binio::write_u16(&mut w, c)?;
                binio::write_f64(&mut w, v)?;
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.save(&mut buf).expect("writing to a Vec cannot fail");
        buf
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        let version = binio::read_header(&mut r, MAGIC)?;
        if version != VERSION {
            return Err(Error::Model(format!("unsupported tagger version {version}")));
        }
        let n = binio::read_len(&mut r)?;
        let classes = (0..n)
            .map(|_| binio::read_str(&mut r))
            .collect::<Result<Vec<_>>>()?;
        let check = |c: u16| {
            if (c as usize) < classes.len() {
                Ok(c)
            } else {
                Err(Error::Model(format!("class index {c} out of range")))
            }
        };
        let n = binio::read_len(&mut r)?;
        let mut tagdict = HashMap::with_capacity(n);
        for _ in 0..n {
            let word = binio::read_str(&mut r)?;
            tagdict.insert(word, check(binio::read_u16(&mut r)?)?);
        }
        let n = binio::read_len(&mut r)?;
        let mut weights = HashMap::with_capacity(n);
        for _ in 0..n {
            let feat = binio::read_str(&mut r)?;
            let m = binio::read_len(&mut r)?;
            let mut ws = Vec::with_capacity(m);
            for _ in 0..m {
                let c = check(binio::read_u16(&mut r)?)?;
                ws.push((c, binio::read_f64(&mut r)?));
            }
            weights.insert(feat, ws);
        }
        let tagset = TagSet::new(classes.iter().cloned())?;
        Ok(Self {
            tagset,
            classes,
            tagdict,
            weights,
        })
    }
}

fn build_tagdict(
    corpus: &[(Vec<String>, Vec<String>)],
    config: &TrainConfig,
    class_index: &HashMap<String, u16>,
) -> HashMap<String, u16> {
    let mut counts: HashMap<&str, BTreeMap<&str, usize>> = HashMap::new();
    for (tokens, tags) in corpus {
        for (w, t) in tokens.iter().zip(tags) {
            *counts.entry(w).or_default().entry(t).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .filter_map(|(word, tags)| {
            let total: usize = tags.values().sum();
            let (tag, &n) = tags.iter().max_by_key(|(t, n)| (**n, std::cmp::Reverse(**t)))?;
            (total >= config.tagdict_min_count && n as f64 / total as f64 >= config.tagdict_min_ratio)
                .then(|| (word.to_string(), class_index[*tag]))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus(lines: &[&str]) -> Vec<(Vec<String>, Vec<String>)> {
        lines.iter().map(|l| parse_pretagged_line(l).unwrap()).collect()
    }

    const UNAMBIGUOUS: &[&str] = &[
        "Paul_NNP helped_VBD Lionel_NNP hide_VB ._.",
        "The_DT old_JJ secretary_NN smiled_VBD ._.",
        "Rose_NNP refused_VBD the_DT apology_NN ._.",
        "Wanda_NNP tried_VBD to_TO apologize_VB ._.",
        "Tom_NNP arrived_VBD late_RB ,_, but_CC he_PRP stayed_VBD ._.",
        "A_DT tall_JJ guard_NN watched_VBD Alex_NNP closely_RB ._.",
        "She_PRP wrote_VBD letters_NNS quickly_RB ._.",
        "Kara_NNP laughed_VBD because_IN Sam_NNP fell_VBD ._.",
        "His_PRP$ brother_NN sings_VBZ songs_NNS ._.",
        "Jessica_NNP visits_VBZ her_PRP$ aunt_NN often_RB ._.",
    ];

    #[test]
    fn memorizes_unambiguous_fixture() {
        let data = corpus(UNAMBIGUOUS);
        let model = PerceptronTagger::train(&data, &TrainConfig::default()).unwrap();
        for (tokens, tags) in &data {
            assert_eq!(&model.tag(tokens), tags, "{}", tokens.join(" "));
        }
    }

    #[test]
    fn training_is_byte_deterministic() {
        let data = corpus(UNAMBIGUOUS);
        let cfg = TrainConfig {
            seed: 17,
            ..TrainConfig::default()
        };
        let a = PerceptronTagger::train(&data, &cfg).unwrap().to_bytes();
        let b = PerceptronTagger::train(&data, &cfg).unwrap().to_bytes();
        assert_eq!(a, b);
    }

    #[test]
    fn save_load_round_trip() {
        let model = PerceptronTagger::train(&corpus(UNAMBIGUOUS), &TrainConfig::default()).unwrap();
        let loaded = PerceptronTagger::load(model.to_bytes().as_slice()).unwrap();
        assert_eq!(loaded, model);
        let mut bad = model.to_bytes();
        bad.truncate(bad.len() - 3);
        assert!(PerceptronTagger::load(bad.as_slice()).is_err());
    }

    #[test]
    fn empty_training_data() {
        assert!(matches!(
            PerceptronTagger::train(&[], &TrainConfig::default()),
            Err(Error::EmptyTrainingData)
        ));
    }

    #[test]
    fn lexicon_overrides_weights() {
        // A corpus that mislabels "he" still cannot teach the tagger to do so.
        let data = corpus(&["he_NN runs_VBZ ._.", "he_NN sleeps_VBZ ._."]);
        let model = PerceptronTagger::train(&data, &TrainConfig::default()).unwrap();
        let toks: Vec<String> = ["he", "runs", "."].iter().map(|s| s.to_string()).collect();
        assert_eq!(model.tag(&toks)[0], "PRP");
    }

    #[test]
    fn suffix_handles_short_words() {
        assert_eq!(suffix("ab", 3), "ab");
        assert_eq!(suffix("hello", 3), "llo");
    }
}
