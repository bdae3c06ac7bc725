//! Human annotation campaign state: an append-only label store, the
//! agreement-based aggregation rule and export of accepted instances.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs::{File, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evaluation::{fleiss_kappa, AgreementMatrix, AnnotationLabel};
use crate::labeling::{ANNOTATED_SUFFIX, HEURISTIC_SUFFIX};
use crate::model::{serialize_instance, AntecedentId, ProblemInstance};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotationRecord {
    pub candidate_id: String,
    pub annotator_id: String,
    pub label: AnnotationLabel,
    /// UTC seconds.
    pub timestamp: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AggregationPolicy {
    pub annotators_per_item: u32,
    pub agreement_threshold: u32,
}

impl Default for AggregationPolicy {
    fn default() -> Self {
        Self {
            annotators_per_item: 6,
            agreement_threshold: 5,
        }
    }
}

impl AggregationPolicy {
    pub fn new(annotators_per_item: u32, agreement_threshold: u32) -> Result<Self> {
        let p = Self {
            annotators_per_item,
            agreement_threshold,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.agreement_threshold == 0 || self.agreement_threshold > self.annotators_per_item {
            return Err(Error::InvalidConfig(format!(
                "agreement threshold {} must lie in 1..={}",
                self.agreement_threshold, self.annotators_per_item
            )));
        }
        Ok(())
    }

    /// The decision for one item's label counts (indexed by
    /// [`AnnotationLabel::index`]).
    pub fn decide(&self, counts: &[u32; 4]) -> Decision {
        let total: u32 = counts.iter().sum();
        if total < self.annotators_per_item {
            return Decision::Pending;
        }
        for label in AnnotationLabel::ALL {
            if counts[label.index()] >= self.agreement_threshold {
                return match label.antecedent() {
                    Some(a) => Decision::Accepted { label: a },
                    None => Decision::Rejected {
                        reason: RejectionReason::NotAnAntecedent,
                    },
                };
            }
        }
        Decision::Rejected {
            reason: RejectionReason::InsufficientAgreement,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RejectionReason {
    InsufficientAgreement,
    NotAnAntecedent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Decision {
    Pending,
    Accepted { label: AntecedentId },
    Rejected { reason: RejectionReason },
}

/// One line of the store file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum StoreEvent {
    Register { annotator_id: String, timestamp: u64 },
    Label(AnnotationRecord),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Progress {
    pub candidates: usize,
    pub annotators: usize,
    pub events: usize,
    pub effective_labels: usize,
    pub pending: usize,
    pub accepted: usize,
    pub rejected: usize,
    pub per_annotator: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ItemAgreement {
    pub candidate_id: String,
    pub counts: BTreeMap<String, u32>,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgreementSummary {
    pub items: Vec<ItemAgreement>,
    pub accepted: usize,
    pub rejected: usize,
    pub pending: usize,
    /// Items with exactly the policy's number of labels; kappa is computed
    /// over these.
    pub complete_items: usize,
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Export {
    pub instances: Vec<ProblemInstance>,
    pub matrix: AgreementMatrix,
}

impl Export {
    /// The accepted instances in record-line form, one per line.
    pub fn to_jsonl(&self) -> Result<String> {
        let mut out = String::new();
        for inst in &self.instances {
            out.push_str(&serialize_instance(inst)?);
            out.push('\n');
        }
        Ok(out)
    }
}

pub struct AnnotationStore {
    corpus: Vec<ProblemInstance>,
    index: HashMap<String, usize>,
    file: Option<File>,
    path: Option<PathBuf>,
    events: usize,
    annotators: BTreeSet<String>,
    /// candidate index -> annotator -> effective label
    labels: Vec<BTreeMap<String, AnnotationLabel>>,
}

impl std::fmt::Debug for AnnotationStore {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("AnnotationStore")
            .field("candidates", &self.corpus.len())
            .field("path", &self.path)
            .field("events", &self.events)
            .finish()
    }
}

impl AnnotationStore {
    /// A store that keeps everything in memory.
    pub fn in_memory(corpus: Vec<ProblemInstance>) -> Result<Self> {
        let index = build_index(&corpus)?;
        let labels = vec![BTreeMap::new(); corpus.len()];
        Ok(Self {
            corpus,
            index,
            file: None,
            path: None,
            events: 0,
            annotators: BTreeSet::new(),
            labels,
        })
    }

    /// Opens (or creates) the store file and replays it. A final line
    /// without a newline that fails to parse is treated as a torn write and
    /// cut off.
    pub fn open(path: &Path, corpus: Vec<ProblemInstance>) -> Result<Self> {
        let mut store = Self::in_memory(corpus)?;
        let mut file = OpenOptions::new()
            .read(true)
            .append(true)
            .create(true)
            .open(path)?;
        let mut data = String::new();
        file.read_to_string(&mut data)?;

        let mut offset = 0;
        let mut keep = data.len();
        for line in data.split_inclusive('\n') {
            let complete = line.ends_with('\n');
            let body = line.trim_end();
            if !body.is_empty() {
                match serde_json::from_str::<StoreEvent>(body) {
                    Ok(event) => store.apply(event),
                    Err(_) if !complete => {
                        keep = offset;
                        break;
                    }
                    Err(e) => {
                        return Err(Error::Parse {
                            offset,
                            message: format!("store line: {e}"),
                        })
                    }
                }
            }
            offset += line.len();
        }
        if keep < data.len() {
            file.set_len(keep as u64)?;
            file.seek(SeekFrom::End(0))?;
        } else if !data.is_empty() && !data.ends_with('\n') {
            file.write_all(b"\n")?;
        }
        store.file = Some(file);
        store.path = Some(path.to_path_buf());
        Ok(store)
    }

    fn apply(&mut self, event: StoreEvent) {
        self.events += 1;
        match event {
            StoreEvent::Register { annotator_id, .. } => {
                self.annotators.insert(annotator_id);
            }
            StoreEvent::Label(r) => {
                // Labels for candidates no longer in the corpus are kept in
                // the file but play no part in aggregation.
                if let Some(&i) = self.index.get(&r.candidate_id) {
                    self.annotators.insert(r.annotator_id.clone());
                    self.labels[i].insert(r.annotator_id, r.label);
                }
            }
        }
    }

    /// Appends the event and syncs it to disk before applying it.
    fn persist(&mut self, event: StoreEvent) -> Result<()> {
        if let Some(file) = &mut self.file {
            let mut line = serde_json::to_string(&event)?;
            line.push('\n');
            file.write_all(line.as_bytes())?;
            file.sync_data()?;
        }
        self.apply(event);
        Ok(())
    }

    pub fn corpus(&self) -> &[ProblemInstance] {
        &self.corpus
    }

    pub fn is_registered(&self, annotator: &str) -> bool {
        self.annotators.contains(annotator)
    }

    /// Issues a fresh bearer token and records it.
    pub fn register(&mut self, timestamp: u64) -> Result<String> {
        let mut rng = rand::rng();
        let token = loop {
            let t = format!("{:016x}", rng.random::<u64>());
            if !self.annotators.contains(&t) {
                break t;
            }
        };
        self.register_as(&token, timestamp)?;
        Ok(token)
    }

    /// Registers a caller-chosen id; registering twice is harmless.
    pub fn register_as(&mut self, annotator_id: &str, timestamp: u64) -> Result<()> {
        if annotator_id.trim().is_empty() {
            return Err(Error::InvalidConfig("annotator id is empty".into()));
        }
        if self.is_registered(annotator_id) {
            return Ok(());
        }
        self.persist(StoreEvent::Register {
            annotator_id: annotator_id.to_string(),
            timestamp,
        })
    }

    /// An instance this annotator has not labeled, fewest labels first,
    /// ties broken by corpus order. Items that already have the policy's
    /// full complement of labels are not served.
    pub fn next_candidate(
        &self,
        annotator: &str,
        policy: &AggregationPolicy,
    ) -> Result<Option<&ProblemInstance>> {
        if !self.is_registered(annotator) {
            return Err(Error::UnknownAnnotator(annotator.to_string()));
        }
        Ok(self
            .labels
            .iter()
            .enumerate()
            .filter(|(_, l)| !l.contains_key(annotator) && (l.len() as u32) < policy.annotators_per_item)
            .min_by_key(|(i, l)| (l.len(), *i))
            .map(|(i, _)| &self.corpus[i]))
    }

    pub fn submit(&mut self, record: AnnotationRecord) -> Result<()> {
        if !self.index.contains_key(&record.candidate_id) {
            return Err(Error::UnknownCandidate(record.candidate_id));
        }
        if !self.is_registered(&record.annotator_id) {
            return Err(Error::UnknownAnnotator(record.annotator_id));
        }
        self.persist(StoreEvent::Label(record))
    }

    /// Parses the label from its wire form before submitting.
    pub fn submit_raw(&mut self, candidate_id: &str, annotator_id: &str, label: &str, timestamp: u64) -> Result<()> {
        let label: AnnotationLabel = label.parse()?;
        self.submit(AnnotationRecord {
            candidate_id: candidate_id.to_string(),
            annotator_id: annotator_id.to_string(),
            label,
            timestamp,
        })
    }

    fn counts_at(&self, i: usize) -> [u32; 4] {
        let mut counts = [0u32; 4];
        for l in self.labels[i].values() {
            counts[l.index()] += 1;
        }
        counts
    }

    pub fn effective_label(&self, candidate_id: &str, annotator: &str) -> Option<AnnotationLabel> {
        let i = *self.index.get(candidate_id)?;
        self.labels[i].get(annotator).copied()
    }

    pub fn aggregate(&self, candidate_id: &str, policy: &AggregationPolicy) -> Result<Decision> {
        let i = *self
            .index
            .get(candidate_id)
            .ok_or_else(|| Error::UnknownCandidate(candidate_id.to_string()))?;
        Ok(policy.decide(&self.counts_at(i)))
    }

    pub fn progress(&self, policy: &AggregationPolicy) -> Progress {
        let mut per_annotator: BTreeMap<String, usize> =
            self.annotators.iter().map(|a| (a.clone(), 0)).collect();
        let (mut pending, mut accepted, mut rejected) = (0, 0, 0);
        for (i, labels) in self.labels.iter().enumerate() {
            for a in labels.keys() {
                *per_annotator.entry(a.clone()).or_default() += 1;
            }
            match policy.decide(&self.counts_at(i)) {
                Decision::Pending => pending += 1,
                Decision::Accepted { .. } => accepted += 1,
                Decision::Rejected { .. } => rejected += 1,
            }
        }
        Progress {
            candidates: self.corpus.len(),
            annotators: self.annotators.len(),
            events: self.events,
            effective_labels: self.labels.iter().map(BTreeMap::len).sum(),
            pending,
            accepted,
            rejected,
            per_annotator,
        }
    }

    /// Rows for every item carrying exactly the policy's number of labels.
    pub fn matrix(&self, policy: &AggregationPolicy) -> AgreementMatrix {
        let rows = (0..self.corpus.len())
            .map(|i| self.counts_at(i))
            .filter(|c| c.iter().sum::<u32>() == policy.annotators_per_item)
            .collect();
        AgreementMatrix {
            raters: policy.annotators_per_item,
            rows,
        }
    }

    pub fn agreement(&self, policy: &AggregationPolicy) -> AgreementSummary {
        let items: Vec<ItemAgreement> = self
            .corpus
            .iter()
            .enumerate()
            .map(|(i, inst)| {
                let counts = self.counts_at(i);
                ItemAgreement {
                    candidate_id: inst.id.clone(),
                    counts: AnnotationLabel::ALL
                        .iter()
                        .map(|l| (l.as_str().to_string(), counts[l.index()]))
                        .collect(),
                    decision: policy.decide(&counts),
                }
            })
            .collect();
        let count = |f: fn(&Decision) -> bool| items.iter().filter(|i| f(&i.decision)).count();
        let matrix = self.matrix(policy);
        AgreementSummary {
            accepted: count(|d| matches!(d, Decision::Accepted { .. })),
            rejected: count(|d| matches!(d, Decision::Rejected { .. })),
            pending: count(|d| matches!(d, Decision::Pending)),
            complete_items: matrix.len(),
            kappa: fleiss_kappa(&matrix).ok(),
            items,
        }
    }

    /// Accepted instances (corpus order) carrying their agreed label, plus
    /// the agreement matrix. Depends only on the effective store state.
    pub fn export(&self, policy: &AggregationPolicy) -> Export {
        let instances = self
            .corpus
            .iter()
            .enumerate()
            .filter_map(|(i, inst)| match policy.decide(&self.counts_at(i)) {
                Decision::Accepted { label } => {
                    let mut out = inst.clone();
                    out.label = Some(label);
                    let base = out.source.strip_suffix(HEURISTIC_SUFFIX).unwrap_or(&out.source);
                    out.source = if base.ends_with(ANNOTATED_SUFFIX) {
                        base.to_string()
                    } else {
                        format!("{base}{ANNOTATED_SUFFIX}")
                    };
                    Some(out)
                }
                _ => None,
            })
            .collect();
        Export {
            instances,
            matrix: self.matrix(policy),
        }
    }
}

fn build_index(corpus: &[ProblemInstance]) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::with_capacity(corpus.len());
    for (i, inst) in corpus.iter().enumerate() {
        if index.insert(inst.id.clone(), i).is_some() {
            return Err(Error::InvalidConfig(format!("duplicate candidate id `{}`", inst.id)));
        }
    }
    Ok(index)
}
