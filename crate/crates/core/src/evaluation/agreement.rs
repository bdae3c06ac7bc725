//! Annotator agreement: Fleiss' kappa, majority accuracy and the label QC
//! report.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::AntecedentId;

/// What a human annotator may answer for one candidate instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum AnnotationLabel {
    First,
    Second,
    /// Neither candidate is the antecedent.
    Neither,
    Unclear,
}

impl AnnotationLabel {
    pub const ALL: [AnnotationLabel; 4] = [
        AnnotationLabel::First,
        AnnotationLabel::Second,
        AnnotationLabel::Neither,
        AnnotationLabel::Unclear,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AnnotationLabel::First => "1",
            AnnotationLabel::Second => "2",
            AnnotationLabel::Neither => "neither",
            AnnotationLabel::Unclear => "unclear",
        }
    }

    pub fn antecedent(self) -> Option<AntecedentId> {
        match self {
            AnnotationLabel::First => Some(AntecedentId::First),
            AnnotationLabel::Second => Some(AntecedentId::Second),
            _ => None,
        }
    }
}

impl From<AntecedentId> for AnnotationLabel {
    fn from(id: AntecedentId) -> Self {
        match id {
            AntecedentId::First => AnnotationLabel::First,
            AntecedentId::Second => AnnotationLabel::Second,
        }
    }
}

impl fmt::Display for AnnotationLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AnnotationLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "1" => Ok(AnnotationLabel::First),
            "2" => Ok(AnnotationLabel::Second),
            "neither" => Ok(AnnotationLabel::Neither),
            "unclear" => Ok(AnnotationLabel::Unclear),
            other => Err(Error::MalformedLabel(other.to_string())),
        }
    }
}

impl TryFrom<String> for AnnotationLabel {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<AnnotationLabel> for String {
    fn from(l: AnnotationLabel) -> Self {
        l.as_str().to_string()
    }
}

/// Per-item counts of annotators choosing each [`AnnotationLabel`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgreementMatrix {
    pub raters: u32,
    pub rows: Vec<[u32; 4]>,
}

impl AgreementMatrix {
    pub const DEFAULT_RATERS: u32 = 6;

    pub fn new(raters: u32, rows: Vec<[u32; 4]>) -> Result<Self> {
        for (item, row) in rows.iter().enumerate() {
            let found: u32 = row.iter().sum();
            if found != raters {
                return Err(Error::InconsistentRaterCount {
                    item,
                    expected: raters,
                    found,
                });
            }
        }
        Ok(Self { raters, rows })
    }

    pub fn from_labels(raters: u32, items: &[Vec<AnnotationLabel>]) -> Result<Self> {
        let rows = items
            .iter()
            .map(|labels| {
                let mut row = [0u32; 4];
                for l in labels {
                    row[l.index()] += 1;
                }
                row
            })
            .collect();
        Self::new(raters, rows)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Fleiss' kappa over a fixed number of raters per item.
pub fn fleiss_kappa(matrix: &AgreementMatrix) -> Result<f64> {
    if matrix.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    let r = f64::from(matrix.raters);
    if matrix.raters < 2 {
        return Err(Error::InvalidConfig("kappa needs at least two raters".into()));
    }
    let items = matrix.rows.len() as f64;
    let mut totals = [0f64; 4];
    let mut p_bar = 0.0;
    for row in &matrix.rows {
        let agree: f64 = row.iter().map(|&n| f64::from(n) * (f64::from(n) - 1.0)).sum();
        p_bar += agree / (r * (r - 1.0));
        for (t, &n) in totals.iter_mut().zip(row) {
            *t += f64::from(n);
        }
    }
    p_bar /= items;
    let p_e: f64 = totals.iter().map(|t| (t / (items * r)).powi(2)).sum();
    if (1.0 - p_e).abs() < 1e-15 {
        // Every rating falls in one category, so every item is unanimous.
        return Ok(1.0);
    }
    Ok((p_bar - p_e) / (1.0 - p_e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MajorityReport {
    pub accuracy: f64,
    pub items: usize,
    pub correct: usize,
    /// Items whose modal label is shared by two or more categories; each
    /// counts as incorrect.
    pub ties: usize,
}

pub fn majority_accuracy(matrix: &AgreementMatrix, gold: &[AntecedentId]) -> Result<MajorityReport> {
    if matrix.is_empty() {
        return Err(Error::EmptyMatrix);
    }
    if gold.len() != matrix.len() {
        return Err(Error::InvalidConfig(format!(
            "{} gold labels for {} items",
            gold.len(),
            matrix.len()
        )));
    }
    let mut correct = 0;
    let mut ties = 0;
    for (row, g) in matrix.rows.iter().zip(gold) {
        let max = *row.iter().max().expect("four categories");
        let modal: Vec<usize> = (0..4).filter(|&j| row[j] == max).collect();
        if modal.len() > 1 {
            ties += 1;
        } else if modal[0] == AnnotationLabel::from(*g).index() {
            correct += 1;
        }
    }
    Ok(MajorityReport {
        accuracy: correct as f64 / matrix.len() as f64,
        items: matrix.len(),
        correct,
        ties,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QcReport {
    pub n: usize,
    pub correct_rate: f64,
    pub incorrect_rate: f64,
    pub unresolvable_rate: f64,
}

/// Compares heuristic labels with one annotation per sampled instance.
/// Neither and Unclear answers count as unresolvable.
pub fn qc_report(heuristic: &[AntecedentId], annotations: &[AnnotationLabel]) -> Result<QcReport> {
    if annotations.is_empty() {
        return Err(Error::EmptySample);
    }
    if heuristic.len() != annotations.len() {
        return Err(Error::InvalidConfig(format!(
            "{} heuristic labels for {} annotations",
            heuristic.len(),
            annotations.len()
        )));
    }
    let (mut correct, mut incorrect, mut unresolvable) = (0usize, 0usize, 0usize);
    for (h, a) in heuristic.iter().zip(annotations) {
        match a.antecedent() {
            Some(x) if x == *h => correct += 1,
            Some(_) => incorrect += 1,
            None => unresolvable += 1,
        }
    }
    let n = annotations.len();
    let rate = |c: usize| c as f64 / n as f64;
    Ok(QcReport {
        n,
        correct_rate: rate(correct),
        incorrect_rate: rate(incorrect),
        unresolvable_rate: rate(unresolvable),
    })
}
