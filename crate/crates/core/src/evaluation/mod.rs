//! Outcome breakdown, task-specific accuracy, consistency under switching,
//! corpus statistics and annotator agreement.

mod agreement;

pub use agreement::{
    fleiss_kappa, majority_accuracy, qc_report, AgreementMatrix, AnnotationLabel,
    MajorityReport, QcReport,
};

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AntecedentId, Choice, Prediction, ProblemInstance, PronounGender};
use crate::switching::SwitchedPair;

/// correct / (correct + incorrect), or `None` when nothing was decided.
pub fn task_specific_accuracy(correct: f64, incorrect: f64) -> Option<f64> {
    let denom = correct + incorrect;
    (denom > 0.0).then(|| correct / denom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub both: usize,
    pub none: usize,
    pub incorrect: usize,
    pub correct: usize,
    pub both_rate: f64,
    pub none_rate: f64,
    pub incorrect_rate: f64,
    pub correct_rate: f64,
    pub task_specific_accuracy: Option<f64>,
    /// Set when no prediction was a decision, so TSA is undefined.
    pub tsa_undefined: bool,
    /// Corpus ids without a prediction; each was scored as no decision.
    pub missing: Vec<String>,
}

/// Scores predictions against a labeled corpus. Missing predictions count
/// as no decision unless `strict` is set.
pub fn evaluate(corpus: &[ProblemInstance], predictions: &[Prediction], strict: bool) -> Result<EvalReport> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut gold: HashMap<&str, AntecedentId> = HashMap::with_capacity(corpus.len());
    for inst in corpus {
        let label = inst.label.ok_or_else(|| Error::InvariantViolation {
            id: inst.id.clone(),
            reason: "evaluation needs labeled instances".into(),
        })?;
        gold.insert(inst.id.as_str(), label);
    }

    let mut seen: HashSet<&str> = HashSet::with_capacity(predictions.len());
    let (mut both, mut none, mut incorrect, mut correct) = (0, 0, 0, 0);
    for p in predictions {
        let label = *gold
            .get(p.instance_id.as_str())
            .ok_or_else(|| Error::UnknownInstanceId(p.instance_id.clone()))?;
        if !seen.insert(p.instance_id.as_str()) {
            return Err(Error::InvalidConfig(format!(
                "duplicate prediction for `{}`",
                p.instance_id
            )));
        }
        match p.choice {
            Choice::Both => both += 1,
            Choice::None => none += 1,
            c if c.decision() == Some(label) => correct += 1,
            _ => incorrect += 1,
        }
    }
    let missing: Vec<String> = corpus
        .iter()
        .filter(|i| !seen.contains(i.id.as_str()))
        .map(|i| i.id.clone())
        .collect();
    if strict {
        if let Some(id) = missing.first() {
            return Err(Error::MissingPrediction(id.clone()));
        }
    }
    none += missing.len();

    let n = corpus.len();
    let rate = |c: usize| c as f64 / n as f64;
    let tsa = task_specific_accuracy(correct as f64, incorrect as f64);
    Ok(EvalReport {
        n,
        both,
        none,
        incorrect,
        correct,
        both_rate: rate(both),
        none_rate: rate(none),
        incorrect_rate: rate(incorrect),
        correct_rate: rate(correct),
        task_specific_accuracy: tsa,
        tsa_undefined: tsa.is_none(),
        missing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub pairs: usize,
    /// Pairs where both predictions are decisions.
    pub counted: usize,
    /// Pairs with Both or None on either side.
    pub excluded: usize,
    /// Counted pairs whose predicted surface name changed.
    pub surface_changed: usize,
    /// Counted pairs whose predicted position stayed the same.
    pub position_kept: usize,
    pub consistency: Option<f64>,
    /// Same ratio computed from positions; must equal `consistency`.
    pub consistency_by_position: Option<f64>,
}

/// Consistency over aligned prediction pairs: line k of `original` and
/// `switched` refers to `pairs[k]`.
pub fn consistency(
    pairs: &[SwitchedPair],
    original: &[Prediction],
    switched: &[Prediction],
) -> Result<ConsistencyReport> {
    if pairs.len() != original.len() || pairs.len() != switched.len() {
        return Err(Error::MisalignedPair {
            original: format!("{} original predictions", original.len()),
            switched: format!("{} switched predictions for {} pairs", switched.len(), pairs.len()),
        });
    }
    let mut report = ConsistencyReport {
        pairs: pairs.len(),
        counted: 0,
        excluded: 0,
        surface_changed: 0,
        position_kept: 0,
        consistency: None,
        consistency_by_position: None,
    };
    for ((pair, po), ps) in pairs.iter().zip(original).zip(switched) {
        let aligned = pair.switched.derived_from.as_deref() == Some(pair.original.id.as_str())
            && po.instance_id == pair.original.id
            && ps.instance_id == pair.switched.id;
        if !aligned {
            return Err(Error::MisalignedPair {
                original: po.instance_id.clone(),
                switched: ps.instance_id.clone(),
            });
        }
        let (Some(a), Some(b)) = (po.choice.decision(), ps.choice.decision()) else {
            report.excluded += 1;
            continue;
        };
        report.counted += 1;
        if pair.original.candidate(a).surface != pair.switched.candidate(b).surface {
            report.surface_changed += 1;
        }
        if a == b {
            report.position_kept += 1;
        }
    }
    if report.counted > 0 {
        let c = report.counted as f64;
        report.consistency = Some(report.surface_changed as f64 / c);
        report.consistency_by_position = Some(report.position_kept as f64 / c);
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub n: usize,
    pub masculine_pronoun_rate: f64,
    pub feminine_pronoun_rate: f64,
    /// Rates over labeled instances only.
    pub labeled: usize,
    pub first_correct_rate: Option<f64>,
    pub second_correct_rate: Option<f64>,
}

pub fn corpus_stats(corpus: &[ProblemInstance]) -> Result<CorpusStats> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let n = corpus.len();
    let masc = corpus
        .iter()
        .filter(|i| i.pronoun_gender == PronounGender::Masculine)
        .count();
    let first = corpus
        .iter()
        .filter(|i| i.label == Some(AntecedentId::First))
        .count();
    let labeled = corpus.iter().filter(|i| i.label.is_some()).count();
    let label_rate = |c: usize| (labeled > 0).then(|| c as f64 / labeled as f64);
    Ok(CorpusStats {
        n,
        masculine_pronoun_rate: masc as f64 / n as f64,
        feminine_pronoun_rate: (n - masc) as f64 / n as f64,
        labeled,
        first_correct_rate: label_rate(first),
        second_correct_rate: label_rate(labeled - first),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::example_one;
    use crate::switching::switch_antecedents;

    fn labeled(n: usize) -> Vec<ProblemInstance> {
        (0..n)
            .map(|i| {
                let mut x = example_one();
                x.id = format!("x{i}");
                x
            })
            .collect()
    }

    #[test]
    fn rates_and_tsa() {
        let corpus = labeled(20);
        let preds: Vec<Prediction> = corpus
            .iter()
            .enumerate()
            .map(|(i, x)| {
                let c = if i < 10 { Choice::Second } else { Choice::First };
                Prediction::new(x.id.clone(), c)
            })
            .collect();
        let r = evaluate(&corpus, &preds, false).unwrap();
        assert_eq!(r.task_specific_accuracy, Some(0.5));
        let sum = r.both_rate + r.none_rate + r.incorrect_rate + r.correct_rate;
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn all_none_is_undefined() {
        let corpus = labeled(3);
        let preds: Vec<Prediction> = corpus
            .iter()
            .map(|x| Prediction::new(x.id.clone(), Choice::None))
            .collect();
        let r = evaluate(&corpus, &preds, false).unwrap();
        assert!(r.tsa_undefined);
        assert_eq!(r.task_specific_accuracy, None);
        assert_eq!(r.none_rate, 1.0);
    }

    #[test]
    fn missing_and_unknown() {
        let corpus = labeled(2);
        let preds = vec![Prediction::new("x0", Choice::Second)];
        let r = evaluate(&corpus, &preds, false).unwrap();
        assert_eq!(r.missing, vec!["x1".to_string()]);
        assert_eq!(r.none, 1);
        assert!(matches!(evaluate(&corpus, &preds, true), Err(Error::MissingPrediction(_))));
        let bad = vec![Prediction::new("nope", Choice::First)];
        assert!(matches!(evaluate(&corpus, &bad, false), Err(Error::UnknownInstanceId(_))));
        assert!(matches!(evaluate(&[], &[], false), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn table_row_arithmetic() {
        let tsa = task_specific_accuracy(0.52, 0.28).unwrap();
        assert!((tsa - 0.65).abs() < 1e-12);
    }

    #[test]
    fn consistency_endpoints() {
        let x = example_one();
        let pair = SwitchedPair {
            switched: switch_antecedents(&x).unwrap(),
            original: x,
        };
        let po = vec![Prediction::new("ex1", Choice::First)];
        let ps = vec![Prediction::new("ex1-sw", Choice::First)];
        let r = consistency(std::slice::from_ref(&pair), &po, &ps).unwrap();
        assert_eq!(r.consistency, Some(1.0));
        let ps = vec![Prediction::new("ex1-sw", Choice::Second)];
        let r = consistency(std::slice::from_ref(&pair), &po, &ps).unwrap();
        assert_eq!(r.consistency, Some(0.0));
        assert_eq!(r.consistency, r.consistency_by_position);
        let ps = vec![Prediction::new("ex1-sw", Choice::None)];
        let r = consistency(std::slice::from_ref(&pair), &po, &ps).unwrap();
        assert_eq!((r.excluded, r.consistency), (1, None));
        let ps = vec![Prediction::new("other", Choice::First)];
        assert!(matches!(
            consistency(std::slice::from_ref(&pair), &po, &ps),
            Err(Error::MisalignedPair { .. })
        ));
    }

    #[test]
    fn stats() {
        let mut corpus = labeled(4);
        corpus[0].label = Some(AntecedentId::First);
        let s = corpus_stats(&corpus).unwrap();
        assert_eq!(s.masculine_pronoun_rate, 1.0);
        assert_eq!(s.first_correct_rate, Some(0.25));
        assert_eq!(s.second_correct_rate, Some(0.75));
        assert!(matches!(corpus_stats(&[]), Err(Error::EmptyCorpus)));
    }
}
