use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::UNASSIGNED;
use crate::error::{Error, Result};
use crate::scalar::{harmonic_mean, ratio_or_zero, Scalar};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassMetrics<S> {
    pub label: String,
    /// Gold documents with this label.
    pub support: u64,
    /// Documents predicted as this label.
    pub predicted: u64,
    pub true_positives: u64,
    pub precision: S,
    pub recall: S,
    pub f1: S,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Averages<S> {
    pub precision: S,
    pub recall: S,
    pub f1: S,
}

/// Confusion matrix (rows gold, columns predicted) over the sorted union of
/// labels, with `unassigned` last when present.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvaluationReport<S> {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<u64>>,
    pub total: u64,
    pub accuracy: S,
    pub per_class: Vec<ClassMetrics<S>>,
    /// Unweighted mean over labels that occur in gold.
    pub macro_avg: Averages<S>,
    /// Pooled over labels that occur in gold.
    pub micro_avg: Averages<S>,
}

pub fn evaluate<S: Scalar>(
    predictions: &BTreeMap<String, String>,
    gold: &BTreeMap<String, String>,
) -> Result<EvaluationReport<S>> {
    let only_predicted = predictions.keys().filter(|k| !gold.contains_key(*k)).count();
    let only_gold = gold.keys().filter(|k| !predictions.contains_key(*k)).count();
    if only_predicted > 0 || only_gold > 0 {
        return Err(Error::MismatchedKeys {
            only_predicted,
            only_gold,
        });
    }

    let set: BTreeSet<&str> = gold.values().chain(predictions.values()).map(String::as_str).collect();
    let mut labels: Vec<String> = set.iter().filter(|l| **l != UNASSIGNED).map(|l| l.to_string()).collect();
    if set.contains(UNASSIGNED) {
        labels.push(UNASSIGNED.to_string());
    }
    let index: BTreeMap<&str, usize> = labels.iter().enumerate().map(|(i, l)| (l.as_str(), i)).collect();
    let n = labels.len();
    let mut matrix = vec![vec![0u64; n]; n];
    for (id, g) in gold {
        matrix[index[g.as_str()]][index[predictions[id].as_str()]] += 1;
    }

    let total = gold.len() as u64;
    let trace: u64 = (0..n).map(|i| matrix[i][i]).sum();
    let per_class: Vec<ClassMetrics<S>> = (0..n)
        .map(|i| {
            let tp = matrix[i][i];
            let support: u64 = matrix[i].iter().sum();
            let predicted: u64 = matrix.iter().map(|row| row[i]).sum();
            let precision = ratio_or_zero::<S>(tp, predicted);
            let recall = ratio_or_zero::<S>(tp, support);
            let f1 = harmonic_mean(&precision, &recall);
            ClassMetrics {
                label: labels[i].clone(),
                support,
                predicted,
                true_positives: tp,
                precision,
                recall,
                f1,
            }
        })
        .collect();

    let gold_classes: Vec<&ClassMetrics<S>> = per_class.iter().filter(|c| c.support > 0).collect();
    let mean = |f: &dyn Fn(&ClassMetrics<S>) -> S| -> S {
        if gold_classes.is_empty() {
            return S::zero();
        }
        let sum = gold_classes.iter().fold(S::zero(), |acc, c| acc + f(c));
        sum / S::from_count(gold_classes.len() as u64)
    };
    let macro_avg = Averages {
        precision: mean(&|c| c.precision.clone()),
        recall: mean(&|c| c.recall.clone()),
        f1: mean(&|c| c.f1.clone()),
    };
    let tp: u64 = gold_classes.iter().map(|c| c.true_positives).sum();
    let pred: u64 = gold_classes.iter().map(|c| c.predicted).sum();
    let sup: u64 = gold_classes.iter().map(|c| c.support).sum();
    let micro_p = ratio_or_zero::<S>(tp, pred);
    let micro_r = ratio_or_zero::<S>(tp, sup);
    let micro_avg = Averages {
        f1: harmonic_mean(&micro_p, &micro_r),
        precision: micro_p,
        recall: micro_r,
    };

    Ok(EvaluationReport {
        labels,
        matrix,
        total,
        accuracy: ratio_or_zero(trace, total),
        per_class,
        macro_avg,
        micro_avg,
    })
}
