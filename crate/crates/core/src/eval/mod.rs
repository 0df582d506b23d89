//! Scoring of predictions against gold instances, paired significance
//! testing and inter-annotator agreement.

mod kappa;
mod significance;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::jsonl::{read_jsonl, JsonlError};
use crate::pseudonym::{ClozeInstance, PseudoId};

pub use kappa::{cohens_kappa, format_percent, mean_pairwise_kappa, KappaError};
pub use significance::{approx_randomization, paired_significance, SignificanceResult};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("prediction for unknown instance `{0}`")]
    UnknownInstanceId(String),
    #[error("instance `{0}` is predicted more than once")]
    DuplicateInstanceId(String),
    #[error("prediction sets cover different instances ({only_a} only in the first, {only_b} only in the second)")]
    MismatchedCoverage { only_a: usize, only_b: usize },
    #[error("gold set is empty")]
    EmptyGold,
    #[error(transparent)]
    Kappa(#[from] KappaError),
    #[error(transparent)]
    Io(#[from] JsonlError),
}

/// One line of a predictions file. `null` means the system abstained.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub instance_id: String,
    pub predicted_pseudo_id: Option<PseudoId>,
}

/// Predictions keyed by instance id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PredictionSet(BTreeMap<String, Option<PseudoId>>);

impl PredictionSet {
    pub fn from_records(records: impl IntoIterator<Item = PredictionRecord>) -> Result<Self, EvalError> {
        let mut map = BTreeMap::new();
        for r in records {
            if map.insert(r.instance_id.clone(), r.predicted_pseudo_id).is_some() {
                return Err(EvalError::DuplicateInstanceId(r.instance_id));
            }
        }
        Ok(PredictionSet(map))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, EvalError> {
        Self::from_records(read_jsonl::<PredictionRecord>(path)?)
    }

    pub fn insert(&mut self, instance_id: impl Into<String>, pick: Option<PseudoId>) {
        self.0.insert(instance_id.into(), pick);
    }

    /// `None` if the instance has no entry; `Some(None)` if it abstained.
    pub fn get(&self, instance_id: &str) -> Option<Option<PseudoId>> {
        self.0.get(instance_id).copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn records(&self) -> impl Iterator<Item = PredictionRecord> + '_ {
        self.0.iter().map(|(k, v)| PredictionRecord { instance_id: k.clone(), predicted_pseudo_id: *v })
    }

    pub(crate) fn check_same_coverage(&self, other: &PredictionSet) -> Result<(), EvalError> {
        let a: BTreeSet<&str> = self.ids().collect();
        let b: BTreeSet<&str> = other.ids().collect();
        if a == b {
            return Ok(());
        }
        Err(EvalError::MismatchedCoverage {
            only_a: a.difference(&b).count(),
            only_b: b.difference(&a).count(),
        })
    }
}

impl FromIterator<(String, Option<PseudoId>)> for PredictionSet {
    fn from_iter<I: IntoIterator<Item = (String, Option<PseudoId>)>>(iter: I) -> Self {
        PredictionSet(iter.into_iter().collect())
    }
}

impl From<&[crate::baselines::Prediction]> for PredictionSet {
    fn from(preds: &[crate::baselines::Prediction]) -> Self {
        preds.iter().map(|p| (p.instance_id.clone(), Some(p.predicted_pseudo_id))).collect()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Bucket {
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n_scored: usize,
    pub n_correct: usize,
    pub n_answered: usize,
    pub n_abstained: usize,
    pub n_missing: usize,
    /// Fraction in `[0, 1]`.
    pub accuracy: f64,
    /// Keyed by candidate count.
    pub by_candidates: BTreeMap<usize, Bucket>,
}

impl EvalReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("candidates,n,correct,accuracy\n");
        for (k, b) in &self.by_candidates {
            let _ = writeln!(out, "{k},{},{},{}", b.n, b.correct, format_percent(b.accuracy));
        }
        let _ = writeln!(out, "all,{},{},{}", self.n_scored, self.n_correct, format_percent(self.accuracy));
        out
    }

    pub fn render(&self, by_candidates: bool) -> String {
        let mut out = format!(
            "accuracy {}% ({}/{})  answered {}  abstained {}  missing {}\n",
            format_percent(self.accuracy),
            self.n_correct,
            self.n_scored,
            self.n_answered,
            self.n_abstained,
            self.n_missing
        );
        if by_candidates {
            let _ = writeln!(out, "{:>10}  {:>8}  {:>8}", "candidates", "n", "acc %");
            for (k, b) in &self.by_candidates {
                let _ = writeln!(out, "{k:>10}  {:>8}  {:>8}", b.n, format_percent(b.accuracy));
            }
        }
        out
    }
}

/// Per-instance correctness in gold order. Missing and abstained count as wrong.
pub fn correctness(gold: &[ClozeInstance], preds: &PredictionSet) -> Result<Vec<bool>, EvalError> {
    let known: BTreeSet<&str> = gold.iter().map(|g| g.instance_id.as_str()).collect();
    if let Some(unknown) = preds.ids().find(|id| !known.contains(id)) {
        return Err(EvalError::UnknownInstanceId(unknown.to_owned()));
    }
    Ok(gold
        .iter()
        .map(|g| preds.get(&g.instance_id).flatten() == Some(g.answer_pseudo_id))
        .collect())
}

pub fn score(gold: &[ClozeInstance], preds: &PredictionSet) -> Result<EvalReport, EvalError> {
    if gold.is_empty() {
        return Err(EvalError::EmptyGold);
    }
    let hits = correctness(gold, preds)?;
    let mut report = EvalReport {
        n_scored: gold.len(),
        n_correct: 0,
        n_answered: 0,
        n_abstained: 0,
        n_missing: 0,
        accuracy: 0.0,
        by_candidates: BTreeMap::new(),
    };
    for (g, hit) in gold.iter().zip(hits) {
        match preds.get(&g.instance_id) {
            None => report.n_missing += 1,
            Some(None) => report.n_abstained += 1,
            Some(Some(_)) => report.n_answered += 1,
        }
        let b = report.by_candidates.entry(g.candidates.len()).or_default();
        b.n += 1;
        if hit {
            b.correct += 1;
            report.n_correct += 1;
        }
    }
    for b in report.by_candidates.values_mut() {
        b.accuracy = b.correct as f64 / b.n as f64;
    }
    report.accuracy = report.n_correct as f64 / report.n_scored as f64;
    Ok(report)
}

pub type Labels = Vec<Option<PseudoId>>;

/// Aligns two prediction sets on their shared ids for agreement scoring.
pub fn aligned_labels(a: &PredictionSet, b: &PredictionSet) -> Result<(Labels, Labels), EvalError> {
    a.check_same_coverage(b)?;
    Ok(a.0.iter().map(|(k, v)| (*v, b.0[k])).unzip())
}
