//! Accuracy, ROC-AUC, confusion counts, stratified folds, and the evaluation
//! report schema.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Stream};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

impl Confusion {
    pub fn total(&self) -> usize {
        self.tp + self.fp + self.tn + self.fn_
    }

    pub fn accuracy(&self) -> f64 {
        (self.tp + self.tn) as f64 / self.total() as f64
    }

    /// True positive rate.
    pub fn sensitivity(&self) -> f64 {
        self.tp as f64 / (self.tp + self.fn_) as f64
    }

    /// False positive rate.
    pub fn fallout(&self) -> f64 {
        self.fp as f64 / (self.fp + self.tn) as f64
    }

    pub fn add(&mut self, other: &Confusion) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.tn += other.tn;
        self.fn_ += other.fn_;
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::ShapeMismatch(format!("{a} predictions for {b} labels")));
    }
    if a == 0 {
        return Err(Error::InvalidArgument("empty prediction vector".into()));
    }
    Ok(())
}

pub fn confusion(preds: &[u8], labels: &[u8]) -> Result<Confusion> {
    check_lengths(preds.len(), labels.len())?;
    let mut c = Confusion::default();
    for (&p, &y) in preds.iter().zip(labels) {
        match (p, y) {
            (1, 1) => c.tp += 1,
            (1, _) => c.fp += 1,
            (_, 1) => c.fn_ += 1,
            _ => c.tn += 1,
        }
    }
    Ok(c)
}

pub fn accuracy(preds: &[u8], labels: &[u8]) -> Result<f64> {
    check_lengths(preds.len(), labels.len())?;
    let hits = preds.iter().zip(labels).filter(|(p, y)| p == y).count();
    Ok(hits as f64 / labels.len() as f64)
}

/// Area under the ROC curve in its Mann-Whitney form: the fraction of
/// (positive, negative) pairs where the positive scores higher, ties counting
/// one half. Computed from mid-ranks in `O(n log n)`.
pub fn auc(scores: &[f64], labels: &[u8]) -> Result<f64> {
    if scores.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} scores for {} labels",
            scores.len(),
            labels.len()
        )));
    }
    let n_pos = labels.iter().filter(|&&y| y == 1).count();
    let n_neg = labels.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::InvalidArgument("AUC needs both classes present".into()));
    }
    if let Some(s) = scores.iter().find(|s| s.is_nan()) {
        return Err(Error::InvalidArgument(format!("score {s} is not a number")));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));

    // sum of 1-based mid-ranks of the positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && scores[order[j]] == scores[order[i]] {
            j += 1;
        }
        let mid_rank = (i + 1 + j) as f64 / 2.0;
        let pos_in_group = order[i..j].iter().filter(|&&k| labels[k] == 1).count();
        rank_sum += mid_rank * pos_in_group as f64;
        i = j;
    }
    let u = rank_sum - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

/// Assign each row to one of `folds` folds, stratified by label.
///
/// Each class is shuffled with its own sub-seed and dealt round-robin; the
/// positive class continues dealing where the negative class stopped, so both
/// per-class and total fold sizes differ by at most one.
pub fn stratified_folds(labels: &[u8], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 folds, got {folds}")));
    }
    if folds > labels.len() {
        return Err(Error::InvalidArgument(format!(
            "{folds} folds requested for {} rows",
            labels.len()
        )));
    }
    let mut assignment = vec![0usize; labels.len()];
    let mut next = 0usize;
    for class in [0u8, 1] {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut seed::rng(seed, Stream::Folds, &[u64::from(class)]));
        for row in members {
            assignment[row] = next % folds;
            next += 1;
        }
    }
    Ok(assignment)
}

/// Whether every fold holds at least one row of each class.
pub fn folds_have_both_classes(assignment: &[usize], labels: &[u8], folds: usize) -> bool {
    let mut seen = vec![[false; 2]; folds];
    for (&f, &y) in assignment.iter().zip(labels) {
        seen[f][y as usize] = true;
    }
    seen.iter().all(|s| s[0] && s[1])
}

/// Metrics for one held-out fold of an outer cross-validation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_rows: usize,
    pub accuracy: f64,
    pub auc_score_based: Option<f64>,
    pub auc_vote_based: Option<f64>,
    pub confusion: Confusion,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub mean_missing_rate_selected: f64,
    pub mean_entropy_delta_selected: f64,
}

/// Pooled held-out evaluation of a feature selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub accuracy: f64,
    pub auc_score_based: f64,
    pub auc_vote_based: f64,
    pub confusion: Confusion,
    pub per_fold: Vec<FoldReport>,
    pub diagnostics: Diagnostics,
    pub selected: Vec<usize>,
    pub selected_names: Vec<String>,
    pub n_ways: usize,
    pub folds: usize,
}
