//! Ensemble feature-selection aggregators.
//!
//! Rank-list aggregators (CLA, WMA) sum per-way rank positions and keep the
//! smallest totals. Occurrence aggregators (OFA, CAA, MAA, EAA) count, or
//! weight, the ways whose final tree gave a feature positive importance and
//! keep the largest totals. MAA and EAA divide each way's accuracy by a
//! per-feature penalty built from the missing rate or the entropy change
//! caused by imputation.

use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use serde::{Deserialize, Serialize};

use crate::data::{ColumnKind, Dataset};
use crate::error::{Error, Result};
use crate::rfe::RankList;
use crate::seed::{self, Stream};

pub const DEFAULT_ENTROPY_BINS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AggregationMethod {
    Cla,
    Wma,
    Ofa,
    Caa,
    Maa,
    Eaa,
}

impl AggregationMethod {
    pub const ALL: [AggregationMethod; 6] = [
        AggregationMethod::Cla,
        AggregationMethod::Wma,
        AggregationMethod::Ofa,
        AggregationMethod::Caa,
        AggregationMethod::Maa,
        AggregationMethod::Eaa,
    ];

    /// Whether the method consumes per-way RFE rank lists.
    pub fn needs_ranks(self) -> bool {
        matches!(self, AggregationMethod::Cla | AggregationMethod::Wma)
    }

    pub fn direction(self) -> Direction {
        if self.needs_ranks() {
            Direction::LowerIsBetter
        } else {
            Direction::HigherIsBetter
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            AggregationMethod::Cla => "cla",
            AggregationMethod::Wma => "wma",
            AggregationMethod::Ofa => "ofa",
            AggregationMethod::Caa => "caa",
            AggregationMethod::Maa => "maa",
            AggregationMethod::Eaa => "eaa",
        }
    }
}

impl fmt::Display for AggregationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for AggregationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        AggregationMethod::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| {
                Error::InvalidArgument(format!(
                    "unknown aggregation method '{s}' (expected cla, wma, ofa, caa, maa or eaa)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    LowerIsBetter,
    HigherIsBetter,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateScores {
    pub method: AggregationMethod,
    pub per_feature_score: Vec<f64>,
    pub direction: Direction,
    /// Best first; ties go to the lower feature index.
    pub selected: Vec<usize>,
}

/// `alpha` offsets the penalty term and `beta` is its exponent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceWeightParams {
    alpha: f64,
    beta: f64,
}

impl VarianceWeightParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidArgument(format!("alpha must be > 0, got {alpha}")));
        }
        if !(beta >= 0.0 && beta.is_finite()) {
            return Err(Error::InvalidArgument(format!("beta must be >= 0, got {beta}")));
        }
        Ok(VarianceWeightParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn maa_default() -> Self {
        VarianceWeightParams { alpha: 1.0, beta: 2.0 }
    }

    pub fn eaa_default() -> Self {
        VarianceWeightParams { alpha: 0.5, beta: 2.0 }
    }

    fn penalty(&self, x: f64) -> f64 {
        (x + self.alpha).powf(self.beta)
    }
}

pub fn maa_weight(accuracy: f64, missing_rate: f64, p: &VarianceWeightParams) -> f64 {
    accuracy / p.penalty(missing_rate)
}

pub fn eaa_weight(accuracy: f64, delta_entropy: f64, p: &VarianceWeightParams) -> f64 {
    accuracy / p.penalty(delta_entropy)
}

/// Order-independent sum: terms are added smallest first.
fn ordered_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(f64::total_cmp);
    terms.into_iter().fold(0.0, |acc, t| acc + t)
}

/// Top `min(k, F)` features in `direction` order, ties to the lower index.
pub fn select_top(scores: &[f64], direction: Direction, k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        let by_score = match direction {
            Direction::LowerIsBetter => scores[a].total_cmp(&scores[b]),
            Direction::HigherIsBetter => scores[b].total_cmp(&scores[a]),
        };
        by_score.then(a.cmp(&b))
    });
    order.truncate(k.min(scores.len()));
    order
}

fn finish(method: AggregationMethod, scores: Vec<f64>, k: usize) -> AggregateScores {
    let direction = method.direction();
    AggregateScores {
        method,
        selected: select_top(&scores, direction, k),
        per_feature_score: scores,
        direction,
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 1 {
        return Err(Error::InvalidArgument(
            "number of selected features must be >= 1".into(),
        ));
    }
    Ok(())
}

fn check_fractions(name: &str, values: &[f64], expected: usize) -> Result<()> {
    if values.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "{} {name} values for {expected} ways",
            values.len()
        )));
    }
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidArgument(format!("{name} {v} outside [0, 1]")));
    }
    Ok(())
}

fn check_ranks(ranks: &[RankList]) -> Result<usize> {
    let first = ranks
        .first()
        .ok_or_else(|| Error::InvalidArgument("at least one rank list is required".into()))?;
    let f = first.len();
    for r in ranks {
        if r.len() != f {
            return Err(Error::ShapeMismatch(format!(
                "rank lists of length {f} and {}",
                r.len()
            )));
        }
        if !r.is_permutation() {
            return Err(Error::InvalidArgument("rank list is not a permutation of 1..F".into()));
        }
    }
    Ok(f)
}

fn check_sets(sets: &[Vec<usize>], n_features: usize) -> Result<()> {
    if sets.is_empty() {
        return Err(Error::InvalidArgument("at least one feature set is required".into()));
    }
    for s in sets {
        if let Some(&f) = s.iter().find(|&&f| f >= n_features) {
            return Err(Error::InvalidArgument(format!(
                "feature {f} out of range for {n_features} features"
            )));
        }
    }
    Ok(())
}

/// Complete linear aggregation: sum of ranks, smallest wins.
pub fn cla(ranks: &[RankList], k: usize) -> Result<AggregateScores> {
    check_k(k)?;
    let f = check_ranks(ranks)?;
    let scores = (0..f)
        .map(|j| ordered_sum(ranks.iter().map(|r| r.rank(j) as f64).collect()))
        .collect();
    Ok(finish(AggregationMethod::Cla, scores, k))
}

/// Weighted mean aggregation: ranks weighted by `1 - AUC` of their way.
pub fn wma(ranks: &[RankList], cv_aucs: &[f64], k: usize) -> Result<AggregateScores> {
    check_k(k)?;
    let f = check_ranks(ranks)?;
    check_fractions("AUC", cv_aucs, ranks.len())?;
    let scores = (0..f)
        .map(|j| {
            ordered_sum(
                ranks
                    .iter()
                    .zip(cv_aucs)
                    .map(|(r, auc)| (1.0 - auc) * r.rank(j) as f64)
                    .collect(),
            )
        })
        .collect();
    Ok(finish(AggregationMethod::Wma, scores, k))
}

/// Per-feature sum of `weights[w]` over the ways whose set contains it.
fn weighted_occurrence(sets: &[Vec<usize>], weights: &[f64], n_features: usize) -> Vec<f64> {
    let mut terms: Vec<Vec<f64>> = vec![Vec::new(); n_features];
    for (set, &w) in sets.iter().zip(weights) {
        for &f in set {
            terms[f].push(w);
        }
    }
    terms.into_iter().map(ordered_sum).collect()
}

/// Occurrence frequency: number of ways in which the feature was used.
pub fn ofa(positive_sets: &[Vec<usize>], n_features: usize, k: usize) -> Result<AggregateScores> {
    check_k(k)?;
    check_sets(positive_sets, n_features)?;
    let ones = vec![1.0; positive_sets.len()];
    let scores = weighted_occurrence(positive_sets, &ones, n_features);
    Ok(finish(AggregationMethod::Ofa, scores, k))
}

/// Occurrence counts weighted by each way's cross-validated accuracy.
pub fn caa(
    positive_sets: &[Vec<usize>],
    cv_accuracies: &[f64],
    n_features: usize,
    k: usize,
) -> Result<AggregateScores> {
    check_k(k)?;
    check_sets(positive_sets, n_features)?;
    check_fractions("accuracy", cv_accuracies, positive_sets.len())?;
    let scores = weighted_occurrence(positive_sets, cv_accuracies, n_features);
    Ok(finish(AggregationMethod::Caa, scores, k))
}

/// Sum over ways of `accuracy / (penalty(f) + alpha)^beta`. The weight is
/// linear in accuracy and the penalty depends only on the feature, so the
/// per-feature accuracy total is divided once.
fn penalized_occurrence(
    method: AggregationMethod,
    positive_sets: &[Vec<usize>],
    cv_accuracies: &[f64],
    penalties: &[f64],
    p: &VarianceWeightParams,
    k: usize,
) -> Result<AggregateScores> {
    check_k(k)?;
    let n_features = penalties.len();
    check_sets(positive_sets, n_features)?;
    check_fractions("accuracy", cv_accuracies, positive_sets.len())?;
    let totals = weighted_occurrence(positive_sets, cv_accuracies, n_features);
    let scores = totals
        .iter()
        .zip(penalties)
        .map(|(&acc, &x)| match method {
            AggregationMethod::Maa => maa_weight(acc, x, p),
            _ => eaa_weight(acc, x, p),
        })
        .collect();
    Ok(finish(method, scores, k))
}

/// Missing-rate and accuracy based aggregation.
pub fn maa(
    positive_sets: &[Vec<usize>],
    cv_accuracies: &[f64],
    missing_rates: &[f64],
    p: &VarianceWeightParams,
    k: usize,
) -> Result<AggregateScores> {
    if let Some(m) = missing_rates.iter().find(|m| !(0.0..=1.0).contains(*m)) {
        return Err(Error::InvalidArgument(format!("missing rate {m} outside [0, 1]")));
    }
    penalized_occurrence(
        AggregationMethod::Maa,
        positive_sets,
        cv_accuracies,
        missing_rates,
        p,
        k,
    )
}

/// Entropy-change and accuracy based aggregation.
pub fn eaa(
    positive_sets: &[Vec<usize>],
    cv_accuracies: &[f64],
    deltas: &EntropyDelta,
    p: &VarianceWeightParams,
    k: usize,
) -> Result<AggregateScores> {
    if let Some(d) = deltas.delta.iter().find(|d| !(**d >= 0.0 && d.is_finite())) {
        return Err(Error::InvalidArgument(format!(
            "entropy change {d} must be finite and >= 0"
        )));
    }
    penalized_occurrence(
        AggregationMethod::Eaa,
        positive_sets,
        cv_accuracies,
        &deltas.delta,
        p,
        k,
    )
}

/// `k` distinct features drawn uniformly, as a selection baseline.
pub fn random_selection(n_features: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = seed::rng(seed, Stream::RandomSelection, &[]);
    sample(&mut rng, n_features, k.min(n_features)).into_vec()
}

/// Per-feature Shannon entropy (bits) before and after imputation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyDelta {
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    /// `|after - before|`.
    pub delta: Vec<f64>,
}

impl EntropyDelta {
    pub fn from_deltas(delta: Vec<f64>) -> Self {
        EntropyDelta {
            before: vec![0.0; delta.len()],
            after: vec![0.0; delta.len()],
            delta,
        }
    }
}

/// Shannon entropy in bits of a histogram.
pub fn shannon_entropy(counts: &[usize]) -> f64 {
    let total: usize = counts.iter().sum();
    if total == 0 {
        return 0.0;
    }
    let n = total as f64;
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}

/// Equal-width histogram over `[min, max]`; the top edge falls in the last bin.
fn histogram(values: impl Iterator<Item = f64>, min: f64, max: f64, bins: usize) -> Vec<usize> {
    let mut counts = vec![0usize; bins];
    let width = max - min;
    for v in values {
        let b = (((v - min) / width) * bins as f64).floor() as usize;
        counts[b.min(bins - 1)] += 1;
    }
    counts
}

/// Entropy change of each feature caused by filling its missing cells.
///
/// Categorical features use category frequencies. Numerical features use
/// `bins` equal-width bins over the range spanned by both versions; a constant
/// range has zero entropy. "Before" counts present cells only.
pub fn entropy_delta(before: &Dataset, after: &Dataset, bins: usize) -> Result<EntropyDelta> {
    if bins == 0 {
        return Err(Error::InvalidArgument("entropy needs at least one bin".into()));
    }
    if before.n_rows() != after.n_rows()
        || before.n_features() != after.n_features()
        || before
            .columns()
            .iter()
            .zip(after.columns())
            .any(|(a, b)| a.kind != b.kind || a.n_categories() != b.n_categories())
    {
        return Err(Error::ShapeMismatch(format!(
            "before is {}x{}, after is {}x{} or column kinds differ",
            before.n_rows(),
            before.n_features(),
            after.n_rows(),
            after.n_features()
        )));
    }
    if !after.is_complete() {
        return Err(Error::InvalidArgument("'after' dataset still has missing cells".into()));
    }
    let mut out = EntropyDelta {
        before: Vec::with_capacity(before.n_features()),
        after: Vec::with_capacity(before.n_features()),
        delta: Vec::with_capacity(before.n_features()),
    };
    for (c, col) in before.columns().iter().enumerate() {
        let (h_before, h_after) = match col.kind {
            ColumnKind::Categorical => {
                let count = |d: &Dataset| {
                    let mut counts = vec![0usize; col.n_categories()];
                    for v in d.column_values(c).flatten() {
                        counts[v as usize] += 1;
                    }
                    shannon_entropy(&counts)
                };
                (count(before), count(after))
            }
            ColumnKind::Numerical => {
                let (min, max) = before
                    .column_values(c)
                    .chain(after.column_values(c))
                    .flatten()
                    .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
                if max > min {
                    let hb = histogram(before.column_values(c).flatten(), min, max, bins);
                    let ha = histogram(after.column_values(c).flatten(), min, max, bins);
                    (shannon_entropy(&hb), shannon_entropy(&ha))
                } else {
                    (0.0, 0.0)
                }
            }
        };
        out.before.push(h_before);
        out.after.push(h_after);
        out.delta.push((h_after - h_before).abs());
    }
    Ok(out)
}
