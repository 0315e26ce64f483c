//! n-way undersampling ensemble.
//!
//! Every way trains on all positive rows plus an equal-sized random sample of
//! negative rows. Each way's tree is scored by stratified cross-validation on
//! the way's own rows, then refitted on all of them to yield the feature
//! importances and (optionally) an RFE ranking that the aggregators consume.
//! Predictions are combined by simple majority vote.

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::aggregate::AggregationMethod;
use crate::cart::{fit, fit_features, DecisionTree, TreeParams};
use crate::data::Matrix;
use crate::error::{Error, Result};
use crate::metrics::{
    accuracy, auc, confusion, folds_have_both_classes, stratified_folds, Confusion, Diagnostics, EvalReport, FoldReport,
};
use crate::rfe::{rfe_rank, RankList};
use crate::seed::{self, Stream};

/// Attempts at dealing folds before giving up on a degenerate split.
pub const MAX_FOLD_ATTEMPTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnsembleConfig {
    pub n_ways: usize,
    pub n_features: usize,
    pub cv_folds: usize,
    pub seed: u64,
    pub aggregation: AggregationMethod,
    pub tree: TreeParams,
    pub rfe_step: usize,
    /// Compute RFE rank lists even when `aggregation` does not need them.
    pub compute_ranks: bool,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        EnsembleConfig {
            n_ways: 91,
            n_features: 20,
            cv_folds: 10,
            seed: 0,
            aggregation: AggregationMethod::Caa,
            tree: TreeParams::default(),
            rfe_step: 1,
            compute_ranks: false,
        }
    }
}

impl EnsembleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_ways == 0 || self.n_ways.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "n_ways must be a positive odd number for majority voting, got {}",
                self.n_ways
            )));
        }
        if self.n_features == 0 {
            return Err(Error::Config("n_features must be at least 1".into()));
        }
        if self.cv_folds < 2 {
            return Err(Error::Config(format!(
                "cv_folds must be at least 2, got {}",
                self.cv_folds
            )));
        }
        if self.rfe_step == 0 {
            return Err(Error::Config("rfe_step must be at least 1".into()));
        }
        Ok(())
    }

    fn wants_ranks(&self) -> bool {
        self.compute_ranks || self.aggregation.needs_ranks()
    }
}

/// One undersampled training instance and what was learned from it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WayModel {
    pub way_index: usize,
    pub row_ids: Vec<usize>,
    pub tree: DecisionTree,
    pub cv_accuracy: f64,
    pub cv_auc: f64,
    pub rank_list: Option<RankList>,
    /// Features with positive importance in the final tree, ascending.
    pub positive_set: Vec<usize>,
}

/// Balanced row sets: every positive row plus `|P|` negatives drawn without
/// replacement, independently per way. Row ids are returned ascending.
pub fn make_ways(labels: &[u8], n_ways: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let positives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 1).collect();
    let negatives: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == 0).collect();
    if positives.is_empty() {
        return Err(Error::Degenerate("no positive rows to undersample against".into()));
    }
    if negatives.len() < positives.len() {
        return Err(Error::Degenerate(format!(
            "{} negative rows cannot match {} positive rows",
            negatives.len(),
            positives.len()
        )));
    }
    Ok((0..n_ways)
        .map(|w| {
            let mut rng = seed::rng(seed, Stream::Ways, &[w as u64]);
            let mut rows = positives.clone();
            rows.extend(
                sample(&mut rng, negatives.len(), positives.len())
                    .into_iter()
                    .map(|i| negatives[i]),
            );
            rows.sort_unstable();
            rows
        })
        .collect())
}

/// Stratified fold assignment, re-dealt with fresh sub-seeds until every fold
/// holds both classes.
pub fn deal_folds(labels: &[u8], folds: usize, stream: Stream, seed: u64, coords: &[u64]) -> Result<Vec<usize>> {
    for attempt in 0..MAX_FOLD_ATTEMPTS {
        let mut c = coords.to_vec();
        c.push(attempt as u64);
        let assignment = stratified_folds(labels, folds, seed::derive(seed, stream, &c))?;
        if folds_have_both_classes(&assignment, labels, folds) {
            return Ok(assignment);
        }
    }
    Err(Error::FoldDegeneracy {
        folds,
        attempts: MAX_FOLD_ATTEMPTS,
    })
}

/// Pooled held-out accuracy and AUC of single trees under `folds`-fold CV.
/// The AUC score is the positive fraction of the leaf each row lands in.
pub fn cross_validate(
    x: &Matrix,
    y: &[u8],
    assignment: &[usize],
    folds: usize,
    params: &TreeParams,
) -> Result<(f64, f64)> {
    let mut preds = vec![0u8; y.len()];
    let mut scores = vec![0.0; y.len()];
    for f in 0..folds {
        let train: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] != f).collect();
        let test: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] == f).collect();
        let train_y: Vec<u8> = train.iter().map(|&i| y[i]).collect();
        let tree = fit(&x.select_rows(&train), &train_y, params)?;
        let test_x = x.select_rows(&test);
        let p = tree.predict(&test_x)?;
        let s = tree.predict_proba(&test_x)?;
        for (k, &i) in test.iter().enumerate() {
            preds[i] = p[k];
            scores[i] = s[k];
        }
    }
    Ok((accuracy(&preds, y)?, auc(&scores, y)?))
}

fn fit_way(x: &Matrix, y: &[u8], way_index: usize, rows: &[usize], cfg: &EnsembleConfig) -> Result<WayModel> {
    let wx = x.select_rows(rows);
    let wy: Vec<u8> = rows.iter().map(|&r| y[r]).collect();
    let assignment = deal_folds(&wy, cfg.cv_folds, Stream::WayFolds, cfg.seed, &[way_index as u64])?;
    let (cv_accuracy, cv_auc) = cross_validate(&wx, &wy, &assignment, cfg.cv_folds, &cfg.tree)?;
    let tree = fit(&wx, &wy, &cfg.tree)?;
    let positive_set = tree.split_features();
    let rank_list = if cfg.wants_ranks() {
        Some(rfe_rank(&wx, &wy, cfg.rfe_step, &cfg.tree)?)
    } else {
        None
    };
    Ok(WayModel {
        way_index,
        row_ids: rows.to_vec(),
        tree,
        cv_accuracy,
        cv_auc,
        rank_list,
        positive_set,
    })
}

/// Cross-validate, refit and rank every way. Ways run in parallel; the output
/// is ordered by way index.
pub fn fit_ways(x: &Matrix, y: &[u8], ways: &[Vec<usize>], cfg: &EnsembleConfig) -> Result<Vec<WayModel>> {
    if y.len() != x.n_rows() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} rows",
            y.len(),
            x.n_rows()
        )));
    }
    ways.par_iter()
        .enumerate()
        .map(|(w, rows)| fit_way(x, y, w, rows, cfg))
        .collect()
}

/// Number of trees voting positive for each row.
pub fn positive_votes(trees: &[DecisionTree], x: &Matrix) -> Result<Vec<usize>> {
    let mut votes = vec![0usize; x.n_rows()];
    for tree in trees {
        for (v, p) in votes.iter_mut().zip(tree.predict(x)?) {
            *v += p as usize;
        }
    }
    Ok(votes)
}

/// 1 where strictly more than half of the trees vote 1.
pub fn majority_vote_trees(trees: &[DecisionTree], x: &Matrix) -> Result<Vec<u8>> {
    if trees.len().is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "majority vote needs an odd number of models, got {}",
            trees.len()
        )));
    }
    Ok(positive_votes(trees, x)?
        .into_iter()
        .map(|v| u8::from(2 * v > trees.len()))
        .collect())
}

pub fn majority_vote(models: &[WayModel], x: &Matrix) -> Result<Vec<u8>> {
    let trees: Vec<DecisionTree> = models.iter().map(|m| m.tree.clone()).collect();
    majority_vote_trees(&trees, x)
}

/// Outer stratified cross-validation of the ensemble restricted to `selected`.
///
/// Each outer fold undersamples its own training rows into `n_ways` ways,
/// fits one tree per way on the selected columns and votes on the held-out
/// rows. Accuracy uses the majority vote; the score-based AUC uses the
/// fraction of positive votes, the vote-based AUC the binary vote.
pub fn evaluate(
    x: &Matrix,
    y: &[u8],
    selected: &[usize],
    cfg: &EnsembleConfig,
    diagnostics: Diagnostics,
) -> Result<EvalReport> {
    cfg.validate()?;
    if y.len() != x.n_rows() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} rows",
            y.len(),
            x.n_rows()
        )));
    }
    if selected.is_empty() {
        return Err(Error::InvalidArgument("no features selected".into()));
    }
    if let Some(&f) = selected.iter().find(|&&f| f >= x.n_cols()) {
        return Err(Error::InvalidArgument(format!(
            "selected feature {f} out of range for {} features",
            x.n_cols()
        )));
    }
    let n_pos = y.iter().filter(|&&v| v == 1).count();
    if n_pos == 0 || n_pos == y.len() {
        return Err(Error::Degenerate("evaluation needs both classes present".into()));
    }
    let folds = cfg.cv_folds;
    let assignment = deal_folds(y, folds, Stream::OuterFolds, cfg.seed, &[])?;
    let xs = x.select_cols(selected);

    let mut votes = vec![0usize; y.len()];
    for f in 0..folds {
        let train: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] != f).collect();
        let test: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] == f).collect();
        let train_y: Vec<u8> = train.iter().map(|&i| y[i]).collect();
        let way_seed = seed::derive(cfg.seed, Stream::Ways, &[f as u64]);
        let ways = make_ways(&train_y, cfg.n_ways, way_seed)?;
        let features: Vec<usize> = (0..selected.len()).collect();
        let trees: Vec<DecisionTree> = ways
            .par_iter()
            .map(|way| {
                let rows: Vec<usize> = way.iter().map(|&k| train[k]).collect();
                let wy: Vec<u8> = rows.iter().map(|&r| y[r]).collect();
                fit_features(&xs.select_rows(&rows), &wy, &features, &cfg.tree)
            })
            .collect::<Result<_>>()?;
        let fold_votes = positive_votes(&trees, &xs.select_rows(&test))?;
        for (&i, v) in test.iter().zip(fold_votes) {
            votes[i] = v;
        }
    }

    let n_ways = cfg.n_ways;
    let preds: Vec<u8> = votes.iter().map(|&v| u8::from(2 * v > n_ways)).collect();
    let scores: Vec<f64> = votes.iter().map(|&v| v as f64 / n_ways as f64).collect();

    let mut per_fold = Vec::with_capacity(folds);
    let mut pooled = Confusion::default();
    for f in 0..folds {
        let idx: Vec<usize> = (0..y.len()).filter(|&i| assignment[i] == f).collect();
        let fy: Vec<u8> = idx.iter().map(|&i| y[i]).collect();
        let fp: Vec<u8> = idx.iter().map(|&i| preds[i]).collect();
        let fs: Vec<f64> = idx.iter().map(|&i| scores[i]).collect();
        let c = confusion(&fp, &fy)?;
        pooled.add(&c);
        let fvote: Vec<f64> = fp.iter().map(|&p| f64::from(p)).collect();
        per_fold.push(FoldReport {
            fold: f,
            n_rows: idx.len(),
            accuracy: c.accuracy(),
            auc_score_based: auc(&fs, &fy).ok(),
            auc_vote_based: auc(&fvote, &fy).ok(),
            confusion: c,
        });
    }
    let vote_scores: Vec<f64> = preds.iter().map(|&p| f64::from(p)).collect();
    Ok(EvalReport {
        accuracy: pooled.accuracy(),
        auc_score_based: auc(&scores, y)?,
        auc_vote_based: auc(&vote_scores, y)?,
        confusion: pooled,
        per_fold,
        diagnostics,
        selected: selected.to_vec(),
        selected_names: Vec::new(),
        n_ways,
        folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(pos: usize, neg: usize) -> Vec<u8> {
        let mut y = vec![1u8; pos];
        y.extend(vec![0u8; neg]);
        y
    }

    #[test]
    fn ways_are_balanced() {
        let y = labels(5, 50);
        let ways = make_ways(&y, 91, 3).unwrap();
        assert_eq!(ways.len(), 91);
        for w in &ways {
            assert_eq!(w.len(), 10);
            assert_eq!(w.iter().filter(|&&r| y[r] == 1).count(), 5);
            let mut d = w.clone();
            d.dedup();
            assert_eq!(d.len(), 10);
        }
        assert_eq!(ways, make_ways(&y, 91, 3).unwrap());
        assert_ne!(ways, make_ways(&y, 91, 4).unwrap());
    }

    #[test]
    fn balanced_input_uses_every_row() {
        let y = labels(6, 6);
        for w in make_ways(&y, 3, 0).unwrap() {
            assert_eq!(w, (0..12).collect::<Vec<_>>());
        }
    }

    #[test]
    fn make_ways_errors() {
        assert!(make_ways(&labels(0, 5), 3, 0).is_err());
        assert!(make_ways(&labels(5, 4), 3, 0).is_err());
    }

    #[test]
    fn vote_examples() {
        let x = Matrix::new(1, 1, vec![0.5]);
        let yes = fit(&Matrix::new(2, 1, vec![0.0, 1.0]), &[1, 1], &TreeParams::default()).unwrap();
        let no = fit(&Matrix::new(2, 1, vec![0.0, 1.0]), &[0, 0], &TreeParams::default()).unwrap();
        let trees = vec![yes.clone(), yes.clone(), no.clone()];
        assert_eq!(majority_vote_trees(&trees, &x).unwrap(), vec![1]);
        assert!(majority_vote_trees(&trees[..2], &x).is_err());
        assert_eq!(majority_vote_trees(&[no], &x).unwrap(), vec![0]);
    }

    #[test]
    fn config_validation() {
        let mut cfg = EnsembleConfig::default();
        assert!(cfg.validate().is_ok());
        cfg.n_ways = 90;
        assert!(matches!(cfg.validate(), Err(Error::Config(_))));
    }

    #[test]
    fn evaluate_rejects_single_class() {
        let x = Matrix::new(20, 1, (0..20).map(f64::from).collect());
        let y = vec![0u8; 20];
        let diag = Diagnostics {
            mean_missing_rate_selected: 0.0,
            mean_entropy_delta_selected: 0.0,
        };
        assert!(evaluate(&x, &y, &[0], &EnsembleConfig::default(), diag).is_err());
    }

    #[test]
    fn small_ways_fail_fold_dealing() {
        // 3 rows per class cannot populate 10 folds with both classes
        let y = labels(3, 3);
        let assignment = deal_folds(&y, 4, Stream::WayFolds, 0, &[0]);
        assert!(matches!(assignment, Err(Error::FoldDegeneracy { .. })));
    }
}
