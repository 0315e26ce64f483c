//! Recursive feature elimination over CART importances.

use serde::{Deserialize, Serialize};

use crate::cart::{fit_features, TreeParams};
use crate::data::Matrix;
use crate::error::{Error, Result};

/// Per-feature rank, a permutation of `1..=F` where 1 is best.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RankList(pub Vec<usize>);

impl RankList {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn rank(&self, feature: usize) -> usize {
        self.0[feature]
    }

    /// Whether the ranks form a permutation of `1..=len`.
    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        self.0
            .iter()
            .all(|&r| (1..=seen.len()).contains(&r) && !std::mem::replace(&mut seen[r - 1], true))
    }

    /// Features ordered best first.
    pub fn order(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.0.len()).collect();
        order.sort_by_key(|&f| self.0[f]);
        order
    }
}

/// Rank every column of `x` by repeatedly fitting a tree and eliminating the
/// `step` least important surviving features.
///
/// Eliminated features take the worst ranks still free; among equal
/// importances the higher index goes first. When `step` or fewer features
/// remain, or every survivor has zero importance, the survivors take ranks
/// `1..` ordered by importance (descending) and then index.
pub fn rfe_rank(x: &Matrix, y: &[u8], step: usize, params: &TreeParams) -> Result<RankList> {
    let n_features = x.n_cols();
    if n_features == 0 {
        return Err(Error::InvalidArgument("cannot rank an empty feature set".into()));
    }
    if step == 0 {
        return Err(Error::InvalidArgument("RFE step must be at least 1".into()));
    }
    let mut ranks = vec![0usize; n_features];
    let mut survivors: Vec<usize> = (0..n_features).collect();
    let mut next_worst = n_features;
    let mut tree = fit_features(x, y, &survivors, params)?;

    loop {
        let imp = tree.importances();
        if survivors.len() <= step || survivors.iter().all(|&f| imp[f] == 0.0) {
            survivors.sort_by(|&a, &b| imp[b].total_cmp(&imp[a]).then(a.cmp(&b)));
            for (i, &f) in survivors.iter().enumerate() {
                ranks[f] = i + 1;
            }
            break;
        }
        let mut order = survivors.clone();
        order.sort_by(|&a, &b| imp[a].total_cmp(&imp[b]).then(b.cmp(&a)));
        let removed = &order[..step];
        for &f in removed {
            ranks[f] = next_worst;
            next_worst -= 1;
        }
        survivors.retain(|f| !removed.contains(f));
        // Dropping features the tree never split on leaves the fitted tree unchanged.
        if removed.iter().any(|&f| imp[f] > 0.0) {
            tree = fit_features(x, y, &survivors, params)?;
        }
    }
    Ok(RankList(ranks))
}
