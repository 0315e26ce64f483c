//! Binary CART classifier with Gini impurity.
//!
//! Split candidates are midpoints between consecutive distinct values of a
//! feature. Candidate scores are compared exactly on integer class counts, so
//! the tie-break order (lower feature index, then lower threshold) does not
//! depend on floating-point rounding or on row order.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::data::Matrix;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeParams {
    /// `None` grows until leaves are pure or unsplittable.
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
}

impl Default for TreeParams {
    fn default() -> Self {
        TreeParams {
            max_depth: None,
            min_samples_split: 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        impurity_decrease: f64,
        n_samples: usize,
        left: Box<Node>,
        right: Box<Node>,
    },
    Leaf {
        class: u8,
        class_counts: [usize; 2],
    },
}

impl Node {
    pub fn n_samples(&self) -> usize {
        match self {
            Node::Split { n_samples, .. } => *n_samples,
            Node::Leaf { class_counts, .. } => class_counts[0] + class_counts[1],
        }
    }

    fn leaf(counts: [usize; 2]) -> Node {
        Node::Leaf {
            class: u8::from(counts[1] > counts[0]),
            class_counts: counts,
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Node::Leaf { .. } => 0,
            Node::Split { left, right, .. } => 1 + left.depth().max(right.depth()),
        }
    }
}

/// A fitted tree. Feature indices refer to columns of the training matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub root: Node,
    pub n_features: usize,
}

/// `sum_c count_c^2` for a two-class node.
#[inline]
fn sum_sq(c: [usize; 2]) -> u128 {
    (c[0] * c[0] + c[1] * c[1]) as u128
}

/// Gini impurity `1 - p0^2 - p1^2`.
pub fn gini(counts: [usize; 2]) -> f64 {
    let n = (counts[0] + counts[1]) as f64;
    if n == 0.0 {
        return 0.0;
    }
    1.0 - sum_sq(counts) as f64 / (n * n)
}

/// Split quality as the exact fraction `SL/nL + SR/nR`; larger means lower
/// weighted child impurity.
#[derive(Debug, Clone, Copy)]
struct SplitScore {
    num: u128,
    den: u128,
}

impl SplitScore {
    fn new(left: [usize; 2], right: [usize; 2]) -> Self {
        let nl = (left[0] + left[1]) as u128;
        let nr = (right[0] + right[1]) as u128;
        SplitScore {
            num: sum_sq(left) * nr + sum_sq(right) * nl,
            den: nl * nr,
        }
    }

    fn cmp(&self, other: &SplitScore) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }

    /// Whether the split strictly lowers impurity of a parent with `counts`.
    fn improves(&self, counts: [usize; 2]) -> bool {
        let n = (counts[0] + counts[1]) as u128;
        self.num * n > sum_sq(counts) * self.den
    }

    fn impurity_decrease(&self, counts: [usize; 2]) -> f64 {
        let n = (counts[0] + counts[1]) as f64;
        let q = self.num as f64 / self.den as f64;
        ((q - sum_sq(counts) as f64 / n) / n).max(0.0)
    }
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    score: SplitScore,
}

/// Midpoint of two distinct sorted values; never rounds onto `hi`.
#[inline]
pub(crate) fn midpoint(lo: f64, hi: f64) -> f64 {
    let mid = (lo + hi) / 2.0;
    if mid >= hi || mid < lo {
        lo
    } else {
        mid
    }
}

fn check_inputs(x: &Matrix, y: &[u8]) -> Result<()> {
    if x.n_rows() == 0 || x.n_cols() == 0 {
        return Err(Error::InvalidArgument("cannot fit a tree on an empty matrix".into()));
    }
    if y.len() != x.n_rows() {
        return Err(Error::ShapeMismatch(format!(
            "{} labels for {} rows",
            y.len(),
            x.n_rows()
        )));
    }
    if let Some(bad) = y.iter().find(|&&v| v > 1) {
        return Err(Error::InvalidArgument(format!("labels must be binary, found {bad}")));
    }
    Ok(())
}

struct Builder<'a> {
    x: &'a Matrix,
    y: &'a [u8],
    features: &'a [usize],
    params: TreeParams,
    buf: Vec<(f64, u8)>,
}

impl Builder<'_> {
    fn counts(&self, rows: &[usize]) -> [usize; 2] {
        let pos = rows.iter().filter(|&&r| self.y[r] == 1).count();
        [rows.len() - pos, pos]
    }

    fn best_split(&mut self, rows: &[usize], counts: [usize; 2]) -> Option<BestSplit> {
        let mut best: Option<BestSplit> = None;
        for &f in self.features {
            self.buf.clear();
            self.buf.extend(rows.iter().map(|&r| (self.x.get(r, f), self.y[r])));
            self.buf.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0usize; 2];
            for i in 0..self.buf.len() - 1 {
                let (v, label) = self.buf[i];
                left[label as usize] += 1;
                let next = self.buf[i + 1].0;
                if next <= v {
                    continue;
                }
                let right = [counts[0] - left[0], counts[1] - left[1]];
                let score = SplitScore::new(left, right);
                if !score.improves(counts) {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some(b) => score.cmp(&b.score) == Ordering::Greater,
                };
                if better {
                    best = Some(BestSplit {
                        feature: f,
                        threshold: midpoint(v, next),
                        score,
                    });
                }
            }
        }
        best
    }

    fn grow(&mut self, rows: Vec<usize>, depth: usize) -> Node {
        let counts = self.counts(&rows);
        let pure = counts[0] == 0 || counts[1] == 0;
        let at_depth = self.params.max_depth.is_some_and(|d| depth >= d);
        if pure || rows.len() < self.params.min_samples_split || at_depth {
            return Node::leaf(counts);
        }
        let Some(split) = self.best_split(&rows, counts) else {
            return Node::leaf(counts);
        };
        let n_samples = rows.len();
        let (left_rows, right_rows): (Vec<usize>, Vec<usize>) = rows
            .into_iter()
            .partition(|&r| self.x.get(r, split.feature) <= split.threshold);
        Node::Split {
            feature: split.feature,
            threshold: split.threshold,
            impurity_decrease: split.score.impurity_decrease(counts),
            n_samples,
            left: Box::new(self.grow(left_rows, depth + 1)),
            right: Box::new(self.grow(right_rows, depth + 1)),
        }
    }
}

/// Fit a tree using every column of `x`.
pub fn fit(x: &Matrix, y: &[u8], params: &TreeParams) -> Result<DecisionTree> {
    let features: Vec<usize> = (0..x.n_cols()).collect();
    fit_features(x, y, &features, params)
}

/// Fit a tree that may only split on `features` (indices into `x`'s columns).
pub fn fit_features(x: &Matrix, y: &[u8], features: &[usize], params: &TreeParams) -> Result<DecisionTree> {
    check_inputs(x, y)?;
    if let Some(&f) = features.iter().find(|&&f| f >= x.n_cols()) {
        return Err(Error::InvalidArgument(format!(
            "feature {f} out of range for {} columns",
            x.n_cols()
        )));
    }
    let mut sorted = features.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let mut builder = Builder {
        x,
        y,
        features: &sorted,
        params: TreeParams {
            min_samples_split: params.min_samples_split.max(2),
            ..*params
        },
        buf: Vec::with_capacity(x.n_rows()),
    };
    let root = builder.grow((0..x.n_rows()).collect(), 0);
    Ok(DecisionTree {
        root,
        n_features: x.n_cols(),
    })
}

impl DecisionTree {
    fn leaf_for(&self, row: &[f64]) -> (u8, [usize; 2]) {
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { class, class_counts } => return (*class, *class_counts),
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    node = if row[*feature] <= *threshold { left } else { right };
                }
            }
        }
    }

    fn check_width(&self, x: &Matrix) -> Result<()> {
        if x.n_cols() != self.n_features {
            return Err(Error::ShapeMismatch(format!(
                "tree was trained on {} features, got {}",
                self.n_features,
                x.n_cols()
            )));
        }
        Ok(())
    }

    pub fn predict(&self, x: &Matrix) -> Result<Vec<u8>> {
        self.check_width(x)?;
        Ok((0..x.n_rows()).map(|r| self.leaf_for(x.row(r)).0).collect())
    }

    pub fn predict_row(&self, row: &[f64]) -> u8 {
        self.leaf_for(row).0
    }

    /// Fraction of positive training samples in the leaf each row lands in.
    pub fn predict_proba(&self, x: &Matrix) -> Result<Vec<f64>> {
        self.check_width(x)?;
        Ok((0..x.n_rows())
            .map(|r| {
                let (_, c) = self.leaf_for(x.row(r));
                c[1] as f64 / (c[0] + c[1]) as f64
            })
            .collect())
    }

    /// Sample-weighted impurity decrease per feature, normalized to sum 1.
    /// A single-leaf tree yields all zeros.
    pub fn importances(&self) -> Vec<f64> {
        let total = self.root.n_samples() as f64;
        let mut imp = vec![0.0; self.n_features];
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            if let Node::Split {
                feature,
                impurity_decrease,
                n_samples,
                left,
                right,
                ..
            } = node
            {
                imp[*feature] += *n_samples as f64 / total * impurity_decrease;
                stack.push(left);
                stack.push(right);
            }
        }
        let sum: f64 = imp.iter().sum();
        if sum > 0.0 {
            imp.iter_mut().for_each(|v| *v /= sum);
        }
        imp
    }

    /// Sorted indices of features used by at least one split.
    pub fn split_features(&self) -> Vec<usize> {
        let mut used = vec![false; self.n_features];
        let mut stack = vec![&self.root];
        while let Some(node) = stack.pop() {
            if let Node::Split {
                feature, left, right, ..
            } = node
            {
                used[*feature] = true;
                stack.push(left);
                stack.push(right);
            }
        }
        (0..self.n_features).filter(|&f| used[f]).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}
