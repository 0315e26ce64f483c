//! Independent reference implementations used by the integration tests.
//!
//! Each oracle is written the slow, obvious way and shares no code with the
//! library beyond its public data types.

#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use undersample_ensemble::data::{Column, ColumnKind, Dataset};
use undersample_ensemble::Matrix;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

// ---------------------------------------------------------------- AUC

/// Area under the empirical ROC curve by the trapezoid rule. Rows sharing a
/// score are one threshold step, which contributes a diagonal segment.
pub fn trapezoid_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let p = labels.iter().filter(|&&y| y == 1).count() as f64;
    let n = labels.len() as f64 - p;
    let mut distinct: Vec<f64> = scores.to_vec();
    distinct.sort_by(|a, b| b.total_cmp(a));
    distinct.dedup();
    let (mut tp, mut fp) = (0.0, 0.0);
    let (mut prev_x, mut prev_y) = (0.0, 0.0);
    let mut area = 0.0;
    for t in distinct {
        for (s, &y) in scores.iter().zip(labels) {
            if *s == t {
                if y == 1 {
                    tp += 1.0;
                } else {
                    fp += 1.0;
                }
            }
        }
        let (x, yv) = (fp / n, tp / p);
        area += (x - prev_x) * (yv + prev_y) / 2.0;
        prev_x = x;
        prev_y = yv;
    }
    area
}

/// Pair-counting AUC, `O(P·N)`.
pub fn pairwise_auc(scores: &[f64], labels: &[u8]) -> f64 {
    let mut wins = 0.0;
    let mut pairs = 0.0;
    for (i, &yi) in labels.iter().enumerate() {
        for (j, &yj) in labels.iter().enumerate() {
            if yi == 1 && yj == 0 {
                pairs += 1.0;
                if scores[i] > scores[j] {
                    wins += 1.0;
                } else if scores[i] == scores[j] {
                    wins += 0.5;
                }
            }
        }
    }
    wins / pairs
}

// ---------------------------------------------------------------- CART

/// Exact fraction `num / den` with a positive denominator.
#[derive(Debug, Clone, Copy)]
pub struct Frac {
    pub num: i128,
    pub den: i128,
}

impl Frac {
    pub fn new(num: i128, den: i128) -> Self {
        assert!(den > 0);
        Frac { num, den }
    }
    pub fn add(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den + o.num * self.den, self.den * o.den)
    }
    pub fn sub(self, o: Frac) -> Frac {
        Frac::new(self.num * o.den - o.num * self.den, self.den * o.den)
    }
    pub fn mul(self, o: Frac) -> Frac {
        Frac::new(self.num * o.num, self.den * o.den)
    }
    pub fn lt(self, o: Frac) -> bool {
        self.num * o.den < o.num * self.den
    }
    pub fn is_positive(self) -> bool {
        self.num > 0
    }
}

/// Gini impurity of a node as an exact fraction.
pub fn gini_frac(neg: usize, pos: usize) -> Frac {
    let n = (neg + pos) as i128;
    let (a, b) = (neg as i128, pos as i128);
    Frac::new(n * n - a * a - b * b, n * n)
}

#[derive(Debug, Clone, PartialEq)]
pub enum OracleTree {
    Leaf(u8),
    Split {
        feature: usize,
        threshold: f64,
        left: Box<OracleTree>,
        right: Box<OracleTree>,
    },
}

impl OracleTree {
    pub fn predict(&self, row: &[f64]) -> u8 {
        match self {
            OracleTree::Leaf(c) => *c,
            OracleTree::Split {
                feature,
                threshold,
                left,
                right,
            } => {
                if row[*feature] <= *threshold {
                    left.predict(row)
                } else {
                    right.predict(row)
                }
            }
        }
    }

    pub fn root_split(&self) -> Option<(usize, f64)> {
        match self {
            OracleTree::Leaf(_) => None,
            OracleTree::Split { feature, threshold, .. } => Some((*feature, *threshold)),
        }
    }
}

/// Exhaustive best split: every feature, every midpoint between consecutive
/// distinct values, weighted child impurity compared exactly. The first
/// strictly better candidate in (feature, threshold) order wins.
pub fn oracle_best_split(rows: &[Vec<f64>], y: &[u8]) -> Option<(usize, f64, Frac)> {
    let n = rows.len();
    let neg = y.iter().filter(|&&v| v == 0).count();
    let parent = gini_frac(neg, n - neg);
    let mut best: Option<(usize, f64, Frac)> = None;
    for f in 0..rows[0].len() {
        let mut values: Vec<f64> = rows.iter().map(|r| r[f]).collect();
        values.sort_by(f64::total_cmp);
        values.dedup();
        for w in values.windows(2) {
            let mut t = (w[0] + w[1]) / 2.0;
            if t >= w[1] || t < w[0] {
                t = w[0];
            }
            let mut counts = [[0usize; 2]; 2];
            for (r, &c) in rows.iter().zip(y) {
                counts[usize::from(r[f] > t)][c as usize] += 1;
            }
            let weighted = (0..2).fold(Frac::new(0, 1), |acc, side| {
                let m = counts[side][0] + counts[side][1];
                acc.add(Frac::new(m as i128, n as i128).mul(gini_frac(counts[side][0], counts[side][1])))
            });
            let decrease = parent.sub(weighted);
            if !decrease.is_positive() {
                continue;
            }
            match &best {
                Some((_, _, d)) if !d.lt(decrease) => {}
                _ => best = Some((f, t, decrease)),
            }
        }
    }
    best
}

pub fn oracle_tree(rows: &[Vec<f64>], y: &[u8], max_depth: Option<usize>, min_split: usize) -> OracleTree {
    oracle_grow(rows, y, 0, max_depth, min_split)
}

fn oracle_grow(rows: &[Vec<f64>], y: &[u8], depth: usize, max_depth: Option<usize>, min_split: usize) -> OracleTree {
    let pos = y.iter().filter(|&&v| v == 1).count();
    let leaf = OracleTree::Leaf(u8::from(pos * 2 > y.len()));
    if pos == 0 || pos == y.len() || y.len() < min_split || max_depth.is_some_and(|d| depth >= d) {
        return leaf;
    }
    let Some((f, t, _)) = oracle_best_split(rows, y) else {
        return leaf;
    };
    let (mut lr, mut ly, mut rr, mut ry) = (vec![], vec![], vec![], vec![]);
    for (r, &c) in rows.iter().zip(y) {
        if r[f] <= t {
            lr.push(r.clone());
            ly.push(c);
        } else {
            rr.push(r.clone());
            ry.push(c);
        }
    }
    OracleTree::Split {
        feature: f,
        threshold: t,
        left: Box::new(oracle_grow(&lr, &ly, depth + 1, max_depth, min_split)),
        right: Box::new(oracle_grow(&rr, &ry, depth + 1, max_depth, min_split)),
    }
}

/// Small random classification problem with deliberately repeated values so
/// that ties between candidate splits are common.
pub fn random_tree_problem(rng: &mut ChaCha8Rng, max_rows: usize, max_features: usize) -> (Vec<Vec<f64>>, Vec<u8>) {
    let n = rng.gen_range(4..=max_rows);
    let f = rng.gen_range(1..=max_features);
    let levels = rng.gen_range(2..=6);
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..f).map(|_| rng.gen_range(0..levels) as f64 * 0.5).collect())
        .collect();
    let mut y: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.4))).collect();
    y[0] = 0;
    y[1] = 1;
    (rows, y)
}

pub fn to_matrix(rows: &[Vec<f64>]) -> Matrix {
    Matrix::from_rows(rows)
}

// ---------------------------------------------------------------- datasets

/// Random mixed-type dataset; each cell is missing with probability `p_missing`.
pub fn random_dataset(rng: &mut ChaCha8Rng, n_rows: usize, n_features: usize, p_missing: f64) -> Dataset {
    let columns: Vec<Column> = (0..n_features)
        .map(|j| {
            if rng.gen_bool(0.3) {
                let k = rng.gen_range(2..=4);
                Column::categorical(format!("c{j}"), (0..k).map(|i| format!("v{i}")))
            } else {
                Column::numerical(format!("n{j}"))
            }
        })
        .collect();
    let mut cells = Vec::with_capacity(n_rows * n_features);
    for _ in 0..n_rows {
        for col in &columns {
            let v = match col.kind {
                ColumnKind::Categorical => rng.gen_range(0..col.n_categories()) as f64,
                ColumnKind::Numerical => (rng.gen_range(-20..20) as f64) / 4.0,
            };
            cells.push(if rng.gen_bool(p_missing) { None } else { Some(v) });
        }
    }
    let mut outcome: Vec<u8> = (0..n_rows).map(|i| u8::from(i % 3 == 0)).collect();
    outcome.shuffle(rng);
    Dataset::new(columns, cells, outcome, "y").expect("valid random dataset")
}

/// Ensure every feature has at least one present value (row 0 is filled in).
pub fn with_donors(d: &Dataset, rng: &mut ChaCha8Rng) -> Dataset {
    let f = d.n_features();
    let mut cells = d.cells().to_vec();
    for c in 0..f {
        if d.column_values(c).all(|v| v.is_none()) {
            let r = rng.gen_range(0..d.n_rows());
            cells[r * f + c] = Some(0.0);
        }
    }
    d.with_cells(cells).unwrap()
}

// ---------------------------------------------------------------- imputation

/// Per-row encoded vector: min-max scaled numericals, one-hot categoricals.
fn oracle_encode(d: &Dataset) -> Vec<Vec<Option<f64>>> {
    let mut out = vec![Vec::new(); d.n_rows()];
    for (c, col) in d.columns().iter().enumerate() {
        match col.kind {
            ColumnKind::Numerical => {
                let present: Vec<f64> = (0..d.n_rows()).filter_map(|r| d.get(r, c)).collect();
                let lo = present.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = present.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                for (r, row) in out.iter_mut().enumerate() {
                    row.push(d.get(r, c).map(|v| if hi > lo { (v - lo) / (hi - lo) } else { 0.0 }));
                }
            }
            ColumnKind::Categorical => {
                for (r, row) in out.iter_mut().enumerate() {
                    for k in 0..col.n_categories() {
                        row.push(d.get(r, c).map(|v| if v as usize == k { 1.0 } else { 0.0 }));
                    }
                }
            }
        }
    }
    out
}

fn oracle_similarity(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    let mut dot = 0.0;
    let mut n = 0;
    for i in 0..a.len() {
        if let (Some(x), Some(y)) = (a[i], b[i]) {
            dot += x * y;
            n += 1;
        }
    }
    if n == 0 {
        0.0
    } else {
        dot / n as f64
    }
}

/// Brute-force kNN fill of every missing cell, one cell at a time.
pub fn oracle_knn(d: &Dataset, k: usize) -> Vec<Option<f64>> {
    let enc = oracle_encode(d);
    let f = d.n_features();
    let mut out = d.cells().to_vec();
    for r in 0..d.n_rows() {
        for c in 0..f {
            if d.get(r, c).is_some() {
                continue;
            }
            let mut donors: Vec<(f64, usize)> = (0..d.n_rows())
                .filter(|&o| o != r && d.get(o, c).is_some())
                .map(|o| (oracle_similarity(&enc[r], &enc[o]), o))
                .collect();
            // most similar first, then lower row index
            donors.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let vals: Vec<f64> = donors.iter().take(k).map(|&(_, o)| d.get(o, c).unwrap()).collect();
            let fill = match d.column(c).kind {
                ColumnKind::Numerical => vals.iter().sum::<f64>() / vals.len() as f64,
                ColumnKind::Categorical => {
                    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
                    for v in &vals {
                        *counts.entry(*v as usize).or_default() += 1;
                    }
                    let max = *counts.values().max().unwrap();
                    *counts.iter().find(|(_, &n)| n == max).unwrap().0 as f64
                }
            };
            out[r * f + c] = Some(fill);
        }
    }
    out
}

// ---------------------------------------------------------------- aggregation

/// Top-`k` indices by score in the given direction, ties to the lower index,
/// found by repeated linear scans.
pub fn oracle_top(scores: &[f64], k: usize, higher_is_better: bool) -> Vec<usize> {
    let mut taken = vec![false; scores.len()];
    let mut out = Vec::new();
    for _ in 0..k.min(scores.len()) {
        let mut best: Option<usize> = None;
        for j in 0..scores.len() {
            if taken[j] {
                continue;
            }
            best = match best {
                None => Some(j),
                Some(b) => {
                    let better = if higher_is_better {
                        scores[j] > scores[b]
                    } else {
                        scores[j] < scores[b]
                    };
                    if better {
                        Some(j)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        let b = best.unwrap();
        taken[b] = true;
        out.push(b);
    }
    out
}

pub fn oracle_cla(ranks: &[Vec<usize>], n: usize) -> Vec<f64> {
    (0..n).map(|f| ranks.iter().map(|r| r[f] as f64).sum()).collect()
}

pub fn oracle_wma(ranks: &[Vec<usize>], aucs: &[f64], n: usize) -> Vec<f64> {
    (0..n)
        .map(|f| ranks.iter().zip(aucs).map(|(r, a)| (1.0 - a) * r[f] as f64).sum())
        .collect()
}

/// Occurrence score with an arbitrary per-(way, feature) weight.
pub fn oracle_occurrence(sets: &[Vec<usize>], n: usize, weight: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    (0..n)
        .map(|f| {
            sets.iter()
                .enumerate()
                .filter(|(_, s)| s.contains(&f))
                .map(|(w, _)| weight(w, f))
                .sum()
        })
        .collect()
}

// ---------------------------------------------------------------- statistics

pub fn oracle_entropy_bits(values: &[f64], categories: Option<usize>, lo: f64, hi: f64, bins: usize) -> f64 {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &v in values {
        let key = match categories {
            Some(_) => v as i64,
            None if hi > lo => {
                let mut b = ((v - lo) / (hi - lo) * bins as f64).floor() as i64;
                if b >= bins as i64 {
                    b = bins as i64 - 1;
                }
                b
            }
            None => 0,
        };
        *counts.entry(key).or_default() += 1;
    }
    if categories.is_none() && hi <= lo {
        return 0.0;
    }
    let n = values.len() as f64;
    counts
        .values()
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.log2()
        })
        .sum()
}
