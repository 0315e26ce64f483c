//! Missing-value imputation: per-feature mean substitution and a
//! similarity-weighted nearest-neighbour imputer for mixed-type rows.

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{encode_for_similarity, ColumnKind, Dataset};
use crate::error::{Error, Result};

pub const DEFAULT_NEIGHBORS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
#[derive(Default)]
pub enum ImputationMethod {
    #[default]
    MeanBased,
    SimilarityBased {
        k: usize,
    },
}

/// Number of cells filled per feature.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FillReport {
    pub method: ImputationMethod,
    pub features: Vec<String>,
    pub fills: Vec<usize>,
}

/// Run `method` and report per-feature fill counts.
pub fn impute(d: &Dataset, method: ImputationMethod) -> Result<(Dataset, FillReport)> {
    let out = match method {
        ImputationMethod::MeanBased => impute_mean(d)?,
        ImputationMethod::SimilarityBased { k } => impute_similarity(d, k)?,
    };
    let fills = (0..d.n_features())
        .map(|c| d.column_values(c).filter(Option::is_none).count())
        .collect();
    let report = FillReport {
        method,
        features: d.columns().iter().map(|c| c.name.clone()).collect(),
        fills,
    };
    Ok((out, report))
}

/// Category id nearest to `mean`, ties going to the smaller id.
fn nearest_category(mean: f64, n_categories: usize) -> f64 {
    let mut best = 0usize;
    let mut best_dist = f64::INFINITY;
    for id in 0..n_categories {
        let dist = (id as f64 - mean).abs();
        if dist < best_dist {
            best = id;
            best_dist = dist;
        }
    }
    best as f64
}

/// Replace missing numerical cells with the column mean and missing
/// categorical cells with the category whose id is closest to the mean id.
pub fn impute_mean(d: &Dataset) -> Result<Dataset> {
    let mut fill = Vec::with_capacity(d.n_features());
    for (c, col) in d.columns().iter().enumerate() {
        let (sum, count) = d
            .column_values(c)
            .flatten()
            .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
        if count == 0 {
            return Err(Error::NoDonors(col.name.clone()));
        }
        let mean = sum / count as f64;
        fill.push(match col.kind {
            ColumnKind::Numerical => mean,
            ColumnKind::Categorical => nearest_category(mean, col.n_categories()),
        });
    }
    let f = d.n_features();
    let cells = d
        .cells()
        .iter()
        .enumerate()
        .map(|(i, cell)| Some(cell.unwrap_or(fill[i % f])))
        .collect();
    d.with_cells(cells)
}

/// Mean product over derived columns present in both rows; 0 when none are.
pub fn similarity(a: &[Option<f64>], b: &[Option<f64>]) -> f64 {
    let (dot, n) = a.iter().zip(b).fold((0.0, 0usize), |(dot, n), pair| match pair {
        (Some(x), Some(y)) => (dot + x * y, n + 1),
        _ => (dot, n),
    });
    if n == 0 {
        0.0
    } else {
        dot / n as f64
    }
}

/// Fill each missing cell from the `k` most similar rows that have it present.
///
/// Donors are ranked by [`similarity`] on the encoded rows, ties broken toward
/// the lower row index. Numerical cells take the donors' mean, categorical cells
/// their most frequent category (ties to the smaller id). All fills read the
/// original dataset, so rows are independent of one another.
pub fn impute_similarity(d: &Dataset, k: usize) -> Result<Dataset> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if d.n_rows() < k + 1 {
        return Err(Error::InvalidArgument(format!(
            "similarity imputation with k = {k} needs at least {} rows, got {}",
            k + 1,
            d.n_rows()
        )));
    }
    for (c, col) in d.columns().iter().enumerate() {
        if d.column_values(c).all(|v| v.is_none()) {
            return Err(Error::NoDonors(col.name.clone()));
        }
    }
    let encoded = encode_for_similarity(d);
    let n = d.n_rows();
    let f = d.n_features();

    let filled_rows: Vec<Vec<Option<f64>>> = (0..n)
        .into_par_iter()
        .map(|r| {
            let row = d.row(r);
            if row.iter().all(Option::is_some) {
                return row.to_vec();
            }
            let target = encoded.row(r);
            let mut order: Vec<(f64, usize)> = (0..n)
                .filter(|&o| o != r)
                .map(|o| (similarity(target, encoded.row(o)), o))
                .collect();
            order.sort_by(|a, b| match b.0.total_cmp(&a.0) {
                Ordering::Equal => a.1.cmp(&b.1),
                other => other,
            });
            let mut out = row.to_vec();
            for c in (0..f).filter(|&c| row[c].is_none()) {
                let donors: Vec<f64> = order.iter().filter_map(|&(_, o)| d.get(o, c)).take(k).collect();
                out[c] = Some(match d.column(c).kind {
                    ColumnKind::Numerical => donors.iter().sum::<f64>() / donors.len() as f64,
                    ColumnKind::Categorical => majority_category(&donors, d.column(c).n_categories()),
                });
            }
            out
        })
        .collect();
    d.with_cells(filled_rows.into_iter().flatten().collect())
}

fn majority_category(ids: &[f64], n_categories: usize) -> f64 {
    let mut counts = vec![0usize; n_categories];
    for &id in ids {
        counts[id as usize] += 1;
    }
    let mut best = 0;
    for (id, &count) in counts.iter().enumerate() {
        if count > counts[best] {
            best = id;
        }
    }
    best as f64
}
