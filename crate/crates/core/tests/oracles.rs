mod common;

use common::*;
use rand::Rng;

use undersample_ensemble::aggregate::{
    caa, cla, eaa, entropy_delta, maa, ofa, wma, EntropyDelta, VarianceWeightParams,
};
use undersample_ensemble::cart::{fit, Node, TreeParams};
use undersample_ensemble::data::{completion_stats, filter_by_completion, ColumnKind};
use undersample_ensemble::ensemble::{deal_folds, evaluate, make_ways};
use undersample_ensemble::impute::{impute, ImputationMethod};
use undersample_ensemble::metrics::{auc, Diagnostics};
use undersample_ensemble::rfe::rfe_rank;
use undersample_ensemble::seed::{self, Stream};
use undersample_ensemble::{EnsembleConfig, Matrix, RankList};

#[test]
fn auc_matches_trapezoid_and_pair_counting() {
    let mut rng = rng(1);
    for _ in 0..100 {
        let n = rng.gen_range(2..=50);
        let mut labels: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.3))).collect();
        labels[0] = 0;
        labels[1] = 1;
        let levels = rng.gen_range(2..=20);
        let scores: Vec<f64> = (0..n)
            .map(|_| rng.gen_range(0..levels) as f64 / levels as f64)
            .collect();
        let got = auc(&scores, &labels).unwrap();
        assert!((got - trapezoid_auc(&scores, &labels)).abs() < 1e-12);
        assert!((got - pairwise_auc(&scores, &labels)).abs() < 1e-12);
    }
}

#[test]
fn cart_matches_exhaustive_split_search() {
    let mut rng = rng(2);
    for case in 0..40 {
        let (rows, y) = random_tree_problem(&mut rng, 40, 5);
        let depth = rng.gen_range(1..=3);
        let params = TreeParams {
            max_depth: Some(depth),
            ..TreeParams::default()
        };
        let tree = fit(&to_matrix(&rows), &y, &params).unwrap();
        let oracle = oracle_tree(&rows, &y, Some(depth), 2);
        let root = match &tree.root {
            Node::Split { feature, threshold, .. } => Some((*feature, *threshold)),
            Node::Leaf { .. } => None,
        };
        assert_eq!(root, oracle.root_split(), "case {case}");
        for r in &rows {
            assert_eq!(tree.predict_row(r), oracle.predict(r), "case {case}");
        }
    }
}

#[test]
fn unlimited_depth_trees_match_oracle() {
    let mut rng = rng(3);
    for _ in 0..20 {
        let (rows, y) = random_tree_problem(&mut rng, 30, 4);
        let tree = fit(&to_matrix(&rows), &y, &TreeParams::default()).unwrap();
        let oracle = oracle_tree(&rows, &y, None, 2);
        for r in &rows {
            assert_eq!(tree.predict_row(r), oracle.predict(r));
        }
    }
}

/// RFE that refits on the surviving columns every round, with no shortcuts.
fn naive_rfe(x: &Matrix, y: &[u8], step: usize, params: &TreeParams) -> Vec<usize> {
    let f = x.n_cols();
    let mut ranks = vec![0; f];
    let mut survivors: Vec<usize> = (0..f).collect();
    let mut worst = f;
    loop {
        let tree = fit(&x.select_cols(&survivors), y, params).unwrap();
        let local = tree.importances();
        let imp = |g: usize| local[survivors.iter().position(|&s| s == g).unwrap()];
        if survivors.len() <= step || survivors.iter().all(|&g| imp(g) == 0.0) {
            let mut order = survivors.clone();
            order.sort_by(|&a, &b| imp(b).partial_cmp(&imp(a)).unwrap().then(a.cmp(&b)));
            for (i, g) in order.into_iter().enumerate() {
                ranks[g] = i + 1;
            }
            return ranks;
        }
        let mut order = survivors.clone();
        order.sort_by(|&a, &b| imp(a).partial_cmp(&imp(b)).unwrap().then(b.cmp(&a)));
        for &g in &order[..step] {
            ranks[g] = worst;
            worst -= 1;
        }
        survivors.retain(|g| !order[..step].contains(g));
    }
}

#[test]
fn rfe_matches_naive_refit_every_round() {
    let mut rng = rng(4);
    for _ in 0..30 {
        let (rows, y) = random_tree_problem(&mut rng, 30, 7);
        let x = to_matrix(&rows);
        let step = rng.gen_range(1..=2);
        let depth = if rng.gen_bool(0.5) {
            Some(rng.gen_range(1..=3))
        } else {
            None
        };
        let params = TreeParams {
            max_depth: depth,
            ..TreeParams::default()
        };
        let got = rfe_rank(&x, &y, step, &params).unwrap();
        assert!(got.is_permutation());
        assert_eq!(got, RankList(naive_rfe(&x, &y, step, &params)));
    }
}

/// Dyadic inputs keep every sum exact, so ties in the oracle are real ties.
struct AggInstance {
    ranks: Vec<Vec<usize>>,
    aucs: Vec<f64>,
    sets: Vec<Vec<usize>>,
    accs: Vec<f64>,
    missing: Vec<f64>,
    delta: Vec<f64>,
    n: usize,
    k: usize,
}

fn agg_instance(rng: &mut rand_chacha::ChaCha8Rng) -> AggInstance {
    use rand::seq::SliceRandom;
    let n = rng.gen_range(1..=12);
    let ways = rng.gen_range(1..=9);
    let ranks = (0..ways)
        .map(|_| {
            let mut r: Vec<usize> = (1..=n).collect();
            r.shuffle(rng);
            r
        })
        .collect();
    let sets = (0..ways)
        .map(|_| (0..n).filter(|_| rng.gen_bool(0.4)).collect())
        .collect();
    AggInstance {
        ranks,
        aucs: (0..ways).map(|_| rng.gen_range(0..=8) as f64 / 8.0).collect(),
        sets,
        accs: (0..ways).map(|_| rng.gen_range(0..=8) as f64 / 8.0).collect(),
        // with alpha 1: (m + 1)^2 in {1, 4}
        missing: (0..n).map(|_| if rng.gen_bool(0.5) { 0.0 } else { 1.0 }).collect(),
        // with alpha 0.5: (d + 0.5)^2 in {0.25, 1, 4, 16}
        delta: (0..n).map(|_| [0.0, 0.5, 1.5, 3.5][rng.gen_range(0..4)]).collect(),
        n,
        k: rng.gen_range(1..=n + 2),
    }
}

#[test]
fn aggregators_match_brute_force_including_ties() {
    let mut rng = rng(5);
    let mp = VarianceWeightParams::maa_default();
    let ep = VarianceWeightParams::eaa_default();
    for _ in 0..60 {
        let t = agg_instance(&mut rng);
        let rank_lists: Vec<RankList> = t.ranks.iter().cloned().map(RankList).collect();
        let deltas = EntropyDelta::from_deltas(t.delta.clone());
        let cases = [
            (cla(&rank_lists, t.k).unwrap(), oracle_cla(&t.ranks, t.n), false),
            (
                wma(&rank_lists, &t.aucs, t.k).unwrap(),
                oracle_wma(&t.ranks, &t.aucs, t.n),
                false,
            ),
            (
                ofa(&t.sets, t.n, t.k).unwrap(),
                oracle_occurrence(&t.sets, t.n, |_, _| 1.0),
                true,
            ),
            (
                caa(&t.sets, &t.accs, t.n, t.k).unwrap(),
                oracle_occurrence(&t.sets, t.n, |w, _| t.accs[w]),
                true,
            ),
            (
                maa(&t.sets, &t.accs, &t.missing, &mp, t.k).unwrap(),
                oracle_occurrence(&t.sets, t.n, |w, f| t.accs[w] / (t.missing[f] + 1.0).powi(2)),
                true,
            ),
            (
                eaa(&t.sets, &t.accs, &deltas, &ep, t.k).unwrap(),
                oracle_occurrence(&t.sets, t.n, |w, f| t.accs[w] / (t.delta[f] + 0.5).powi(2)),
                true,
            ),
        ];
        for (got, expected, higher) in cases {
            assert_eq!(got.per_feature_score, expected, "{}", got.method);
            assert_eq!(got.selected, oracle_top(&expected, t.k, higher), "{}", got.method);
        }
    }
}

#[test]
fn penalized_scores_agree_with_per_way_sum_for_real_inputs() {
    let mut rng = rng(6);
    for _ in 0..50 {
        let t = agg_instance(&mut rng);
        let accs: Vec<f64> = t.accs.iter().map(|_| rng.gen::<f64>()).collect();
        let missing: Vec<f64> = (0..t.n).map(|_| rng.gen::<f64>()).collect();
        let alpha = rng.gen_range(0.1..2.0);
        let beta = rng.gen_range(0.0..3.0);
        let p = VarianceWeightParams::new(alpha, beta).unwrap();
        let got = maa(&t.sets, &accs, &missing, &p, t.k).unwrap();
        let expected = oracle_occurrence(&t.sets, t.n, |w, f| accs[w] / (missing[f] + alpha).powf(beta));
        for (a, b) in got.per_feature_score.iter().zip(&expected) {
            assert!((a - b).abs() <= 1e-12 * b.abs().max(1.0));
        }
    }
}

#[test]
fn knn_imputation_matches_brute_force() {
    let mut rng = rng(7);
    for _ in 0..40 {
        let n = rng.gen_range(4..=15);
        let f = rng.gen_range(1..=4);
        let d = with_donors(&random_dataset(&mut rng, n, f, 0.3), &mut rng);
        let k = rng.gen_range(1..n);
        let (got, _) = impute(&d, ImputationMethod::SimilarityBased { k }).unwrap();
        let expected = oracle_knn(&d, k);
        for (a, b) in got.cells().iter().zip(&expected) {
            let (a, b) = (a.unwrap(), b.unwrap());
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }
}

#[test]
fn mean_imputation_matches_column_means() {
    let mut rng = rng(8);
    for _ in 0..40 {
        let d = with_donors(&random_dataset(&mut rng, 12, 4, 0.3), &mut rng);
        let (got, report) = impute(&d, ImputationMethod::MeanBased).unwrap();
        for c in 0..d.n_features() {
            let present: Vec<f64> = d.column_values(c).flatten().collect();
            let mean = present.iter().sum::<f64>() / present.len() as f64;
            let expected = match d.column(c).kind {
                ColumnKind::Numerical => mean,
                // closest id to the mean, lower id on a tie
                ColumnKind::Categorical => {
                    (0..d.column(c).n_categories())
                        .map(|i| i as f64)
                        .fold(f64::NAN, |best, id| {
                            if best.is_nan() || (id - mean).abs() < (best - mean).abs() {
                                id
                            } else {
                                best
                            }
                        })
                }
            };
            for r in 0..d.n_rows() {
                match d.get(r, c) {
                    Some(v) => assert_eq!(got.get(r, c), Some(v)),
                    None => assert!((got.get(r, c).unwrap() - expected).abs() < 1e-12),
                }
            }
            assert_eq!(report.fills[c], d.n_rows() - present.len());
        }
    }
}

#[test]
fn completion_stats_and_filter_match_recount() {
    let mut rng = rng(9);
    for _ in 0..50 {
        let rate = rng.gen_range(0.0..0.7);
        let d = random_dataset(&mut rng, 15, 6, rate);
        let stats = completion_stats(&d);
        for c in 0..d.n_features() {
            let miss = (0..d.n_rows()).filter(|&r| d.get(r, c).is_none()).count();
            assert_eq!(stats.per_feature_missing_rate[c], miss as f64 / d.n_rows() as f64);
        }
        let p = rng.gen_range(0..=10) as f64 / 10.0;
        let keep_cols: Vec<usize> = (0..d.n_features())
            .filter(|&c| (0..d.n_rows()).filter(|&r| d.get(r, c).is_some()).count() as f64 >= p * d.n_rows() as f64)
            .collect();
        let keep_rows: Vec<usize> = (0..d.n_rows())
            .filter(|&r| {
                let present = keep_cols.iter().filter(|&&c| d.get(r, c).is_some()).count();
                !keep_cols.is_empty() && present as f64 >= p * keep_cols.len() as f64
            })
            .collect();
        match filter_by_completion(&d, p) {
            Ok(out) => {
                assert_eq!(out.n_rows(), keep_rows.len());
                assert_eq!(out.n_features(), keep_cols.len());
                for (i, &r) in keep_rows.iter().enumerate() {
                    for (j, &c) in keep_cols.iter().enumerate() {
                        assert_eq!(out.get(i, j).map(f64::to_bits), d.get(r, c).map(f64::to_bits));
                    }
                }
            }
            Err(_) => assert!(keep_cols.is_empty() || keep_rows.is_empty()),
        }
    }
}

#[test]
fn entropy_change_matches_recomputation() {
    let mut rng = rng(10);
    for _ in 0..30 {
        let d = with_donors(&random_dataset(&mut rng, 20, 5, 0.3), &mut rng);
        let (after, _) = impute(&d, ImputationMethod::MeanBased).unwrap();
        let bins = rng.gen_range(1..=12);
        let got = entropy_delta(&d, &after, bins).unwrap();
        for c in 0..d.n_features() {
            let before_vals: Vec<f64> = d.column_values(c).flatten().collect();
            let after_vals: Vec<f64> = after.column_values(c).flatten().collect();
            let cats = match d.column(c).kind {
                ColumnKind::Categorical => Some(d.column(c).n_categories()),
                ColumnKind::Numerical => None,
            };
            let lo = before_vals
                .iter()
                .chain(&after_vals)
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let hi = before_vals
                .iter()
                .chain(&after_vals)
                .cloned()
                .fold(f64::NEG_INFINITY, f64::max);
            let hb = oracle_entropy_bits(&before_vals, cats, lo, hi, bins);
            let ha = oracle_entropy_bits(&after_vals, cats, lo, hi, bins);
            assert!((got.before[c] - hb).abs() < 1e-12);
            assert!((got.after[c] - ha).abs() < 1e-12);
            assert!((got.delta[c] - (ha - hb).abs()).abs() < 1e-12);
        }
    }
}

#[test]
fn single_way_evaluation_matches_hand_rolled_cross_validation() {
    let mut rng = rng(11);
    for s in 0..5u64 {
        let n = 60;
        let y: Vec<u8> = (0..n).map(|i| u8::from(i % 4 == 0)).collect();
        let rows: Vec<Vec<f64>> = y
            .iter()
            .map(|&c| {
                (0..3)
                    .map(|j| rng.gen_range(0..8) as f64 + if j == 0 { 3.0 * f64::from(c) } else { 0.0 })
                    .collect()
            })
            .collect();
        let x = to_matrix(&rows);
        let cfg = EnsembleConfig {
            n_ways: 1,
            cv_folds: 5,
            seed: s,
            ..EnsembleConfig::default()
        };
        let selected = [0, 2];
        let diag = Diagnostics {
            mean_missing_rate_selected: 0.0,
            mean_entropy_delta_selected: 0.0,
        };
        let report = evaluate(&x, &y, &selected, &cfg, diag).unwrap();

        let folds = deal_folds(&y, 5, Stream::OuterFolds, s, &[]).unwrap();
        let xs = x.select_cols(&selected);
        let mut pred = vec![0u8; n];
        for f in 0..5 {
            let train: Vec<usize> = (0..n).filter(|&i| folds[i] != f).collect();
            let ty: Vec<u8> = train.iter().map(|&i| y[i]).collect();
            let way = &make_ways(&ty, 1, seed::derive(s, Stream::Ways, &[f as u64])).unwrap()[0];
            let rows: Vec<usize> = way.iter().map(|&k| train[k]).collect();
            let wy: Vec<u8> = rows.iter().map(|&r| y[r]).collect();
            let tree = fit(&xs.select_rows(&rows), &wy, &cfg.tree).unwrap();
            for i in (0..n).filter(|&i| folds[i] == f) {
                pred[i] = tree.predict_row(xs.row(i));
            }
        }
        let acc = pred.iter().zip(&y).filter(|(a, b)| a == b).count() as f64 / n as f64;
        assert_eq!(report.accuracy, acc);
        let scores: Vec<f64> = pred.iter().map(|&p| f64::from(p)).collect();
        assert!((report.auc_score_based - pairwise_auc(&scores, &y)).abs() < 1e-12);
    }
}
