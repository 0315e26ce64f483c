//! The six ways of merging per-way results into one feature selection.

use undersample_ensemble::aggregate::{caa, cla, eaa, maa, ofa, wma, EntropyDelta, VarianceWeightParams};
use undersample_ensemble::{AggregateScores, RankList};

fn show(s: &AggregateScores) {
    let scores: Vec<String> = s.per_feature_score.iter().map(|v| format!("{v:.3}")).collect();
    println!(
        "{:<4} top {:?}  scores [{}]",
        s.method.as_str(),
        s.selected,
        scores.join(", ")
    );
}

fn main() -> undersample_ensemble::Result<()> {
    // three ways over five features
    let ranks = vec![
        RankList(vec![1, 2, 3, 4, 5]),
        RankList(vec![2, 1, 3, 5, 4]),
        RankList(vec![1, 3, 2, 4, 5]),
    ];
    let aucs = [0.9, 0.6, 0.8];
    let sets = vec![vec![0, 1, 3], vec![0, 1, 2], vec![0, 3]];
    let accs = [0.8, 0.7, 0.9];
    let missing = [0.45, 0.0, 0.1, 0.05, 0.3];
    let delta = EntropyDelta::from_deltas(vec![0.9, 0.0, 0.2, 0.1, 0.6]);
    let k = 3;

    show(&cla(&ranks, k)?);
    show(&wma(&ranks, &aucs, k)?);
    show(&ofa(&sets, 5, k)?);
    show(&caa(&sets, &accs, 5, k)?);
    show(&maa(&sets, &accs, &missing, &VarianceWeightParams::maa_default(), k)?);
    show(&eaa(&sets, &accs, &delta, &VarianceWeightParams::eaa_default(), k)?);

    // a stronger penalty pushes heavily imputed features further down
    let harsh = VarianceWeightParams::new(0.1, 3.0)?;
    show(&maa(&sets, &accs, &missing, &harsh, k)?);
    Ok(())
}
