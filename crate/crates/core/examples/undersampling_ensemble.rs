//! Balanced undersampled ways, one tree per way, and majority voting.

use undersample_ensemble::ensemble::{fit_ways, majority_vote, make_ways, positive_votes};
use undersample_ensemble::metrics::{accuracy, auc};
use undersample_ensemble::synth::{generate, MissingProfile, SyntheticSpec};
use undersample_ensemble::EnsembleConfig;

fn main() -> undersample_ensemble::Result<()> {
    let spec = SyntheticSpec {
        n_pos: 30,
        n_neg: 270,
        n_informative: 5,
        n_noise_numerical: 15,
        n_noise_categorical: 0,
        missing: MissingProfile::none(),
        seed: 5,
        ..SyntheticSpec::default()
    };
    let (data, truth) = generate(&spec)?;
    let x = data.to_matrix()?;
    let y = data.outcome().to_vec();

    let cfg = EnsembleConfig {
        n_ways: 21,
        seed: 5,
        ..EnsembleConfig::default()
    };
    let ways = make_ways(&y, cfg.n_ways, cfg.seed)?;
    let pos = |w: &Vec<usize>| w.iter().filter(|&&r| y[r] == 1).count();
    println!("way 0: {} rows, {} positive", ways[0].len(), pos(&ways[0]));

    let models = fit_ways(&x, &y, &ways, &cfg)?;
    for m in models.iter().take(3) {
        println!(
            "way {}: cv accuracy {:.3}, cv AUC {:.3}, features used {:?}",
            m.way_index, m.cv_accuracy, m.cv_auc, m.positive_set
        );
    }
    println!("planted informative features {:?}", truth.informative_features);

    // in-sample, just to show the voting
    let votes = majority_vote(&models, &x)?;
    let trees: Vec<_> = models.iter().map(|m| m.tree.clone()).collect();
    let frac: Vec<f64> = positive_votes(&trees, &x)?
        .iter()
        .map(|&v| v as f64 / cfg.n_ways as f64)
        .collect();
    println!(
        "training accuracy {:.3}, vote-fraction AUC {:.3}",
        accuracy(&votes, &y)?,
        auc(&frac, &y)?
    );
    Ok(())
}
