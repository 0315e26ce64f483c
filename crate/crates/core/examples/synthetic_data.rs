//! Generate an imbalanced dataset with planted informative features and write
//! it as CSV + schema + ground truth.
//!
//! ```text
//! cargo run --example synthetic_data -- out/synth
//! ```

use std::path::PathBuf;

use undersample_ensemble::data::{completion_stats, save_csv, Schema};
use undersample_ensemble::pipeline::{ensure_dir, write_json};
use undersample_ensemble::synth::{generate, MissingMode, SyntheticSpec};

fn main() -> undersample_ensemble::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/synth".into()));
    let spec = SyntheticSpec {
        missing_mode: MissingMode::InformativeCorrelated,
        seed: 1,
        ..SyntheticSpec::default()
    };
    let (data, truth) = generate(&spec)?;

    let rates = completion_stats(&data).per_feature_missing_rate;
    let mean = |idx: &mut dyn Iterator<Item = usize>| {
        let v: Vec<f64> = idx.map(|j| rates[j]).collect();
        v.iter().sum::<f64>() / v.len() as f64
    };
    let informative = &truth.informative_features;
    println!(
        "{} rows ({} positive), {} features",
        data.n_rows(),
        data.n_positive(),
        data.n_features()
    );
    println!(
        "mean missing rate: informative {:.3}, other {:.3}",
        mean(&mut informative.iter().copied()),
        mean(&mut (0..data.n_features()).filter(|j| !informative.contains(j)))
    );

    ensure_dir(&dir)?;
    save_csv(&data, dir.join("synthetic.csv"))?;
    Schema::for_dataset(&data).save(dir.join("synthetic.schema"))?;
    write_json(&truth, dir.join("ground_truth.json"))?;
    println!("written to {}", dir.display());
    Ok(())
}
