//! Filter, impute, select and evaluate in one call, from a TOML config.
//!
//! ```text
//! cargo run --release --example full_pipeline -- out/pipeline
//! ```

use std::path::PathBuf;

use undersample_ensemble::pipeline::{run_pipeline, summary_text, write_pipeline_outputs};
use undersample_ensemble::PipelineConfig;

const CONFIG: &str = r#"
seed = 3
completion_threshold = 0.5

[synthetic]
n_pos = 40
n_neg = 360
n_informative = 8
n_noise_numerical = 40
n_noise_categorical = 8
missing = { kind = "ramp", min_rate = 0.0, max_rate = 0.6 }

[imputation]
method = "mean"

[ensemble]
n_ways = 31
n_features = 10

[aggregation]
method = "eaa"
"#;

fn main() -> undersample_ensemble::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out/pipeline".into()));
    let cfg = PipelineConfig::from_toml(CONFIG)?;
    let out = run_pipeline(&cfg)?;
    print!("{}", summary_text(&out));
    write_pipeline_outputs(&out, &dir)?;
    println!("artifacts in {}", dir.display());
    Ok(())
}
