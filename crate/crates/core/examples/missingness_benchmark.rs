//! Compare aggregators on data whose informative features are also the more
//! heavily missing ones: held-out AUC, and the mean missing rate and entropy
//! change of what each method selects.
//!
//! ```text
//! cargo run --release --example missingness_benchmark -- 5
//! ```

use undersample_ensemble::pipeline::{bench_summary, run_bench, BenchMethod, BenchSweep};
use undersample_ensemble::synth::{MissingMode, SyntheticSpec};
use undersample_ensemble::PipelineConfig;

fn main() -> undersample_ensemble::Result<()> {
    let n_seeds: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(3);
    let cfg = PipelineConfig {
        synthetic: Some(SyntheticSpec {
            missing_mode: MissingMode::InformativeCorrelated,
            ..SyntheticSpec::default()
        }),
        ..PipelineConfig::default()
    };
    let sweep = BenchSweep {
        thresholds: vec![0.5],
        methods: ["ofa", "caa", "maa", "eaa", "random"]
            .iter()
            .map(|m| m.parse::<BenchMethod>())
            .collect::<Result<_, _>>()?,
        seeds: (1..=n_seeds).collect(),
    };
    let rows = run_bench(&cfg, &sweep)?;
    println!("{:<7} {:>6} {:>6} {:>8} {:>6}", "method", "AUC", "sd", "missing", "dE");
    for s in bench_summary(&rows) {
        println!(
            "{:<7} {:>6.3} {:>6.3} {:>8.3} {:>6.3}",
            s.method, s.auc_mean, s.auc_sd, s.mean_missing_rate_mean, s.mean_entropy_delta_mean
        );
    }
    Ok(())
}
