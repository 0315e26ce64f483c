//! `usens`: command-line driver for the undersampling ensemble pipeline.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use undersample_ensemble::aggregate::AggregationMethod;
use undersample_ensemble::data::{completion_stats, filter_by_completion, save_csv, Schema};
use undersample_ensemble::impute::impute;
use undersample_ensemble::pipeline::{
    self, ensure_dir, write_json, BenchMethod, BenchSweep, ImputeKind, PipelineConfig,
};
use undersample_ensemble::synth::{generate, MissingMode, MissingProfile, SyntheticSpec};

#[derive(Parser, Debug)]
#[command(
    name = "usens",
    version,
    about = "Undersampling ensemble feature selection for imbalanced data with missing values"
)]
struct Cli {
    /// TOML pipeline configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Master seed for every stochastic stage.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    out_dir: Option<PathBuf>,
    /// Print the resolved configuration and exit without touching any file.
    #[arg(long, global = true)]
    dry_run: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct InputArgs {
    /// Data CSV with a header row.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Schema file: one `name,kind` line per column (kind: num, cat, outcome, drop).
    #[arg(long)]
    schema: Option<PathBuf>,
    /// Outcome label that counts as the positive class.
    #[arg(long)]
    positive_label: Option<String>,
}

#[derive(Args, Debug, Default)]
struct PrepArgs {
    /// Completion threshold in percent (features and rows below it are dropped).
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long, value_parser = parse_impute_kind)]
    impute: Option<ImputeKind>,
    /// Neighbours for similarity-based imputation.
    #[arg(long)]
    neighbors: Option<usize>,
}

#[derive(Args, Debug, Default)]
struct SelectArgs {
    #[arg(long)]
    method: Option<AggregationMethod>,
    /// Number of features to select.
    #[arg(long)]
    k: Option<usize>,
    /// Alpha of the MAA/EAA weight (applied to the chosen method).
    #[arg(long)]
    alpha: Option<f64>,
    /// Beta of the MAA/EAA weight (applied to the chosen method).
    #[arg(long)]
    beta: Option<f64>,
    /// Number of undersampled ways (odd).
    #[arg(long)]
    ways: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Read a CSV against its schema and report per-feature completion.
    Ingest {
        #[command(flatten)]
        input: InputArgs,
    },
    /// Drop features, then rows, below a completion threshold.
    Filter {
        #[command(flatten)]
        input: InputArgs,
        /// Completion threshold in percent.
        #[arg(long)]
        threshold: Option<f64>,
    },
    /// Fill missing cells; writes a complete CSV and a fill-count sidecar.
    Impute {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_parser = parse_impute_kind)]
        method: Option<ImputeKind>,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Generate a synthetic imbalanced dataset with planted ground truth.
    Synth {
        #[arg(long)]
        n_pos: Option<usize>,
        #[arg(long)]
        n_neg: Option<usize>,
        #[arg(long)]
        informative: Option<usize>,
        #[arg(long)]
        noise_numerical: Option<usize>,
        #[arg(long)]
        noise_categorical: Option<usize>,
        #[arg(long)]
        effect_size: Option<f64>,
        /// Largest per-feature missing rate of the ramp (fraction).
        #[arg(long)]
        max_missing: Option<f64>,
        /// Correlate missingness with informativeness.
        #[arg(long)]
        correlated: bool,
    },
    /// Fit the ensemble and aggregate per-way results into a feature selection.
    Select {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        prep: PrepArgs,
        #[command(flatten)]
        select: SelectArgs,
    },
    /// Select, then evaluate the selection by outer cross-validation.
    Evaluate {
        #[command(flatten)]
        input: InputArgs,
        #[command(flatten)]
        prep: PrepArgs,
        #[command(flatten)]
        select: SelectArgs,
    },
    /// Sweep thresholds x methods x seeds and tabulate the results.
    Bench {
        #[command(flatten)]
        input: InputArgs,
        /// Comma-separated thresholds in percent.
        #[arg(long, value_delimiter = ',', default_values_t = [50.0, 60.0, 70.0, 80.0])]
        thresholds: Vec<f64>,
        /// Comma-separated methods; `random` adds the random-selection baseline.
        #[arg(long, value_delimiter = ',', default_value = "ofa,caa,maa,eaa")]
        methods: Vec<BenchMethod>,
        /// Comma-separated seeds, or a range `a..b` (inclusive).
        #[arg(long, default_value = "1..5")]
        seeds: String,
        #[arg(long)]
        ways: Option<usize>,
        /// Use the correlated-missingness synthetic benchmark when no data is given.
        #[arg(long)]
        correlated: bool,
    },
}

fn parse_impute_kind(s: &str) -> Result<ImputeKind, String> {
    match s.to_ascii_lowercase().as_str() {
        "mean" => Ok(ImputeKind::Mean),
        "knn" | "similarity" => Ok(ImputeKind::Knn),
        other => Err(format!("unknown imputation method `{other}` (mean|knn)")),
    }
}

fn parse_seeds(s: &str) -> anyhow::Result<Vec<u64>> {
    if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u64, u64) = (a.trim().parse()?, b.trim().parse()?);
        if a > b {
            bail!("empty seed range {s}");
        }
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|t| t.trim().parse().with_context(|| format!("bad seed `{t}`")))
        .collect()
}

fn percent(p: f64) -> anyhow::Result<f64> {
    if !(0.0..=100.0).contains(&p) {
        bail!("threshold {p} must be a percentage in [0, 100]");
    }
    Ok(p / 100.0)
}

impl InputArgs {
    fn apply(&self, cfg: &mut PipelineConfig) {
        if self.csv.is_none() && self.schema.is_none() && self.positive_label.is_none() {
            return;
        }
        let mut input = cfg.input.clone().unwrap_or_default();
        if let Some(p) = &self.csv {
            input.csv = p.clone();
        }
        if let Some(p) = &self.schema {
            input.schema = p.clone();
        }
        if let Some(l) = &self.positive_label {
            input.positive_label = l.clone();
        }
        cfg.input = Some(input);
        cfg.synthetic = None;
    }
}

impl PrepArgs {
    fn apply(&self, cfg: &mut PipelineConfig) -> anyhow::Result<()> {
        if let Some(p) = self.threshold {
            cfg.completion_threshold = percent(p)?;
        }
        if let Some(m) = self.impute {
            cfg.imputation.method = m;
        }
        if let Some(k) = self.neighbors {
            cfg.imputation.k = k;
        }
        Ok(())
    }
}

impl SelectArgs {
    fn apply(&self, cfg: &mut PipelineConfig) {
        let agg = &mut cfg.aggregation;
        if let Some(m) = self.method {
            agg.method = m;
        }
        let eaa = agg.method == AggregationMethod::Eaa;
        if let Some(a) = self.alpha {
            if eaa {
                agg.eaa_alpha = a
            } else {
                agg.maa_alpha = a
            }
        }
        if let Some(b) = self.beta {
            if eaa {
                agg.eaa_beta = b
            } else {
                agg.maa_beta = b
            }
        }
        if let Some(k) = self.k {
            cfg.ensemble.n_features = k;
        }
        if let Some(w) = self.ways {
            cfg.ensemble.n_ways = w;
        }
    }
}

/// Default data source when neither the config nor flags name one.
fn benchmark_spec(correlated: bool) -> SyntheticSpec {
    SyntheticSpec {
        missing_mode: if correlated {
            MissingMode::InformativeCorrelated
        } else {
            MissingMode::Mcar
        },
        ..SyntheticSpec::default()
    }
}

fn resolve(cli: &Cli) -> anyhow::Result<PipelineConfig> {
    let mut cfg = match &cli.config {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.out_dir {
        cfg.out_dir = d.clone();
    }
    match &cli.command {
        Command::Ingest { input } => input.apply(&mut cfg),
        Command::Filter { input, threshold } => {
            input.apply(&mut cfg);
            if let Some(p) = threshold {
                cfg.completion_threshold = percent(*p)?;
            }
        }
        Command::Impute { input, method, k } => {
            input.apply(&mut cfg);
            if let Some(m) = method {
                cfg.imputation.method = *m;
            }
            if let Some(k) = k {
                cfg.imputation.k = *k;
            }
        }
        Command::Synth {
            n_pos,
            n_neg,
            informative,
            noise_numerical,
            noise_categorical,
            effect_size,
            max_missing,
            correlated,
        } => {
            let mut spec = cfg.synthetic.clone().unwrap_or_default();
            macro_rules! set {
                ($($field:ident <- $flag:expr),*) => { $(if let Some(v) = $flag { spec.$field = v; })* };
            }
            set!(n_pos <- *n_pos, n_neg <- *n_neg, n_informative <- *informative,
                 n_noise_numerical <- *noise_numerical, n_noise_categorical <- *noise_categorical,
                 effect_size <- *effect_size);
            if let Some(m) = max_missing {
                spec.missing = MissingProfile::Ramp {
                    min_rate: 0.0,
                    max_rate: *m,
                };
            }
            if *correlated {
                spec.missing_mode = MissingMode::InformativeCorrelated;
            }
            cfg.input = None;
            cfg.synthetic = Some(spec);
        }
        Command::Select { input, prep, select } | Command::Evaluate { input, prep, select } => {
            input.apply(&mut cfg);
            prep.apply(&mut cfg)?;
            select.apply(&mut cfg);
        }
        Command::Bench {
            input,
            ways,
            correlated,
            ..
        } => {
            input.apply(&mut cfg);
            if let Some(w) = ways {
                cfg.ensemble.n_ways = *w;
            }
            if cfg.input.is_none() && cfg.synthetic.is_none() {
                cfg.synthetic = Some(benchmark_spec(*correlated));
            }
        }
    }
    Ok(cfg)
}

fn write_text(path: &Path, text: &str) -> anyhow::Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = resolve(&cli)?;
    cfg.validate()?;
    if cli.dry_run {
        print!("{}", cfg.to_toml()?);
        return Ok(());
    }
    let out = cfg.out_dir.clone();
    match &cli.command {
        Command::Ingest { .. } => {
            let d = cfg.load_dataset()?;
            ensure_dir(&out)?;
            save_csv(&d, out.join("ingested.csv"))?;
            Schema::for_dataset(&d).save(out.join("ingested.schema"))?;
            write_json(&completion_stats(&d), out.join("completion.json"))?;
            println!(
                "ingested {} rows x {} features ({} positive)",
                d.n_rows(),
                d.n_features(),
                d.n_positive()
            );
        }
        Command::Filter { .. } => {
            let d = cfg.load_dataset()?;
            let f = filter_by_completion(&d, cfg.completion_threshold)?;
            ensure_dir(&out)?;
            save_csv(&f, out.join("filtered.csv"))?;
            Schema::for_dataset(&f).save(out.join("filtered.schema"))?;
            write_json(&completion_stats(&f), out.join("completion.json"))?;
            println!(
                "kept {} of {} rows and {} of {} features",
                f.n_rows(),
                d.n_rows(),
                f.n_features(),
                d.n_features()
            );
        }
        Command::Impute { .. } => {
            let d = cfg.load_dataset()?;
            let (imputed, fills) = impute(&d, cfg.imputation.method())?;
            ensure_dir(&out)?;
            save_csv(&imputed, out.join("imputed.csv"))?;
            Schema::for_dataset(&imputed).save(out.join("imputed.schema"))?;
            write_json(&fills, out.join("fills.json"))?;
            println!("filled {} cells", fills.fills.iter().sum::<usize>());
        }
        Command::Synth { .. } => {
            let spec = SyntheticSpec {
                seed: cfg.seed,
                ..cfg.synthetic.clone().unwrap_or_default()
            };
            let (d, truth) = generate(&spec)?;
            ensure_dir(&out)?;
            save_csv(&d, out.join("synthetic.csv"))?;
            Schema::for_dataset(&d).save(out.join("synthetic.schema"))?;
            write_json(&truth, out.join("ground_truth.json"))?;
            println!(
                "wrote {} rows x {} features to {}",
                d.n_rows(),
                d.n_features(),
                out.display()
            );
        }
        Command::Select { .. } => {
            let (prepared, _ways, scores) = pipeline::run_selection(&cfg)?;
            let report = pipeline::selection_report(&scores, &prepared, &cfg);
            ensure_dir(&out)?;
            write_json(&report, out.join(pipeline::SELECTED_FILE))?;
            for (i, f) in report.selected.iter().enumerate() {
                println!("{:>3}. {} {:.4}", i + 1, f.name, f.score);
            }
        }
        Command::Evaluate { .. } => {
            let result = pipeline::run_pipeline(&cfg)?;
            pipeline::write_pipeline_outputs(&result, &out)?;
            print!("{}", pipeline::summary_text(&result));
        }
        Command::Bench {
            thresholds,
            methods,
            seeds,
            ..
        } => {
            let sweep = BenchSweep {
                thresholds: thresholds.iter().map(|&p| percent(p)).collect::<anyhow::Result<_>>()?,
                methods: methods.clone(),
                seeds: parse_seeds(seeds)?,
            };
            let rows = pipeline::run_bench(&cfg, &sweep)?;
            pipeline::write_bench_outputs(&rows, &out)?;
            let summary = pipeline::bench_summary(&rows);
            for s in &summary {
                println!(
                    "p={:.2} {:<6} auc={:.4}±{:.4} missing={:.4} dE={:.4}",
                    s.threshold, s.method, s.auc_mean, s.auc_sd, s.mean_missing_rate_mean, s.mean_entropy_delta_mean
                );
            }
        }
    }
    write_text(&out.join("config.toml"), &cfg.to_toml()?)?;
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
