//! End-to-end driver: ingest, filter, impute, select, evaluate, report; plus
//! the threshold x method x seed benchmark sweep.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::aggregate::{
    self, entropy_delta, AggregateScores, AggregationMethod, EntropyDelta, VarianceWeightParams, DEFAULT_ENTROPY_BINS,
};
use crate::data::{
    completion_stats, filter_by_completion, ingest_csv, CompletionStats, Dataset, IngestOptions, Matrix, Schema,
};
use crate::ensemble::{evaluate, fit_ways, make_ways, EnsembleConfig, WayModel};
use crate::error::{Error, Result};
use crate::impute::{impute, FillReport, ImputationMethod, DEFAULT_NEIGHBORS};
use crate::metrics::{Diagnostics, EvalReport};
use crate::synth::{generate, SyntheticSpec};

pub const SELECTED_FILE: &str = "selected.json";
pub const REPORT_FILE: &str = "report.json";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const BENCH_FILE: &str = "bench.csv";
pub const BENCH_SUMMARY_FILE: &str = "bench_summary.csv";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InputConfig {
    pub csv: PathBuf,
    pub schema: PathBuf,
    pub positive_label: String,
    pub missing_tokens: Vec<String>,
}

impl Default for InputConfig {
    fn default() -> Self {
        let opts = IngestOptions::default();
        InputConfig {
            csv: PathBuf::new(),
            schema: PathBuf::new(),
            positive_label: opts.positive_label,
            missing_tokens: opts.missing_tokens,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImputeKind {
    #[default]
    Mean,
    Knn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImputationConfig {
    pub method: ImputeKind,
    pub k: usize,
}

impl Default for ImputationConfig {
    fn default() -> Self {
        ImputationConfig {
            method: ImputeKind::Mean,
            k: DEFAULT_NEIGHBORS,
        }
    }
}

impl ImputationConfig {
    pub fn method(&self) -> ImputationMethod {
        match self.method {
            ImputeKind::Mean => ImputationMethod::MeanBased,
            ImputeKind::Knn => ImputationMethod::SimilarityBased { k: self.k },
        }
    }
}

/// Which per-way metric weights the occurrence-based aggregators.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMetric {
    #[default]
    Accuracy,
    Auc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AggregationConfig {
    pub method: AggregationMethod,
    pub maa_alpha: f64,
    pub maa_beta: f64,
    pub eaa_alpha: f64,
    pub eaa_beta: f64,
    pub entropy_bins: usize,
    pub weight_metric: WeightMetric,
}

impl Default for AggregationConfig {
    fn default() -> Self {
        let maa = VarianceWeightParams::maa_default();
        let eaa = VarianceWeightParams::eaa_default();
        AggregationConfig {
            method: AggregationMethod::Caa,
            maa_alpha: maa.alpha(),
            maa_beta: maa.beta(),
            eaa_alpha: eaa.alpha(),
            eaa_beta: eaa.beta(),
            entropy_bins: DEFAULT_ENTROPY_BINS,
            weight_metric: WeightMetric::Accuracy,
        }
    }
}

impl AggregationConfig {
    pub fn maa_params(&self) -> Result<VarianceWeightParams> {
        VarianceWeightParams::new(self.maa_alpha, self.maa_beta)
    }

    pub fn eaa_params(&self) -> Result<VarianceWeightParams> {
        VarianceWeightParams::new(self.eaa_alpha, self.eaa_beta)
    }
}

/// Tree and ensemble settings as they appear in a config file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleSettings {
    pub n_ways: usize,
    pub n_features: usize,
    pub cv_folds: usize,
    pub max_depth: Option<usize>,
    pub min_samples_split: usize,
    pub rfe_step: usize,
}

impl Default for EnsembleSettings {
    fn default() -> Self {
        let d = EnsembleConfig::default();
        EnsembleSettings {
            n_ways: d.n_ways,
            n_features: d.n_features,
            cv_folds: d.cv_folds,
            max_depth: d.tree.max_depth,
            min_samples_split: d.tree.min_samples_split,
            rfe_step: d.rfe_step,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    /// Master seed; every stochastic stage derives its seed from it.
    pub seed: u64,
    /// Minimum completion fraction for features and rows.
    pub completion_threshold: f64,
    pub out_dir: PathBuf,
    pub input: Option<InputConfig>,
    /// Generate data instead of reading `input`; its seed is the master seed.
    pub synthetic: Option<SyntheticSpec>,
    pub imputation: ImputationConfig,
    pub ensemble: EnsembleSettings,
    pub aggregation: AggregationConfig,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            seed: 0,
            completion_threshold: 0.5,
            out_dir: PathBuf::from("out"),
            input: None,
            synthetic: None,
            imputation: ImputationConfig::default(),
            ensemble: EnsembleSettings::default(),
            aggregation: AggregationConfig::default(),
        }
    }
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        PipelineConfig::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn ensemble_config(&self) -> EnsembleConfig {
        let s = &self.ensemble;
        EnsembleConfig {
            n_ways: s.n_ways,
            n_features: s.n_features,
            cv_folds: s.cv_folds,
            seed: self.seed,
            aggregation: self.aggregation.method,
            tree: crate::cart::TreeParams {
                max_depth: s.max_depth,
                min_samples_split: s.min_samples_split,
            },
            rfe_step: s.rfe_step,
            compute_ranks: false,
        }
    }

    /// Check everything that can be checked without touching data.
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.completion_threshold) {
            return Err(Error::Config(format!(
                "completion_threshold {} outside [0, 1]",
                self.completion_threshold
            )));
        }
        self.ensemble_config().validate()?;
        self.aggregation
            .maa_params()
            .map_err(|e| Error::Config(e.to_string()))?;
        self.aggregation
            .eaa_params()
            .map_err(|e| Error::Config(e.to_string()))?;
        if self.aggregation.entropy_bins == 0 {
            return Err(Error::Config("entropy_bins must be at least 1".into()));
        }
        if self.imputation.method == ImputeKind::Knn && self.imputation.k == 0 {
            return Err(Error::Config("imputation k must be at least 1".into()));
        }
        match (&self.input, &self.synthetic) {
            (None, None) => Err(Error::Config(
                "config needs either an [input] or a [synthetic] section".into(),
            )),
            (Some(_), Some(_)) => Err(Error::Config(
                "config has both [input] and [synthetic]; choose one".into(),
            )),
            (Some(input), None) => {
                for p in [&input.csv, &input.schema] {
                    if !p.is_file() {
                        return Err(Error::Config(format!("input file {} does not exist", p.display())));
                    }
                }
                Ok(())
            }
            (None, Some(spec)) => spec.validate().map_err(|e| Error::Config(e.to_string())),
        }
    }

    /// Raw (pre-filter) dataset named by the config.
    pub fn load_dataset(&self) -> Result<Dataset> {
        match (&self.input, &self.synthetic) {
            (Some(input), _) => {
                let schema = Schema::load(&input.schema)?;
                let opts = IngestOptions {
                    positive_label: input.positive_label.clone(),
                    missing_tokens: input.missing_tokens.clone(),
                };
                ingest_csv(&input.csv, &schema, &opts)
            }
            (None, Some(spec)) => {
                let spec = SyntheticSpec {
                    seed: self.seed,
                    ..spec.clone()
                };
                Ok(generate(&spec)?.0)
            }
            (None, None) => Err(Error::Config("no data source configured".into())),
        }
    }
}

/// A filtered and imputed dataset with the statistics the aggregators need.
#[derive(Debug, Clone)]
pub struct Prepared {
    /// Filtered, still with missing cells.
    pub filtered: Dataset,
    pub imputed: Dataset,
    pub x: Matrix,
    pub y: Vec<u8>,
    pub stats: CompletionStats,
    pub entropy: EntropyDelta,
    pub fills: FillReport,
}

impl Prepared {
    pub fn feature_names(&self) -> Vec<String> {
        self.filtered.columns().iter().map(|c| c.name.clone()).collect()
    }

    pub fn diagnostics(&self, selected: &[usize]) -> Diagnostics {
        let mean = |v: &[f64]| {
            if selected.is_empty() {
                0.0
            } else {
                selected.iter().map(|&f| v[f]).sum::<f64>() / selected.len() as f64
            }
        };
        Diagnostics {
            mean_missing_rate_selected: mean(&self.stats.per_feature_missing_rate),
            mean_entropy_delta_selected: mean(&self.entropy.delta),
        }
    }
}

pub fn prepare(raw: &Dataset, threshold: f64, imputation: ImputationMethod, bins: usize) -> Result<Prepared> {
    let filtered = filter_by_completion(raw, threshold).map_err(|e| e.in_stage("filter"))?;
    let stats = completion_stats(&filtered);
    let (imputed, fills) = impute(&filtered, imputation).map_err(|e| e.in_stage("impute"))?;
    let entropy = entropy_delta(&filtered, &imputed, bins).map_err(|e| e.in_stage("entropy"))?;
    let x = imputed.to_matrix()?;
    let y = imputed.outcome().to_vec();
    Ok(Prepared {
        filtered,
        imputed,
        x,
        y,
        stats,
        entropy,
        fills,
    })
}

/// Build and fit the selection ensemble over every feature of `prepared`.
pub fn fit_selection_ways(prepared: &Prepared, cfg: &EnsembleConfig) -> Result<Vec<WayModel>> {
    cfg.validate()?;
    let ways = make_ways(&prepared.y, cfg.n_ways, cfg.seed).map_err(|e| e.in_stage("undersample"))?;
    fit_ways(&prepared.x, &prepared.y, &ways, cfg).map_err(|e| e.in_stage("fit_ways"))
}

/// Aggregate per-way results with `method`, keeping `k` features.
pub fn aggregate_ways(
    method: AggregationMethod,
    ways: &[WayModel],
    prepared: &Prepared,
    agg: &AggregationConfig,
    k: usize,
) -> Result<AggregateScores> {
    let n_features = prepared.x.n_cols();
    let sets: Vec<Vec<usize>> = ways.iter().map(|w| w.positive_set.clone()).collect();
    let weights: Vec<f64> = ways
        .iter()
        .map(|w| match agg.weight_metric {
            WeightMetric::Accuracy => w.cv_accuracy,
            WeightMetric::Auc => w.cv_auc,
        })
        .collect();
    let ranks = || -> Result<Vec<_>> {
        ways.iter()
            .map(|w| {
                w.rank_list.clone().ok_or_else(|| {
                    Error::InvalidArgument(format!("{method} needs RFE rank lists; fit ways with ranks enabled"))
                })
            })
            .collect()
    };
    let out = match method {
        AggregationMethod::Cla => aggregate::cla(&ranks()?, k),
        AggregationMethod::Wma => {
            let aucs: Vec<f64> = ways.iter().map(|w| w.cv_auc).collect();
            aggregate::wma(&ranks()?, &aucs, k)
        }
        AggregationMethod::Ofa => aggregate::ofa(&sets, n_features, k),
        AggregationMethod::Caa => aggregate::caa(&sets, &weights, n_features, k),
        AggregationMethod::Maa => aggregate::maa(
            &sets,
            &weights,
            &prepared.stats.per_feature_missing_rate,
            &agg.maa_params()?,
            k,
        ),
        AggregationMethod::Eaa => aggregate::eaa(&sets, &weights, &prepared.entropy, &agg.eaa_params()?, k),
    };
    out.map_err(|e| e.in_stage("aggregate"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureDiagnostics {
    pub index: usize,
    pub name: String,
    pub score: f64,
    pub missing_rate: f64,
    pub entropy_delta: f64,
}

/// Output of the `select` stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub method: AggregationMethod,
    pub k: usize,
    pub n_ways: usize,
    pub completion_threshold: f64,
    pub n_rows: usize,
    pub n_features: usize,
    /// Best first.
    pub selected: Vec<FeatureDiagnostics>,
    /// Every feature in column order.
    pub features: Vec<FeatureDiagnostics>,
}

pub fn selection_report(scores: &AggregateScores, prepared: &Prepared, cfg: &PipelineConfig) -> SelectionReport {
    let names = prepared.feature_names();
    let diag = |f: usize| FeatureDiagnostics {
        index: f,
        name: names[f].clone(),
        score: scores.per_feature_score[f],
        missing_rate: prepared.stats.per_feature_missing_rate[f],
        entropy_delta: prepared.entropy.delta[f],
    };
    SelectionReport {
        method: scores.method,
        k: cfg.ensemble.n_features,
        n_ways: cfg.ensemble.n_ways,
        completion_threshold: cfg.completion_threshold,
        n_rows: prepared.x.n_rows(),
        n_features: prepared.x.n_cols(),
        selected: scores.selected.iter().map(|&f| diag(f)).collect(),
        features: (0..names.len()).map(diag).collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PipelineOutput {
    pub selection: SelectionReport,
    pub report: EvalReport,
}

/// Ingest through selection; returns the prepared data, ways and scores.
pub fn run_selection(cfg: &PipelineConfig) -> Result<(Prepared, Vec<WayModel>, AggregateScores)> {
    cfg.validate()?;
    let raw = cfg.load_dataset().map_err(|e| e.in_stage("ingest"))?;
    let prepared = prepare(
        &raw,
        cfg.completion_threshold,
        cfg.imputation.method(),
        cfg.aggregation.entropy_bins,
    )?;
    let ens = cfg.ensemble_config();
    let ways = fit_selection_ways(&prepared, &ens)?;
    let scores = aggregate_ways(
        cfg.aggregation.method,
        &ways,
        &prepared,
        &cfg.aggregation,
        ens.n_features,
    )?;
    Ok((prepared, ways, scores))
}

fn evaluate_selection(prepared: &Prepared, selected: &[usize], cfg: &EnsembleConfig) -> Result<EvalReport> {
    let mut report = evaluate(&prepared.x, &prepared.y, selected, cfg, prepared.diagnostics(selected))
        .map_err(|e| e.in_stage("evaluate"))?;
    let names = prepared.feature_names();
    report.selected_names = selected.iter().map(|&f| names[f].clone()).collect();
    Ok(report)
}

/// Full pipeline without writing anything.
pub fn run_pipeline(cfg: &PipelineConfig) -> Result<PipelineOutput> {
    let (prepared, _ways, scores) = run_selection(cfg)?;
    let report = evaluate_selection(&prepared, &scores.selected, &cfg.ensemble_config())?;
    Ok(PipelineOutput {
        selection: selection_report(&scores, &prepared, cfg),
        report,
    })
}

pub fn summary_text(out: &PipelineOutput) -> String {
    let r = &out.report;
    let s = &out.selection;
    let mut text = format!(
        "method: {}\nrows: {}  features after filtering: {}  completion threshold: {}\n\
         ways: {}  folds: {}\naccuracy: {:.4}\nAUC (vote fraction): {:.4}\nAUC (binary vote): {:.4}\n\
         confusion: tp={} fp={} tn={} fn={}\nsensitivity: {:.4}  fallout: {:.4}\n\
         mean missing rate of selected: {:.4}\nmean entropy change of selected: {:.4}\nselected features:\n",
        s.method,
        s.n_rows,
        s.n_features,
        s.completion_threshold,
        r.n_ways,
        r.folds,
        r.accuracy,
        r.auc_score_based,
        r.auc_vote_based,
        r.confusion.tp,
        r.confusion.fp,
        r.confusion.tn,
        r.confusion.fn_,
        r.confusion.sensitivity(),
        r.confusion.fallout(),
        r.diagnostics.mean_missing_rate_selected,
        r.diagnostics.mean_entropy_delta_selected,
    );
    for (i, f) in s.selected.iter().enumerate() {
        text.push_str(&format!(
            "  {:>2}. {} score={:.4} missing={:.3} dE={:.3}\n",
            i + 1,
            f.name,
            f.score,
            f.missing_rate,
            f.entropy_delta
        ));
    }
    text
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Write `selected.json`, `report.json` and `summary.txt` into `dir`.
pub fn write_pipeline_outputs(out: &PipelineOutput, dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    write_json(&out.selection, dir.join(SELECTED_FILE))?;
    write_json(&out.report, dir.join(REPORT_FILE))?;
    let path = dir.join(SUMMARY_FILE);
    fs::write(&path, summary_text(out)).map_err(|e| Error::io(path, e))
}

/// A column of the benchmark: an aggregator or the random-selection baseline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BenchMethod {
    Aggregation(AggregationMethod),
    Random,
}

impl std::fmt::Display for BenchMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BenchMethod::Aggregation(m) => write!(f, "{m}"),
            BenchMethod::Random => f.write_str("random"),
        }
    }
}

impl std::str::FromStr for BenchMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim().eq_ignore_ascii_case("random") {
            Ok(BenchMethod::Random)
        } else {
            s.parse().map(BenchMethod::Aggregation)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSweep {
    pub thresholds: Vec<f64>,
    pub methods: Vec<BenchMethod>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub threshold: f64,
    pub method: String,
    pub seed: u64,
    pub n_rows: usize,
    pub n_features: usize,
    pub accuracy: f64,
    pub auc: f64,
    pub auc_vote: f64,
    pub mean_missing_rate: f64,
    pub mean_entropy_delta: f64,
}

/// Evaluate every (threshold, method, seed) cell. Within one (threshold, seed)
/// pair the data preparation and the selection ensemble are shared by all
/// methods. Rows come back ordered by threshold, then method, then seed.
pub fn run_bench(cfg: &PipelineConfig, sweep: &BenchSweep) -> Result<Vec<BenchRow>> {
    if sweep.thresholds.is_empty() || sweep.methods.is_empty() || sweep.seeds.is_empty() {
        return Err(Error::Config("bench sweep needs thresholds, methods and seeds".into()));
    }
    let needs_ranks = sweep
        .methods
        .iter()
        .any(|m| matches!(m, BenchMethod::Aggregation(a) if a.needs_ranks()));
    let mut rows = Vec::new();
    for &threshold in &sweep.thresholds {
        let mut cells: Vec<(usize, usize, BenchRow)> = Vec::new();
        for (si, &seed) in sweep.seeds.iter().enumerate() {
            let cell_cfg = PipelineConfig {
                seed,
                completion_threshold: threshold,
                ..cfg.clone()
            };
            cell_cfg.validate()?;
            let raw = cell_cfg.load_dataset().map_err(|e| e.in_stage("ingest"))?;
            let prepared = prepare(
                &raw,
                threshold,
                cell_cfg.imputation.method(),
                cell_cfg.aggregation.entropy_bins,
            )?;
            let mut ens = cell_cfg.ensemble_config();
            ens.compute_ranks = needs_ranks;
            let ways = fit_selection_ways(&prepared, &ens)?;
            for (mi, &method) in sweep.methods.iter().enumerate() {
                let selected = match method {
                    BenchMethod::Aggregation(m) => {
                        aggregate_ways(m, &ways, &prepared, &cell_cfg.aggregation, ens.n_features)?.selected
                    }
                    BenchMethod::Random => aggregate::random_selection(prepared.x.n_cols(), ens.n_features, seed),
                };
                let report = evaluate_selection(&prepared, &selected, &ens)?;
                cells.push((
                    mi,
                    si,
                    BenchRow {
                        threshold,
                        method: method.to_string(),
                        seed,
                        n_rows: prepared.x.n_rows(),
                        n_features: prepared.x.n_cols(),
                        accuracy: report.accuracy,
                        auc: report.auc_score_based,
                        auc_vote: report.auc_vote_based,
                        mean_missing_rate: report.diagnostics.mean_missing_rate_selected,
                        mean_entropy_delta: report.diagnostics.mean_entropy_delta_selected,
                    },
                ));
            }
        }
        cells.sort_by_key(|(mi, si, _)| (*mi, *si));
        rows.extend(cells.into_iter().map(|(_, _, r)| r));
    }
    Ok(rows)
}

/// Mean and sample standard deviation of every metric per (threshold, method).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchSummaryRow {
    pub threshold: f64,
    pub method: String,
    pub n_seeds: usize,
    pub accuracy_mean: f64,
    pub accuracy_sd: f64,
    pub auc_mean: f64,
    pub auc_sd: f64,
    pub auc_vote_mean: f64,
    pub auc_vote_sd: f64,
    pub mean_missing_rate_mean: f64,
    pub mean_missing_rate_sd: f64,
    pub mean_entropy_delta_mean: f64,
    pub mean_entropy_delta_sd: f64,
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn bench_summary(rows: &[BenchRow]) -> Vec<BenchSummaryRow> {
    let mut keys: Vec<(f64, String)> = Vec::new();
    for r in rows {
        if !keys.iter().any(|(t, m)| *t == r.threshold && *m == r.method) {
            keys.push((r.threshold, r.method.clone()));
        }
    }
    keys.into_iter()
        .map(|(threshold, method)| {
            let cell: Vec<&BenchRow> = rows
                .iter()
                .filter(|r| r.threshold == threshold && r.method == method)
                .collect();
            let stat = |get: fn(&BenchRow) -> f64| mean_sd(&cell.iter().map(|r| get(r)).collect::<Vec<_>>());
            let (accuracy_mean, accuracy_sd) = stat(|r| r.accuracy);
            let (auc_mean, auc_sd) = stat(|r| r.auc);
            let (auc_vote_mean, auc_vote_sd) = stat(|r| r.auc_vote);
            let (mean_missing_rate_mean, mean_missing_rate_sd) = stat(|r| r.mean_missing_rate);
            let (mean_entropy_delta_mean, mean_entropy_delta_sd) = stat(|r| r.mean_entropy_delta);
            BenchSummaryRow {
                threshold,
                method,
                n_seeds: cell.len(),
                accuracy_mean,
                accuracy_sd,
                auc_mean,
                auc_sd,
                auc_vote_mean,
                auc_vote_sd,
                mean_missing_rate_mean,
                mean_missing_rate_sd,
                mean_entropy_delta_mean,
                mean_entropy_delta_sd,
            }
        })
        .collect()
}

pub fn write_csv_rows<T: Serialize, W: Write>(rows: &[T], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<csv writer>", e))
}

pub fn write_bench_outputs(rows: &[BenchRow], dir: &Path) -> Result<()> {
    ensure_dir(dir)?;
    for (name, result) in [
        (BENCH_FILE, {
            let mut buf = Vec::new();
            write_csv_rows(rows, &mut buf).map(|_| buf)
        }),
        (BENCH_SUMMARY_FILE, {
            let mut buf = Vec::new();
            write_csv_rows(&bench_summary(rows), &mut buf).map(|_| buf)
        }),
    ] {
        let path = dir.join(name);
        fs::write(&path, result?).map_err(|e| Error::io(path, e))?;
    }
    Ok(())
}
