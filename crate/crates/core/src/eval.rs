//! Evaluation harness: runs the full pipeline over a query dataset,
//! aggregates accuracy and token statistics, sweeps the ablation axes, and
//! emits JSON/CSV/SVG artifacts.
//!
//! The pool dataset supplies calibration data, the centroid model, and the
//! exemplars; it must be disjoint from the queries. In mock mode a whole
//! run is a pure function of the config, so replays are byte-identical.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::csvio::FeatureRow;
use crate::discretize::{calibrate_with_range, quantize, BinningScheme, DEFAULT_SNR_RANGE};
use crate::error::{Error, Result};
use crate::features::extract_features;
use crate::labels::ModulationLabel;
use crate::llm::{classify, mock_classify, ClassificationResult, EndpointConfig, MockPolicy};
use crate::prompt::{
    build_baseline_prompt, build_prompt, select_exemplars, ExemplarPool, ExemplarRow,
    ExemplarStrategy, PromptBundle, TEMPLATE_VERSION, UNKNOWN_LABEL,
};
use crate::shortlist::{import_shortlists, rank_all, train_centroids, CentroidModel, ShortlistProvider};
use crate::siggen::{load_manifest, load_segment, mix_seed, snr_db_serde};
use crate::svg::{ChartSpec, Series};

/// Width of the per-SNR accuracy buckets, in dB.
pub const SNR_BUCKET_DB: f64 = 5.0;

const PARSE_FAILURE_COLUMN: &str = "PARSE_FAILURE";

/// Exemplar selection axis, in config form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyChoice {
    Random,
    Centroid,
    LowSnr,
}

impl StrategyChoice {
    pub fn name(&self) -> &'static str {
        match self {
            StrategyChoice::Random => "random",
            StrategyChoice::Centroid => "centroid",
            StrategyChoice::LowSnr => "low_snr",
        }
    }
}

/// Shortlist source axis, in config form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShortlistChoice {
    Centroid,
    Oracle,
    File(PathBuf),
}

/// Mock reply policy, in config form. The centroid policy resolves against
/// the model trained on the pool during the run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MockChoice {
    FirstOption,
    Centroid,
    Fixed(String),
}

/// Answer source: deterministic mock or live endpoint.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendChoice {
    Mock(MockChoice),
    Http(EndpointConfig),
}

impl PartialEq for EndpointConfig {
    fn eq(&self, other: &Self) -> bool {
        self.url == other.url
            && self.model == other.model
            && self.temperature == other.temperature
            && self.max_tokens == other.max_tokens
            && self.timeout_ms == other.timeout_ms
            && self.max_attempts == other.max_attempts
            && self.backoff_base_ms == other.backoff_base_ms
            && self.max_in_flight == other.max_in_flight
    }
}

/// Everything a run depends on. Serialized into every report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EvalConfig {
    pub query_manifest: PathBuf,
    pub pool_manifest: PathBuf,
    pub bins: usize,
    pub snr_range: (f64, f64),
    pub k: usize,
    pub allow_unknown: bool,
    pub strategy: StrategyChoice,
    pub shortlist: ShortlistChoice,
    pub backend: BackendChoice,
    pub seed: u64,
    /// Worker count override; None means CPU count for mock runs and the
    /// endpoint's max_in_flight for live runs.
    pub concurrency: Option<usize>,
    /// Keep full prompt texts in the per-query records.
    pub keep_prompts: bool,
    /// Build the uncompressed full-precision prompt instead.
    pub baseline: bool,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            query_manifest: PathBuf::new(),
            pool_manifest: PathBuf::new(),
            bins: 5,
            snr_range: DEFAULT_SNR_RANGE,
            k: 5,
            allow_unknown: false,
            strategy: StrategyChoice::Random,
            shortlist: ShortlistChoice::Centroid,
            backend: BackendChoice::Mock(MockChoice::Centroid),
            seed: 0,
            concurrency: None,
            keep_prompts: false,
            baseline: false,
        }
    }
}

/// One evaluated query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueryRecord {
    pub id: String,
    pub truth: String,
    #[serde(with = "snr_db_serde")]
    pub snr_db: f64,
    pub shortlist: Vec<String>,
    pub options: Vec<String>,
    pub predicted: Option<String>,
    pub correct: bool,
    pub prompt_tokens: usize,
    pub attempt_count: u32,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub prompt_text: Option<String>,
    pub raw_response: String,
}

/// Prompt token estimate summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenStats {
    pub mean: f64,
    pub min: usize,
    pub max: usize,
}

/// Accuracy within one SNR bucket `[lo_db, hi_db)` (last bucket inclusive).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnrBucketStat {
    pub lo_db: f64,
    pub hi_db: f64,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
}

/// Row-per-true-class counts; columns are the ten labels plus UNKNOWN and
/// PARSE_FAILURE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub row_labels: Vec<String>,
    pub col_labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

/// Aggregated results for one run. The wall clock is measured but kept out
/// of serialization so replayed runs compare byte-for-byte.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub template_version: String,
    pub seed: u64,
    pub config: EvalConfig,
    pub n_queries: usize,
    pub overall_accuracy: f64,
    pub shortlist_recall: f64,
    pub parse_failures: usize,
    pub parse_failure_rate: f64,
    pub unknown_answers: usize,
    pub token_stats: TokenStats,
    pub per_snr: Vec<SnrBucketStat>,
    pub confusion: ConfusionMatrix,
    pub records: Vec<QueryRecord>,
    #[serde(skip)]
    pub wall_clock: Duration,
}

/// Run `f` over `items` on a bounded pool of `workers` threads, preserving
/// input order in the output.
pub fn parallel_map<T, R, F>(items: &[T], workers: usize, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(usize, &T) -> R + Sync,
{
    let n = items.len();
    if n == 0 {
        return Vec::new();
    }
    let workers = workers.clamp(1, n);
    if workers == 1 {
        return items.iter().enumerate().map(|(i, t)| f(i, t)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..n).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= n {
                    break;
                }
                let r = f(i, &items[i]);
                slots.lock().unwrap()[i] = Some(r);
            });
        }
    });
    slots
        .into_inner()
        .unwrap()
        .into_iter()
        .map(|slot| slot.expect("worker filled every slot"))
        .collect()
}

/// Load a manifest and extract the feature vector of every entry.
pub fn load_feature_rows(manifest_path: &Path) -> Result<Vec<FeatureRow>> {
    let manifest = load_manifest(manifest_path)?;
    let dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    let mut rows = Vec::with_capacity(manifest.entries.len());
    for entry in &manifest.entries {
        let seg = load_segment(&dir, entry)?;
        let features = extract_features(&seg).map_err(|e| e.with_query(&entry.id))?;
        rows.push(FeatureRow {
            id: entry.id.clone(),
            label: entry.label,
            features,
        });
    }
    Ok(rows)
}

fn segment_paths(manifest_path: &Path) -> Result<Vec<PathBuf>> {
    let manifest = load_manifest(manifest_path)?;
    let dir = manifest_path
        .parent()
        .map(Path::to_path_buf)
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(manifest.entries.iter().map(|e| dir.join(&e.file)).collect())
}

struct RunContext {
    scheme: BinningScheme,
    model: CentroidModel,
    pool: ExemplarPool,
    strategy: ExemplarStrategy,
    provider: ShortlistProvider,
}

fn build_context(config: &EvalConfig, pool_rows: &[FeatureRow]) -> Result<RunContext> {
    let training: Vec<(ModulationLabel, crate::features::FeatureVector)> = pool_rows
        .iter()
        .map(|r| (r.label, r.features.clone()))
        .collect();
    let model = train_centroids(&training)?;
    let pool_features: Vec<crate::features::FeatureVector> =
        pool_rows.iter().map(|r| r.features.clone()).collect();
    let scheme = calibrate_with_range(&pool_features, config.bins, config.snr_range)?;
    let pool = ExemplarPool {
        rows: pool_rows
            .iter()
            .map(|r| ExemplarRow {
                id: r.id.clone(),
                label: r.label,
                features: r.features.clone(),
            })
            .collect(),
    };
    let strategy = match config.strategy {
        StrategyChoice::Random => ExemplarStrategy::Random {
            seed: mix_seed(config.seed, 1),
        },
        StrategyChoice::Centroid => ExemplarStrategy::Centroid(model.clone()),
        StrategyChoice::LowSnr => ExemplarStrategy::LowSnr,
    };
    let pool_classes: Vec<ModulationLabel> = ModulationLabel::ALL
        .iter()
        .copied()
        .filter(|label| pool_rows.iter().any(|r| r.label == *label))
        .collect();
    let provider = match &config.shortlist {
        ShortlistChoice::Centroid => ShortlistProvider::Centroid(model.clone()),
        ShortlistChoice::Oracle => ShortlistProvider::Oracle {
            seed: mix_seed(config.seed, 2),
            classes: pool_classes,
        },
        ShortlistChoice::File(path) => ShortlistProvider::Imported(import_shortlists(path)?),
    };
    Ok(RunContext {
        scheme,
        model,
        pool,
        strategy,
        provider,
    })
}

fn build_query_bundle(
    config: &EvalConfig,
    ctx: &RunContext,
    row: &FeatureRow,
    shortlist: &[ModulationLabel],
) -> Result<PromptBundle> {
    if config.baseline {
        let picks = select_exemplars(&ctx.pool, &ModulationLabel::ALL, &ctx.strategy)?;
        let exemplars: Vec<(ModulationLabel, crate::features::FeatureVector)> = picks
            .iter()
            .map(|r| (r.label, r.features.clone()))
            .collect();
        build_baseline_prompt(&row.id, &row.features, &exemplars)
    } else {
        let picks = select_exemplars(&ctx.pool, shortlist, &ctx.strategy)?;
        let mut exemplars = Vec::with_capacity(picks.len());
        for pick in picks {
            exemplars.push((pick.label, quantize(&pick.features, &ctx.scheme)?));
        }
        let query_sym = quantize(&row.features, &ctx.scheme)?;
        build_prompt(&row.id, &query_sym, shortlist, &exemplars, config.allow_unknown)
    }
}

fn answer(
    config: &EvalConfig,
    ctx: &RunContext,
    row: &FeatureRow,
    bundle: &PromptBundle,
) -> Result<ClassificationResult> {
    match &config.backend {
        BackendChoice::Mock(choice) => {
            let policy = match choice {
                MockChoice::FirstOption => MockPolicy::FirstOption,
                MockChoice::Centroid => MockPolicy::Centroid(ctx.model.clone()),
                MockChoice::Fixed(text) => MockPolicy::Fixed(text.clone()),
            };
            Ok(mock_classify(bundle, &policy, Some(&row.features)))
        }
        BackendChoice::Http(endpoint) => classify(endpoint, bundle),
    }
}

fn process_query(config: &EvalConfig, ctx: &RunContext, row: &FeatureRow) -> Result<QueryRecord> {
    let run = || -> Result<QueryRecord> {
        let shortlist = ctx
            .provider
            .shortlist_for(&row.id, row.label, &row.features, config.k)?;
        let bundle = build_query_bundle(config, ctx, row, &shortlist)?;
        let result = answer(config, ctx, row, &bundle)?;
        let correct = result.predicted.as_deref() == Some(row.label.as_str());
        Ok(QueryRecord {
            id: row.id.clone(),
            truth: row.label.as_str().to_string(),
            snr_db: row.features.snr_db,
            shortlist: shortlist.iter().map(|l| l.as_str().to_string()).collect(),
            options: bundle.options.clone(),
            predicted: result.predicted,
            correct,
            prompt_tokens: bundle.estimated_tokens,
            attempt_count: result.attempt_count,
            prompt_text: config.keep_prompts.then(|| bundle.text.clone()),
            raw_response: result.raw_response,
        })
    };
    run().map_err(|e| e.with_query(&row.id))
}

fn snr_buckets(range: (f64, f64)) -> Vec<(f64, f64)> {
    let (lo, hi) = range;
    let count = ((hi - lo) / SNR_BUCKET_DB).ceil().max(1.0) as usize;
    (0..count)
        .map(|i| {
            let b_lo = lo + i as f64 * SNR_BUCKET_DB;
            let b_hi = (b_lo + SNR_BUCKET_DB).min(hi);
            (b_lo, b_hi)
        })
        .collect()
}

fn bucket_index(snr_db: f64, range: (f64, f64), count: usize) -> usize {
    if snr_db == f64::INFINITY {
        return count - 1;
    }
    let idx = ((snr_db - range.0) / SNR_BUCKET_DB).floor();
    (idx.max(0.0) as usize).min(count - 1)
}

fn aggregate(config: &EvalConfig, mut records: Vec<QueryRecord>, wall_clock: Duration) -> EvalReport {
    records.sort_by(|a, b| a.id.cmp(&b.id));

    let n = records.len();
    let correct = records.iter().filter(|r| r.correct).count();
    let parse_failures = records.iter().filter(|r| r.predicted.is_none()).count();
    let unknown_answers = records
        .iter()
        .filter(|r| r.predicted.as_deref() == Some(UNKNOWN_LABEL))
        .count();
    let recall_hits = records
        .iter()
        .filter(|r| r.shortlist.iter().any(|s| *s == r.truth))
        .count();

    let token_stats = TokenStats {
        mean: records.iter().map(|r| r.prompt_tokens as f64).sum::<f64>() / n.max(1) as f64,
        min: records.iter().map(|r| r.prompt_tokens).min().unwrap_or(0),
        max: records.iter().map(|r| r.prompt_tokens).max().unwrap_or(0),
    };

    let buckets = snr_buckets(config.snr_range);
    let mut per_snr: Vec<SnrBucketStat> = buckets
        .iter()
        .map(|(lo, hi)| SnrBucketStat {
            lo_db: *lo,
            hi_db: *hi,
            n: 0,
            correct: 0,
            accuracy: 0.0,
        })
        .collect();
    for r in &records {
        let idx = bucket_index(r.snr_db, config.snr_range, buckets.len());
        per_snr[idx].n += 1;
        if r.correct {
            per_snr[idx].correct += 1;
        }
    }
    for b in per_snr.iter_mut() {
        if b.n > 0 {
            b.accuracy = b.correct as f64 / b.n as f64;
        }
    }

    let row_labels: Vec<String> = ModulationLabel::ALL
        .iter()
        .map(|l| l.as_str().to_string())
        .collect();
    let mut col_labels = row_labels.clone();
    col_labels.push(UNKNOWN_LABEL.to_string());
    col_labels.push(PARSE_FAILURE_COLUMN.to_string());
    let mut counts = vec![vec![0u64; col_labels.len()]; row_labels.len()];
    for r in &records {
        let row = ModulationLabel::ALL
            .iter()
            .position(|l| l.as_str() == r.truth)
            .expect("truth is always a known label");
        let col = match r.predicted.as_deref() {
            None => col_labels.len() - 1,
            Some(name) if name == UNKNOWN_LABEL => col_labels.len() - 2,
            Some(name) => match name.parse::<ModulationLabel>() {
                Ok(label) => label.index(),
                Err(_) => col_labels.len() - 1,
            },
        };
        counts[row][col] += 1;
    }

    EvalReport {
        template_version: TEMPLATE_VERSION.to_string(),
        seed: config.seed,
        config: config.clone(),
        n_queries: n,
        overall_accuracy: correct as f64 / n.max(1) as f64,
        shortlist_recall: recall_hits as f64 / n.max(1) as f64,
        parse_failures,
        parse_failure_rate: parse_failures as f64 / n.max(1) as f64,
        unknown_answers,
        token_stats,
        per_snr,
        confusion: ConfusionMatrix {
            row_labels,
            col_labels,
            counts,
        },
        records,
        wall_clock,
    }
}

fn worker_count(config: &EvalConfig) -> usize {
    if let Some(n) = config.concurrency {
        return n.max(1);
    }
    match &config.backend {
        BackendChoice::Http(endpoint) => endpoint.max_in_flight.max(1),
        BackendChoice::Mock(_) => std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1),
    }
}

/// Evaluate every query in the manifest through the whole pipeline.
pub fn run_eval(config: &EvalConfig) -> Result<EvalReport> {
    let start = Instant::now();
    if !(1..=ModulationLabel::ALL.len()).contains(&config.k) {
        return Err(Error::invalid(format!(
            "k must be in [1, {}], got {}",
            ModulationLabel::ALL.len(),
            config.k
        )));
    }

    let query_paths = segment_paths(&config.query_manifest)?;
    let pool_paths = segment_paths(&config.pool_manifest)?;
    let overlap = query_paths.iter().filter(|p| pool_paths.contains(p)).count();
    if overlap > 0 {
        return Err(Error::invalid(format!(
            "query and pool datasets share {overlap} segment file(s); they must be disjoint"
        )));
    }

    let pool_rows = load_feature_rows(&config.pool_manifest)?;
    let query_rows = load_feature_rows(&config.query_manifest)?;
    if query_rows.is_empty() {
        return Err(Error::invalid("query manifest has no entries"));
    }

    let ctx = build_context(config, &pool_rows)?;
    let workers = worker_count(config);
    let outcomes = parallel_map(&query_rows, workers, |_, row| process_query(config, &ctx, row));
    let mut records = Vec::with_capacity(outcomes.len());
    for outcome in outcomes {
        records.push(outcome?);
    }
    Ok(aggregate(config, records, start.elapsed()))
}

/// Re-run the evaluation at each k, sharing dataset and seed.
pub fn ablate_k(config: &EvalConfig, k_values: &[usize]) -> Result<Vec<(usize, EvalReport)>> {
    if k_values.is_empty() {
        return Err(Error::invalid("k_values must be nonempty"));
    }
    let mut series = Vec::with_capacity(k_values.len());
    for &k in k_values {
        let mut cfg = config.clone();
        cfg.k = k;
        series.push((k, run_eval(&cfg)?));
    }
    Ok(series)
}

/// Re-run the evaluation at each bin count, recalibrating on the pool.
pub fn ablate_bins(config: &EvalConfig, b_values: &[usize]) -> Result<Vec<(usize, EvalReport)>> {
    if b_values.is_empty() {
        return Err(Error::invalid("b_values must be nonempty"));
    }
    let mut series = Vec::with_capacity(b_values.len());
    for &bins in b_values {
        let mut cfg = config.clone();
        cfg.bins = bins;
        series.push((bins, run_eval(&cfg)?));
    }
    Ok(series)
}

/// Re-run the evaluation with each exemplar strategy.
pub fn ablate_strategy(
    config: &EvalConfig,
    strategies: &[StrategyChoice],
) -> Result<Vec<(StrategyChoice, EvalReport)>> {
    if strategies.is_empty() {
        return Err(Error::invalid("strategies must be nonempty"));
    }
    let mut series = Vec::with_capacity(strategies.len());
    for &strategy in strategies {
        let mut cfg = config.clone();
        cfg.strategy = strategy;
        series.push((strategy, run_eval(&cfg)?));
    }
    Ok(series)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Serialize the full report as pretty JSON.
pub fn report_json(report: &EvalReport) -> String {
    let mut json = serde_json::to_string_pretty(report).expect("report serializes");
    json.push('\n');
    json
}

fn report_csv(report: &EvalReport) -> String {
    let mut out =
        String::from("id,truth,snr_db,shortlist,predicted,correct,prompt_tokens,attempts\n");
    for r in &report.records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            r.id,
            r.truth,
            if r.snr_db == f64::INFINITY { "inf".to_string() } else { format!("{}", r.snr_db) },
            r.shortlist.join("|"),
            r.predicted.as_deref().unwrap_or(""),
            r.correct,
            r.prompt_tokens,
            r.attempt_count
        ));
    }
    out
}

fn snr_chart(report: &EvalReport) -> String {
    let mut spec = ChartSpec::new("Accuracy by SNR", "SNR (dB)", "Accuracy");
    spec.y_range = Some((0.0, 1.0));
    spec.series.push(Series {
        name: format!("k={}, B={}", report.config.k, report.config.bins),
        points: report
            .per_snr
            .iter()
            .filter(|b| b.n > 0)
            .map(|b| ((b.lo_db + b.hi_db) / 2.0, b.accuracy))
            .collect(),
    });
    crate::svg::render(&spec)
}

/// Write `<stem>.json`, `<stem>.csv`, and `<stem>.svg` for one report.
pub fn emit_report(report: &EvalReport, dir: &Path, stem: &str) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let json_path = dir.join(format!("{stem}.json"));
    let csv_path = dir.join(format!("{stem}.csv"));
    let svg_path = dir.join(format!("{stem}.svg"));
    write_text(&json_path, &report_json(report))?;
    write_text(&csv_path, &report_csv(report))?;
    write_text(&svg_path, &snr_chart(report))?;
    Ok(vec![json_path, csv_path, svg_path])
}

/// Write the k-sweep summary CSV and the accuracy/token twin-axis chart.
pub fn emit_k_series(
    series: &[(usize, EvalReport)],
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut csv = String::from("k,accuracy,mean_prompt_tokens\n");
    for (k, report) in series {
        csv.push_str(&format!(
            "{},{},{}\n",
            k, report.overall_accuracy, report.token_stats.mean
        ));
    }
    let csv_path = dir.join(format!("{stem}.csv"));
    write_text(&csv_path, &csv)?;

    let mut spec = ChartSpec::new("Accuracy and prompt size by k", "k", "Accuracy");
    spec.y_range = Some((0.0, 1.0));
    spec.series.push(Series {
        name: "accuracy".to_string(),
        points: series
            .iter()
            .map(|(k, r)| (*k as f64, r.overall_accuracy))
            .collect(),
    });
    spec.right_label = Some("Mean prompt tokens".to_string());
    spec.right_series.push(Series {
        name: "mean prompt tokens".to_string(),
        points: series
            .iter()
            .map(|(k, r)| (*k as f64, r.token_stats.mean))
            .collect(),
    });
    let svg_path = dir.join(format!("{stem}.svg"));
    write_text(&svg_path, &crate::svg::render(&spec))?;
    Ok(vec![csv_path, svg_path])
}

/// Write the bin-sweep summary CSV and accuracy chart.
pub fn emit_bins_series(
    series: &[(usize, EvalReport)],
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut csv = String::from("bins,accuracy,mean_prompt_tokens\n");
    for (bins, report) in series {
        csv.push_str(&format!(
            "{},{},{}\n",
            bins, report.overall_accuracy, report.token_stats.mean
        ));
    }
    let csv_path = dir.join(format!("{stem}.csv"));
    write_text(&csv_path, &csv)?;

    let mut spec = ChartSpec::new("Accuracy by bin count", "Bins", "Accuracy");
    spec.y_range = Some((0.0, 1.0));
    spec.series.push(Series {
        name: "accuracy".to_string(),
        points: series
            .iter()
            .map(|(bins, r)| (*bins as f64, r.overall_accuracy))
            .collect(),
    });
    let svg_path = dir.join(format!("{stem}.svg"));
    write_text(&svg_path, &crate::svg::render(&spec))?;
    Ok(vec![csv_path, svg_path])
}

/// Write the strategy-sweep summary CSV, recording the effective exemplar
/// seed so random runs can be replayed.
pub fn emit_strategy_series(
    series: &[(StrategyChoice, EvalReport)],
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut csv = String::from("strategy,accuracy,exemplar_seed\n");
    for (strategy, report) in series {
        let exemplar_seed = match strategy {
            StrategyChoice::Random => mix_seed(report.seed, 1).to_string(),
            _ => String::new(),
        };
        csv.push_str(&format!(
            "{},{},{}\n",
            strategy.name(),
            report.overall_accuracy,
            exemplar_seed
        ));
    }
    let csv_path = dir.join(format!("{stem}.csv"));
    write_text(&csv_path, &csv)?;
    Ok(vec![csv_path])
}

/// The prediction the mock centroid backend must produce: the ranked-first
/// shortlist member. Used to cross-check end-to-end runs.
pub fn restricted_centroid_prediction(
    model: &CentroidModel,
    fv: &crate::features::FeatureVector,
    shortlist: &[ModulationLabel],
) -> Option<ModulationLabel> {
    rank_all(model, fv)
        .into_iter()
        .map(|(label, _)| label)
        .find(|label| shortlist.contains(label))
}
