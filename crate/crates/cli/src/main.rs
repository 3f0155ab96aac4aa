//! `amc`: one binary driving the whole pipeline, stage by stage or end to
//! end. Data goes to files and stdout; logs go to stderr. Exit codes:
//! 0 success, 1 usage error, 2 data or format error, 3 transport error.

use clap::{ArgAction, Args, Parser, Subcommand};
use std::path::{Path, PathBuf};

use amc_core::csvio::{read_features_csv, write_features_csv, write_symbolic_csv, FeatureRow, SymbolicRow};
use amc_core::discretize::{calibrate_with_range, load_scheme, quantize, save_scheme, BinningScheme};
use amc_core::error::{Error, Result};
use amc_core::eval::{
    ablate_bins, ablate_k, ablate_strategy, emit_bins_series, emit_k_series, emit_report,
    emit_strategy_series, load_feature_rows, run_eval, BackendChoice, EvalConfig, EvalReport,
    MockChoice, ShortlistChoice, StrategyChoice,
};
use amc_core::labels::ModulationLabel;
use amc_core::llm::{classify, mock_classify, EndpointConfig, MockPolicy};
use amc_core::prompt::{select_exemplars, ExemplarPool, ExemplarRow, ExemplarStrategy, PromptBundle};
use amc_core::shortlist::{
    load_model, save_model, topk_accuracy, train_centroids, CentroidModel, ShortlistProvider,
};
use amc_core::siggen::{generate_dataset, mix_seed, snr_grid};

const API_KEY_ENV: &str = "AMC_API_KEY";
const ENDPOINT_ENV: &str = "AMC_ENDPOINT_URL";

#[derive(Parser)]
#[command(
    name = "amc",
    version,
    about = "Modulation classification experiments: signal synthesis, symbolic features, shortlisting, prompting, and evaluation"
)]
struct Cli {
    /// Increase stderr logging (repeatable).
    #[arg(short, long, global = true, action = ArgAction::Count)]
    verbose: u8,

    /// Directory for generated artifacts.
    #[arg(long, global = true, default_value = ".")]
    output_dir: PathBuf,

    /// Master seed; every stage's randomness derives from it.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// TOML config file mirroring the evaluation settings.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a dataset of noisy I/Q segments plus a manifest.
    Generate(GenerateArgs),
    /// Extract the 21 statistical features for every manifest entry.
    Features(FeaturesArgs),
    /// Fit equal-frequency bin edges on a features table.
    Calibrate(CalibrateArgs),
    /// Map a features table to 17-token symbolic rows.
    Quantize(QuantizeArgs),
    /// Train the nearest-centroid shortlist model.
    ShortlistTrain(ShortlistTrainArgs),
    /// Print the top-k accuracy table of a shortlist model.
    ShortlistEval(ShortlistEvalArgs),
    /// Assemble one query's prompt and print it.
    Prompt(PromptArgs),
    /// Classify one query via the mock or a live endpoint.
    Classify(ClassifyArgs),
    /// Evaluate a whole query dataset and emit reports.
    Eval(EvalArgs),
    /// Sweep the shortlist size k.
    AblateK(AblateKArgs),
    /// Sweep the discretization bin count.
    AblateBins(AblateBinsArgs),
    /// Sweep the exemplar selection strategy.
    AblateStrategy(AblateStrategyArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Comma-separated labels, or `all`.
    #[arg(long, default_value = "all")]
    classes: String,
    /// Segments per class.
    #[arg(long, default_value_t = 20)]
    per_class: usize,
    #[arg(long, default_value_t = -10.0)]
    snr_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    snr_hi: f64,
    /// Number of evenly spaced SNR points cycled over each class.
    #[arg(long, default_value_t = 5)]
    snr_steps: usize,
    #[arg(long, default_value_t = 1024)]
    n_symbols: usize,
    /// Samples per symbol.
    #[arg(long, default_value_t = 8)]
    sps: u32,
    /// Dataset directory; defaults to <output-dir>/dataset.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FeaturesArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Output CSV; defaults to <output-dir>/features.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Features CSV from the `features` subcommand.
    #[arg(long)]
    features: PathBuf,
    #[arg(long, default_value_t = 5)]
    bins: usize,
    #[arg(long, default_value_t = -10.0)]
    snr_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    snr_hi: f64,
    /// Output scheme JSON; defaults to <output-dir>/scheme.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct QuantizeArgs {
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    scheme: PathBuf,
    /// Output CSV; defaults to <output-dir>/symbolic.csv.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShortlistTrainArgs {
    #[arg(long)]
    features: PathBuf,
    /// Output model JSON; defaults to <output-dir>/model.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ShortlistEvalArgs {
    /// Features CSV to score against.
    #[arg(long)]
    features: PathBuf,
    #[arg(long)]
    model: PathBuf,
}

#[derive(Args, Clone)]
struct QueryPipelineArgs {
    /// Features CSV holding the query row.
    #[arg(long)]
    query_features: PathBuf,
    /// Query id within the features CSV.
    #[arg(long)]
    id: String,
    /// Features CSV for exemplars, calibration, and the centroid model.
    #[arg(long)]
    pool_features: PathBuf,
    /// Existing scheme JSON; omitted means calibrate from the pool.
    #[arg(long)]
    scheme: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    bins: usize,
    #[arg(long, default_value_t = -10.0)]
    snr_lo: f64,
    #[arg(long, default_value_t = 10.0)]
    snr_hi: f64,
    #[arg(long, default_value_t = 5)]
    k: usize,
    /// random | centroid | low_snr
    #[arg(long, default_value = "random")]
    strategy: String,
    /// centroid | oracle | file:PATH
    #[arg(long, default_value = "centroid")]
    shortlist_provider: String,
    /// Append the UNKNOWN reject option.
    #[arg(long)]
    allow_unknown: bool,
}

#[derive(Args)]
struct PromptArgs {
    #[command(flatten)]
    pipeline: QueryPipelineArgs,
}

#[derive(Args, Clone)]
struct BackendArgs {
    /// Mock reply policy: first_option | centroid | fixed:LABEL.
    #[arg(long)]
    mock: Option<String>,
    /// Chat-completions URL of a live endpoint.
    #[arg(long)]
    endpoint: Option<String>,
    /// Model name sent to the endpoint.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    timeout_s: Option<f64>,
    #[arg(long)]
    max_attempts: Option<u32>,
    #[arg(long)]
    backoff_ms: Option<u64>,
    /// Parallel request bound for live runs.
    #[arg(long)]
    max_in_flight: Option<usize>,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    pipeline: QueryPipelineArgs,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args, Clone)]
struct EvalArgs {
    #[arg(long)]
    query_manifest: Option<PathBuf>,
    #[arg(long)]
    pool_manifest: Option<PathBuf>,
    #[arg(long)]
    bins: Option<usize>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    snr_lo: Option<f64>,
    #[arg(long)]
    snr_hi: Option<f64>,
    /// random | centroid | low_snr
    #[arg(long)]
    strategy: Option<String>,
    /// centroid | oracle | file:PATH
    #[arg(long)]
    shortlist_provider: Option<String>,
    /// Append the UNKNOWN reject option.
    #[arg(long)]
    allow_unknown: bool,
    /// Keep full prompt texts in the per-query records.
    #[arg(long)]
    keep_prompts: bool,
    /// Evaluate the full-precision baseline prompt instead.
    #[arg(long)]
    baseline: bool,
    #[arg(long)]
    concurrency: Option<usize>,
    /// Basename for report files written to the output dir.
    #[arg(long, default_value = "report")]
    out_stem: String,
    #[command(flatten)]
    backend: BackendArgs,
}

#[derive(Args)]
struct AblateKArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Comma-separated shortlist sizes.
    #[arg(long, default_value = "1,2,3,4,5,6,7,8,9,10")]
    k_values: String,
}

#[derive(Args)]
struct AblateBinsArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Comma-separated bin counts.
    #[arg(long, default_value = "3,5,10,20")]
    bin_values: String,
}

#[derive(Args)]
struct AblateStrategyArgs {
    #[command(flatten)]
    eval: EvalArgs,
    /// Comma-separated strategies.
    #[arg(long, default_value = "random,centroid,low_snr")]
    strategies: String,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    match run(cli) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(exit_code(&e));
        }
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::InvalidArgument(_) => 1,
        Error::Transport { .. } => 3,
        _ => 2,
    }
}

fn run(cli: Cli) -> Result<()> {
    let file_config = match &cli.config {
        Some(path) => Some(load_toml_config(path)?),
        None => None,
    };
    let master_seed = cli
        .seed
        .unwrap_or_else(|| file_config.as_ref().map(|c| c.seed).unwrap_or(0));
    eprintln!("master seed: {master_seed}");

    match &cli.command {
        Command::Generate(args) => cmd_generate(&cli, args, master_seed),
        Command::Features(args) => cmd_features(&cli, args),
        Command::Calibrate(args) => cmd_calibrate(&cli, args),
        Command::Quantize(args) => cmd_quantize(&cli, args),
        Command::ShortlistTrain(args) => cmd_shortlist_train(&cli, args),
        Command::ShortlistEval(args) => cmd_shortlist_eval(args),
        Command::Prompt(args) => cmd_prompt(args, master_seed),
        Command::Classify(args) => cmd_classify(args, master_seed),
        Command::Eval(args) => cmd_eval(&cli, args, file_config, master_seed),
        Command::AblateK(args) => cmd_ablate_k(&cli, args, file_config, master_seed),
        Command::AblateBins(args) => cmd_ablate_bins(&cli, args, file_config, master_seed),
        Command::AblateStrategy(args) => cmd_ablate_strategy(&cli, args, file_config, master_seed),
    }
}

fn load_toml_config(path: &Path) -> Result<EvalConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

fn log(cli: &Cli, msg: &str) {
    if cli.verbose > 0 {
        eprintln!("{msg}");
    }
}

fn parse_classes(text: &str) -> Result<Vec<ModulationLabel>> {
    if text.eq_ignore_ascii_case("all") {
        return Ok(ModulationLabel::ALL.to_vec());
    }
    text.split(',')
        .map(|name| {
            name.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("unknown class `{name}` in --classes")))
        })
        .collect()
}

fn parse_strategy_choice(text: &str) -> Result<StrategyChoice> {
    match text {
        "random" => Ok(StrategyChoice::Random),
        "centroid" => Ok(StrategyChoice::Centroid),
        "low_snr" => Ok(StrategyChoice::LowSnr),
        other => Err(Error::invalid(format!(
            "--strategy must be random, centroid, or low_snr, got `{other}`"
        ))),
    }
}

fn parse_provider_choice(text: &str) -> Result<ShortlistChoice> {
    match text {
        "centroid" => Ok(ShortlistChoice::Centroid),
        "oracle" => Ok(ShortlistChoice::Oracle),
        other => match other.strip_prefix("file:") {
            Some(path) if !path.is_empty() => Ok(ShortlistChoice::File(PathBuf::from(path))),
            _ => Err(Error::invalid(format!(
                "--shortlist-provider must be centroid, oracle, or file:PATH, got `{other}`"
            ))),
        },
    }
}

fn parse_mock_choice(text: &str) -> Result<MockChoice> {
    match text {
        "first_option" => Ok(MockChoice::FirstOption),
        "centroid" => Ok(MockChoice::Centroid),
        other => match other.strip_prefix("fixed:") {
            Some(label) if !label.is_empty() => Ok(MockChoice::Fixed(label.to_string())),
            _ => Err(Error::invalid(format!(
                "--mock must be first_option, centroid, or fixed:LABEL, got `{other}`"
            ))),
        },
    }
}

fn parse_usize_list(text: &str, flag: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| Error::invalid(format!("bad value `{part}` in {flag}")))
        })
        .collect()
}

fn apply_endpoint_flags(endpoint: &mut EndpointConfig, backend: &BackendArgs) {
    if let Some(url) = &backend.endpoint {
        endpoint.url = url.clone();
    }
    if let Some(model) = &backend.model {
        endpoint.model = model.clone();
    }
    if let Some(secs) = backend.timeout_s {
        endpoint.timeout_ms = (secs * 1000.0) as u64;
    }
    if let Some(attempts) = backend.max_attempts {
        endpoint.max_attempts = attempts;
    }
    if let Some(ms) = backend.backoff_ms {
        endpoint.backoff_base_ms = ms;
    }
    if let Some(n) = backend.max_in_flight {
        endpoint.max_in_flight = n;
    }
    if let Ok(url) = std::env::var(ENDPOINT_ENV) {
        endpoint.url = url;
    }
    if let Ok(key) = std::env::var(API_KEY_ENV) {
        endpoint.api_key = Some(key);
    }
}

/// Flags beat the config file; the mock flag beats endpoint flags.
fn resolve_backend(current: BackendChoice, backend: &BackendArgs) -> Result<BackendChoice> {
    if let Some(mock) = &backend.mock {
        return Ok(BackendChoice::Mock(parse_mock_choice(mock)?));
    }
    if backend.endpoint.is_some() {
        let mut endpoint = match current {
            BackendChoice::Http(e) => e,
            BackendChoice::Mock(_) => EndpointConfig::default(),
        };
        apply_endpoint_flags(&mut endpoint, backend);
        return Ok(BackendChoice::Http(endpoint));
    }
    Ok(match current {
        BackendChoice::Http(mut endpoint) => {
            apply_endpoint_flags(&mut endpoint, backend);
            BackendChoice::Http(endpoint)
        }
        mock => mock,
    })
}

fn resolve_eval_config(
    file_config: Option<EvalConfig>,
    args: &EvalArgs,
    master_seed: u64,
) -> Result<EvalConfig> {
    let mut cfg = file_config.unwrap_or_default();
    if let Some(p) = &args.query_manifest {
        cfg.query_manifest = p.clone();
    }
    if let Some(p) = &args.pool_manifest {
        cfg.pool_manifest = p.clone();
    }
    if let Some(b) = args.bins {
        cfg.bins = b;
    }
    if let Some(k) = args.k {
        cfg.k = k;
    }
    if let Some(lo) = args.snr_lo {
        cfg.snr_range.0 = lo;
    }
    if let Some(hi) = args.snr_hi {
        cfg.snr_range.1 = hi;
    }
    if let Some(s) = &args.strategy {
        cfg.strategy = parse_strategy_choice(s)?;
    }
    if let Some(s) = &args.shortlist_provider {
        cfg.shortlist = parse_provider_choice(s)?;
    }
    if args.allow_unknown {
        cfg.allow_unknown = true;
    }
    if args.keep_prompts {
        cfg.keep_prompts = true;
    }
    if args.baseline {
        cfg.baseline = true;
    }
    if let Some(n) = args.concurrency {
        cfg.concurrency = Some(n);
    }
    cfg.backend = resolve_backend(cfg.backend, &args.backend)?;
    cfg.seed = master_seed;
    if cfg.query_manifest.as_os_str().is_empty() {
        return Err(Error::invalid(
            "--query-manifest is required (or set query_manifest in the config file)",
        ));
    }
    if cfg.pool_manifest.as_os_str().is_empty() {
        return Err(Error::invalid(
            "--pool-manifest is required (or set pool_manifest in the config file)",
        ));
    }
    Ok(cfg)
}

fn cmd_generate(cli: &Cli, args: &GenerateArgs, master_seed: u64) -> Result<()> {
    let classes = parse_classes(&args.classes)?;
    let grid = snr_grid(args.snr_lo, args.snr_hi, args.snr_steps);
    let out_dir = args
        .out
        .clone()
        .unwrap_or_else(|| cli.output_dir.join("dataset"));
    let manifest = generate_dataset(
        &classes,
        args.per_class,
        &grid,
        args.n_symbols,
        args.sps,
        master_seed,
        &out_dir,
    )?;
    log(cli, &format!("wrote {} segments", manifest.entries.len()));
    println!("{}", out_dir.join("manifest.json").display());
    Ok(())
}

fn cmd_features(cli: &Cli, args: &FeaturesArgs) -> Result<()> {
    let rows = load_feature_rows(&args.manifest)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| cli.output_dir.join("features.csv"));
    write_features_csv(&out, &rows)?;
    log(cli, &format!("extracted features for {} segments", rows.len()));
    println!("{}", out.display());
    Ok(())
}

fn cmd_calibrate(cli: &Cli, args: &CalibrateArgs) -> Result<()> {
    let rows = read_features_csv(&args.features)?;
    let corpus: Vec<_> = rows.iter().map(|r| r.features.clone()).collect();
    let scheme = calibrate_with_range(&corpus, args.bins, (args.snr_lo, args.snr_hi))?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| cli.output_dir.join("scheme.json"));
    save_scheme(&out, &scheme)?;
    println!("{}", out.display());
    Ok(())
}

fn cmd_quantize(cli: &Cli, args: &QuantizeArgs) -> Result<()> {
    let rows = read_features_csv(&args.features)?;
    let scheme = load_scheme(&args.scheme)?;
    let mut symbolic = Vec::with_capacity(rows.len());
    for row in &rows {
        symbolic.push(SymbolicRow {
            id: row.id.clone(),
            label: row.label,
            symbolic: quantize(&row.features, &scheme)?,
        });
    }
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| cli.output_dir.join("symbolic.csv"));
    write_symbolic_csv(&out, &symbolic)?;
    println!("{}", out.display());
    Ok(())
}

fn training_rows(rows: &[FeatureRow]) -> Vec<(ModulationLabel, amc_core::features::FeatureVector)> {
    rows.iter().map(|r| (r.label, r.features.clone())).collect()
}

fn cmd_shortlist_train(cli: &Cli, args: &ShortlistTrainArgs) -> Result<()> {
    let rows = read_features_csv(&args.features)?;
    let model = train_centroids(&training_rows(&rows))?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| cli.output_dir.join("model.json"));
    save_model(&out, &model)?;
    println!("{}", out.display());
    Ok(())
}

fn cmd_shortlist_eval(args: &ShortlistEvalArgs) -> Result<()> {
    let rows = read_features_csv(&args.features)?;
    let model = load_model(&args.model)?;
    let eval_rows = training_rows(&rows);
    println!("k,topk_accuracy");
    for k in 1..=model.class_count() {
        let accuracy = topk_accuracy(&model, &eval_rows, k)?;
        println!("{k},{accuracy}");
    }
    Ok(())
}

struct QueryPipeline {
    bundle: PromptBundle,
    query: FeatureRow,
    model: CentroidModel,
}

fn build_query_pipeline(args: &QueryPipelineArgs, master_seed: u64) -> Result<QueryPipeline> {
    let query_rows = read_features_csv(&args.query_features)?;
    let query = query_rows
        .iter()
        .find(|r| r.id == args.id)
        .cloned()
        .ok_or_else(|| {
            Error::invalid(format!(
                "query id `{}` not found in {}",
                args.id,
                args.query_features.display()
            ))
        })?;
    let pool_rows = read_features_csv(&args.pool_features)?;
    let model = train_centroids(&training_rows(&pool_rows))?;
    let scheme: BinningScheme = match &args.scheme {
        Some(path) => load_scheme(path)?,
        None => {
            let corpus: Vec<_> = pool_rows.iter().map(|r| r.features.clone()).collect();
            calibrate_with_range(&corpus, args.bins, (args.snr_lo, args.snr_hi))?
        }
    };
    let provider = match parse_provider_choice(&args.shortlist_provider)? {
        ShortlistChoice::Centroid => ShortlistProvider::Centroid(model.clone()),
        ShortlistChoice::Oracle => ShortlistProvider::Oracle {
            seed: mix_seed(master_seed, 2),
            classes: ModulationLabel::ALL
                .iter()
                .copied()
                .filter(|label| pool_rows.iter().any(|r| r.label == *label))
                .collect(),
        },
        ShortlistChoice::File(path) => {
            ShortlistProvider::Imported(amc_core::shortlist::import_shortlists(&path)?)
        }
    };
    let shortlist = provider.shortlist_for(&query.id, query.label, &query.features, args.k)?;
    let strategy = match parse_strategy_choice(&args.strategy)? {
        StrategyChoice::Random => ExemplarStrategy::Random {
            seed: mix_seed(master_seed, 1),
        },
        StrategyChoice::Centroid => ExemplarStrategy::Centroid(model.clone()),
        StrategyChoice::LowSnr => ExemplarStrategy::LowSnr,
    };
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
    let picks = select_exemplars(&pool, &shortlist, &strategy)?;
    let mut exemplars = Vec::with_capacity(picks.len());
    for pick in picks {
        exemplars.push((pick.label, quantize(&pick.features, &scheme)?));
    }
    let query_sym = quantize(&query.features, &scheme)?;
    let bundle = amc_core::prompt::build_prompt(
        &query.id,
        &query_sym,
        &shortlist,
        &exemplars,
        args.allow_unknown,
    )?;
    Ok(QueryPipeline {
        bundle,
        query,
        model,
    })
}

fn cmd_prompt(args: &PromptArgs, master_seed: u64) -> Result<()> {
    let pipeline = build_query_pipeline(&args.pipeline, master_seed)?;
    eprintln!(
        "estimated tokens: {} (template {})",
        pipeline.bundle.estimated_tokens, pipeline.bundle.template_version
    );
    println!("{}", pipeline.bundle.text);
    Ok(())
}

fn cmd_classify(args: &ClassifyArgs, master_seed: u64) -> Result<()> {
    let pipeline = build_query_pipeline(&args.pipeline, master_seed)?;
    let result = if let Some(mock) = &args.backend.mock {
        let policy = match parse_mock_choice(mock)? {
            MockChoice::FirstOption => MockPolicy::FirstOption,
            MockChoice::Centroid => MockPolicy::Centroid(pipeline.model.clone()),
            MockChoice::Fixed(label) => MockPolicy::Fixed(label),
        };
        mock_classify(&pipeline.bundle, &policy, Some(&pipeline.query.features))
    } else if args.backend.endpoint.is_some() || std::env::var(ENDPOINT_ENV).is_ok() {
        let mut endpoint = EndpointConfig::default();
        apply_endpoint_flags(&mut endpoint, &args.backend);
        classify(&endpoint, &pipeline.bundle)?
    } else {
        return Err(Error::invalid(
            "provide --mock POLICY for offline use or --endpoint URL for a live call",
        ));
    };
    let json = serde_json::to_string_pretty(&result)
        .map_err(|e| Error::invalid(format!("result serialization failed: {e}")))?;
    println!("{json}");
    Ok(())
}

fn print_report_summary(report: &EvalReport) {
    println!(
        "queries {}  accuracy {:.4}  shortlist_recall {:.4}  parse_failures {}  mean_tokens {:.1}",
        report.n_queries,
        report.overall_accuracy,
        report.shortlist_recall,
        report.parse_failures,
        report.token_stats.mean
    );
}

fn cmd_eval(
    cli: &Cli,
    args: &EvalArgs,
    file_config: Option<EvalConfig>,
    master_seed: u64,
) -> Result<()> {
    let cfg = resolve_eval_config(file_config, args, master_seed)?;
    let report = run_eval(&cfg)?;
    print_report_summary(&report);
    let files = emit_report(&report, &cli.output_dir, &args.out_stem)?;
    for file in files {
        println!("{}", file.display());
    }
    log(cli, &format!("wall clock: {:?}", report.wall_clock));
    Ok(())
}

fn cmd_ablate_k(
    cli: &Cli,
    args: &AblateKArgs,
    file_config: Option<EvalConfig>,
    master_seed: u64,
) -> Result<()> {
    let cfg = resolve_eval_config(file_config, &args.eval, master_seed)?;
    let k_values = parse_usize_list(&args.k_values, "--k-values")?;
    let series = ablate_k(&cfg, &k_values)?;
    println!("k,accuracy,mean_prompt_tokens");
    for (k, report) in &series {
        println!("{},{},{}", k, report.overall_accuracy, report.token_stats.mean);
    }
    let stem = format!("{}_by_k", args.eval.out_stem);
    for file in emit_k_series(&series, &cli.output_dir, &stem)? {
        println!("{}", file.display());
    }
    Ok(())
}

fn cmd_ablate_bins(
    cli: &Cli,
    args: &AblateBinsArgs,
    file_config: Option<EvalConfig>,
    master_seed: u64,
) -> Result<()> {
    let cfg = resolve_eval_config(file_config, &args.eval, master_seed)?;
    let bin_values = parse_usize_list(&args.bin_values, "--bin-values")?;
    let series = ablate_bins(&cfg, &bin_values)?;
    println!("bins,accuracy,mean_prompt_tokens");
    for (bins, report) in &series {
        println!("{},{},{}", bins, report.overall_accuracy, report.token_stats.mean);
    }
    let stem = format!("{}_by_bins", args.eval.out_stem);
    for file in emit_bins_series(&series, &cli.output_dir, &stem)? {
        println!("{}", file.display());
    }
    Ok(())
}

fn cmd_ablate_strategy(
    cli: &Cli,
    args: &AblateStrategyArgs,
    file_config: Option<EvalConfig>,
    master_seed: u64,
) -> Result<()> {
    let cfg = resolve_eval_config(file_config, &args.eval, master_seed)?;
    let strategies: Vec<StrategyChoice> = args
        .strategies
        .split(',')
        .map(|s| parse_strategy_choice(s.trim()))
        .collect::<Result<_>>()?;
    let series = ablate_strategy(&cfg, &strategies)?;
    println!("strategy,accuracy");
    for (strategy, report) in &series {
        println!("{},{}", strategy.name(), report.overall_accuracy);
    }
    let stem = format!("{}_by_strategy", args.eval.out_stem);
    for file in emit_strategy_series(&series, &cli.output_dir, &stem)? {
        println!("{}", file.display());
    }
    Ok(())
}
