//! Acceptance suite: one numbered test per released claim. Each test prints
//! a single verdict line ("criterion N: pass (...)" or "criterion N: FAIL
//! (...)") with the measured values behind it; run with `-- --nocapture` to
//! see the lines for passing tests.
//!
//! The shared fixture is the standard protocol: two disjoint datasets of 10
//! classes x 20 segments each, SNR cycled over {-10, -5, 0, 5, 10} dB, 1024
//! symbols at 8 samples per symbol. The query set is evaluated; the pool set
//! supplies calibration, centroid training, and exemplars.

use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use amc_core::csvio::FeatureRow;
use amc_core::discretize::{calibrate, load_scheme, quantize, save_scheme, TOKEN_COUNT};
use amc_core::eval::{
    ablate_bins, ablate_k, emit_k_series, load_feature_rows, report_json,
    restricted_centroid_prediction, run_eval, EvalConfig, ShortlistChoice,
};
use amc_core::features::{
    cumulants, extract_features, mixed_moment, FeatureVector, FEATURE_COUNT, FEATURE_NAMES,
    MOMENT_ORDERS, RETAINED_FEATURE_COUNT, RETAINED_OFFSET,
};
use amc_core::labels::ModulationLabel;
use amc_core::llm::{classify, EndpointConfig};
use amc_core::prompt::{
    build_prompt, select_exemplars, ExemplarPool, ExemplarRow, ExemplarStrategy, PromptBundle,
};
use amc_core::shortlist::{shortlist, topk_accuracy, train_centroids, CentroidModel};
use amc_core::siggen::{amplitude_alphabet, generate_dataset, mix_seed, modulate, snr_grid};
use amc_core::svg::{self, ChartSpec, Series};

const QUERY_SEED: u64 = 7001;
const POOL_SEED: u64 = 7002;
const RUN_SEED: u64 = 4242;

/// Measured once on the fixed-seed protocol, then pinned as a lower bound so
/// shortlist quality cannot silently regress.
const K5_TOPK_LOWER_BOUND: f64 = 0.86;

fn verdict(criterion: u32, ok: bool, detail: &str) {
    let tag = if ok { "pass" } else { "FAIL" };
    println!("criterion {criterion}: {tag} ({detail})");
    assert!(ok, "criterion {criterion} failed: {detail}");
}

struct Protocol {
    _dir: tempfile::TempDir,
    query_manifest: PathBuf,
    pool_manifest: PathBuf,
    query_rows: Vec<FeatureRow>,
    pool_rows: Vec<FeatureRow>,
}

static PROTOCOL: OnceLock<Protocol> = OnceLock::new();

fn protocol() -> &'static Protocol {
    PROTOCOL.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let grid = snr_grid(-10.0, 10.0, 5);
        let query_dir = dir.path().join("queries");
        let pool_dir = dir.path().join("pool");
        generate_dataset(&ModulationLabel::ALL, 20, &grid, 1024, 8, QUERY_SEED, &query_dir)
            .unwrap();
        generate_dataset(&ModulationLabel::ALL, 20, &grid, 1024, 8, POOL_SEED, &pool_dir)
            .unwrap();
        let query_manifest = query_dir.join("manifest.json");
        let pool_manifest = pool_dir.join("manifest.json");
        let query_rows = load_feature_rows(&query_manifest).unwrap();
        let pool_rows = load_feature_rows(&pool_manifest).unwrap();
        assert_eq!(query_rows.len(), 200);
        assert_eq!(pool_rows.len(), 200);
        Protocol {
            _dir: dir,
            query_manifest,
            pool_manifest,
            query_rows,
            pool_rows,
        }
    })
}

fn protocol_config() -> EvalConfig {
    let p = protocol();
    EvalConfig {
        query_manifest: p.query_manifest.clone(),
        pool_manifest: p.pool_manifest.clone(),
        seed: RUN_SEED,
        ..EvalConfig::default()
    }
}

fn training_rows(rows: &[FeatureRow]) -> Vec<(ModulationLabel, FeatureVector)> {
    rows.iter().map(|r| (r.label, r.features.clone())).collect()
}

fn pool_corpus() -> Vec<FeatureVector> {
    protocol().pool_rows.iter().map(|r| r.features.clone()).collect()
}

fn pool_model() -> CentroidModel {
    train_centroids(&training_rows(&protocol().pool_rows)).unwrap()
}

fn artifact_dir() -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn widen(seg: &amc_core::siggen::IQSegment) -> Vec<Complex64> {
    seg.samples
        .iter()
        .map(|s| Complex64::new(s.re as f64, s.im as f64))
        .collect()
}

#[test]
fn criterion_01_symbolic_prompts_halve_the_token_budget() {
    protocol();
    let started = Instant::now();
    let symbolic = run_eval(&protocol_config()).unwrap();
    let baseline = run_eval(&EvalConfig {
        baseline: true,
        ..protocol_config()
    })
    .unwrap();
    let elapsed = started.elapsed().as_secs_f64();
    let ratio = symbolic.token_stats.mean / baseline.token_stats.mean;
    let ok = symbolic.n_queries == 200
        && baseline.n_queries == 200
        && ratio < 0.5
        && elapsed < 60.0;
    verdict(
        1,
        ok,
        &format!(
            "mean prompt tokens {:.1} symbolic vs {:.1} baseline over 200 queries, ratio {:.3} < 0.5, {:.1}s",
            symbolic.token_stats.mean, baseline.token_stats.mean, ratio, elapsed
        ),
    );
}

#[test]
fn criterion_02_feature_vector_21_and_symbolic_17() {
    let seg = modulate(ModulationLabel::Gmsk, 256, 4, 1).unwrap();
    let fv = extract_features(&seg).unwrap();
    let scheme = calibrate(&pool_corpus(), 5).unwrap();
    let sym = quantize(&protocol().query_rows[0].features, &scheme).unwrap();
    let rendered_fields = sym.render().split(", ").count();
    let ok = FEATURE_COUNT == 21
        && FEATURE_NAMES.len() == 21
        && fv.values.len() == 21
        && TOKEN_COUNT == 17
        && sym.tokens.len() == 17
        && rendered_fields == 17;
    verdict(
        2,
        ok,
        &format!(
            "{} named features per vector, {} symbolic tokens per quantized row",
            fv.values.len(),
            sym.tokens.len()
        ),
    );
}

#[test]
fn criterion_03_cumulants_match_analytic_alphabet_values() {
    let started = Instant::now();
    let linear = [
        ModulationLabel::Ook,
        ModulationLabel::Ask4,
        ModulationLabel::Ask8,
        ModulationLabel::Pam4,
        ModulationLabel::Pam16,
    ];
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    for label in linear {
        let seg = modulate(label, 65536, 1, 31).unwrap();
        let cs = cumulants(&widen(&seg)).unwrap();
        // Exact expectation over the normalized symbol alphabet. For a real
        // centered symbol s, C40 = C42 = E[s^4] - 3 E[s^2]^2.
        let alphabet = amplitude_alphabet(label).unwrap();
        let n = alphabet.len() as f64;
        let mean = alphabet.iter().sum::<f64>() / n;
        let var = alphabet.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
        let mu4 = alphabet.iter().map(|a| (a - mean).powi(4)).sum::<f64>() / n;
        let expected = mu4 - 3.0 * var * var;
        if label == ModulationLabel::Ask4 {
            assert!(
                (expected + 1.36).abs() < 1e-9,
                "4ASK analytic C40 should be -1.36, got {expected}"
            );
        }
        for (name, got) in [("C40", cs.c40), ("C42", cs.c42)] {
            let dev = (got.re - expected).abs().max(got.im.abs());
            worst = worst.max(dev);
            if dev >= 0.05 {
                failures.push(format!("{label} {name} {:.4} vs {expected:.4}", got.re));
            }
        }
    }
    // Pure circular complex noise: everything above order two vanishes.
    let mut rng = ChaCha8Rng::seed_from_u64(97);
    let scale = std::f64::consts::FRAC_1_SQRT_2;
    let noise: Vec<Complex64> = (0..65536)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(re * scale, im * scale)
        })
        .collect();
    let cs = cumulants(&noise).unwrap();
    for (name, norm) in [
        ("C40", cs.c40.norm()),
        ("C42", cs.c42.norm()),
        ("C63", cs.c63.norm()),
    ] {
        worst = worst.max(norm);
        if norm >= 0.05 {
            failures.push(format!("awgn |{name}| = {norm:.4}"));
        }
    }
    verdict(
        3,
        failures.is_empty(),
        &format!(
            "5 linear alphabets + awgn at n=65536, worst deviation {:.4} < 0.05, {:.1}s{}",
            worst,
            started.elapsed().as_secs_f64(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    );
}

#[test]
fn criterion_04_moments_match_direct_summation() {
    // Independent reference on bare (re, im) tuples, no complex library.
    fn naive(samples: &[Complex64], p: u32, q: u32) -> (f64, f64) {
        fn mul(a: (f64, f64), b: (f64, f64)) -> (f64, f64) {
            (a.0 * b.0 - a.1 * b.1, a.0 * b.1 + a.1 * b.0)
        }
        let mut sum = (0.0, 0.0);
        for x in samples {
            let mut acc = (1.0, 0.0);
            for _ in 0..(p - q) {
                acc = mul(acc, (x.re, x.im));
            }
            for _ in 0..q {
                acc = mul(acc, (x.re, -x.im));
            }
            sum = (sum.0 + acc.0, sum.1 + acc.1);
        }
        let n = samples.len() as f64;
        (sum.0 / n, sum.1 / n)
    }

    let mut worst: f64 = 0.0;
    for seed in 0..100u64 {
        let n = 128 + (seed as usize * 53) % 2911;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let samples: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
            .collect();
        for (p, q) in MOMENT_ORDERS {
            let ours = mixed_moment(&samples, p, q).unwrap();
            let (re, im) = naive(&samples, p, q);
            let reference = Complex64::new(re, im);
            let rel = (ours - reference).norm() / reference.norm().max(1e-30);
            worst = worst.max(rel);
        }
    }
    verdict(
        4,
        worst <= 1e-12,
        &format!("12 moment orders x 100 seeded vectors, worst relative error {worst:.2e} <= 1e-12"),
    );
}

#[test]
fn criterion_05_topk_curve_is_monotone_and_saturates() {
    let model = pool_model();
    let eval_rows = training_rows(&protocol().query_rows);
    let curve: Vec<f64> = (1..=10)
        .map(|k| topk_accuracy(&model, &eval_rows, k).unwrap())
        .collect();

    let dir = artifact_dir();
    let mut csv = String::from("k,topk_accuracy\n");
    for (i, acc) in curve.iter().enumerate() {
        csv.push_str(&format!("{},{}\n", i + 1, acc));
    }
    std::fs::write(dir.join("topk_curve.csv"), &csv).unwrap();
    let mut chart = ChartSpec::new("Centroid shortlist recall", "k", "top-k accuracy");
    chart.y_range = Some((0.0, 1.0));
    chart.series.push(Series {
        name: "top-k accuracy".to_string(),
        points: curve
            .iter()
            .enumerate()
            .map(|(i, acc)| ((i + 1) as f64, *acc))
            .collect(),
    });
    std::fs::write(dir.join("topk_curve.svg"), svg::render(&chart)).unwrap();

    let monotone = curve.windows(2).all(|w| w[0] <= w[1]);
    let saturates = curve[9] == 1.0;
    let k5 = curve[4];
    let ok = monotone && saturates && k5 >= K5_TOPK_LOWER_BOUND;
    verdict(
        5,
        ok,
        &format!(
            "k=1 {:.4}, k=5 {:.4} (pinned bound {:.4}), k=10 {:.1}; curve at {}",
            curve[0],
            k5,
            K5_TOPK_LOWER_BOUND,
            curve[9],
            dir.join("topk_curve.csv").display()
        ),
    );
}

#[test]
fn criterion_06_discretizer_contract() {
    let corpus = pool_corpus();
    let scheme = calibrate(&corpus, 5).unwrap();
    let mut failures = Vec::new();

    // Monotone: walking one feature upward through every corpus value never
    // decreases its token.
    let template = &protocol().pool_rows[0].features;
    for rf in 0..RETAINED_FEATURE_COUNT {
        let mut values: Vec<f64> = corpus.iter().map(|fv| fv.values[RETAINED_OFFSET + rf]).collect();
        values.sort_by(f64::total_cmp);
        let mut last = 0u8;
        for (i, v) in values.iter().enumerate() {
            let mut probe = template.clone();
            probe.values[RETAINED_OFFSET + rf] = *v;
            let token = quantize(&probe, &scheme).unwrap().tokens[1 + rf].1 as u8;
            if i > 0 && token < last {
                failures.push(format!("{} not monotone at {v}", FEATURE_NAMES[RETAINED_OFFSET + rf]));
                break;
            }
            last = token;
        }
    }

    // Equal-frequency occupancy: each bin holds n/B corpus values, give or
    // take the multiplicity of tied values.
    let symbolic: Vec<_> = corpus.iter().map(|fv| quantize(fv, &scheme).unwrap()).collect();
    let ideal = corpus.len() as f64 / 5.0;
    let mut worst_slackless = 0.0f64;
    for rf in 0..RETAINED_FEATURE_COUNT {
        let mut counts = [0usize; 5];
        for sym in &symbolic {
            counts[(sym.tokens[1 + rf].1 as u8 - b'A') as usize] += 1;
        }
        let mut multiplicity = std::collections::HashMap::new();
        for fv in &corpus {
            *multiplicity
                .entry(fv.values[RETAINED_OFFSET + rf].to_bits())
                .or_insert(0usize) += 1;
        }
        let slack = *multiplicity.values().max().unwrap() as f64;
        for (bin, count) in counts.iter().enumerate() {
            let dev = (*count as f64 - ideal).abs();
            if slack <= 1.0 {
                worst_slackless = worst_slackless.max(dev);
            }
            if dev > slack {
                failures.push(format!(
                    "{} bin {bin} holds {count} of {} (ideal {ideal}, tie slack {slack})",
                    FEATURE_NAMES[RETAINED_OFFSET + rf],
                    corpus.len()
                ));
            }
        }
    }

    // Fit, serialize, reload: the reloaded scheme is the fitted scheme, a
    // refit reproduces it, and both quantize every row identically.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scheme.json");
    save_scheme(&path, &scheme).unwrap();
    let reloaded = load_scheme(&path).unwrap();
    if reloaded != scheme {
        failures.push("reloaded scheme differs from the fitted one".to_string());
    }
    if calibrate(&corpus, 5).unwrap() != scheme {
        failures.push("refitting the same corpus changed the scheme".to_string());
    }
    for (fv, sym) in corpus.iter().zip(symbolic.iter()) {
        if quantize(fv, &reloaded).unwrap() != *sym {
            failures.push("reloaded scheme quantizes differently".to_string());
            break;
        }
    }

    verdict(
        6,
        failures.is_empty(),
        &format!(
            "16 features x 200 rows: monotone, occupancy within ties (untied deviation <= {worst_slackless}), reload idempotent{}",
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    );
}

fn fixed_seed_bundle(allow_unknown: bool) -> PromptBundle {
    let p = protocol();
    let model = pool_model();
    let scheme = calibrate(&pool_corpus(), 5).unwrap();
    let query = p.query_rows.iter().find(|r| r.id == "4ASK_0000").unwrap();
    let options = shortlist(&model, &query.features, 5).unwrap();
    let strategy = ExemplarStrategy::Random {
        seed: mix_seed(RUN_SEED, 1),
    };
    let pool = ExemplarPool {
        rows: p
            .pool_rows
            .iter()
            .map(|r| ExemplarRow {
                id: r.id.clone(),
                label: r.label,
                features: r.features.clone(),
            })
            .collect(),
    };
    let picks = select_exemplars(&pool, &options, &strategy).unwrap();
    let exemplars: Vec<_> = picks
        .iter()
        .map(|r| (r.label, quantize(&r.features, &scheme).unwrap()))
        .collect();
    build_prompt(
        &query.id,
        &quantize(&query.features, &scheme).unwrap(),
        &options,
        &exemplars,
        allow_unknown,
    )
    .unwrap()
}

/// Regenerates the checked-in golden prompt; run explicitly after a
/// deliberate template change, then copy the dump over the golden file.
#[test]
#[ignore = "writes the golden prompt into the artifact dir for manual refresh"]
fn dump_fixed_seed_prompt() {
    let path = artifact_dir().join("prompt_fixed_seed.txt");
    std::fs::write(&path, fixed_seed_bundle(false).text).unwrap();
    println!("golden dump written to {}", path.display());
}

#[test]
fn criterion_07_prompt_structure_golden() {
    let bundle = fixed_seed_bundle(false);
    let golden = include_str!("golden/prompt_fixed_seed.txt");
    let mut failures = Vec::new();

    if bundle.text != golden {
        failures.push("prompt text differs from the golden file".to_string());
    }
    for header in [
        "**ROLE:**",
        "**OBJECTIVE:**",
        "**CONTEXT:**",
        "**RESPONSE RULES:**",
        "**TASK EXECUTION:**",
    ] {
        if !bundle.text.contains(header) {
            failures.push(format!("missing header {header}"));
        }
    }
    let answers: Vec<&str> = bundle
        .text
        .lines()
        .filter(|l| l.starts_with("**Answer:**"))
        .collect();
    if answers.len() != bundle.options.len() + 1 {
        failures.push(format!(
            "{} answer lines for {} options",
            answers.len(),
            bundle.options.len()
        ));
    } else {
        for (answer, option) in answers.iter().zip(bundle.options.iter()) {
            if *answer != format!("**Answer:** {option}") {
                failures.push(format!("exemplar answer `{answer}` does not close with {option}"));
            }
        }
        if *answers.last().unwrap() != "**Answer:**" {
            failures.push("last answer line is not bare".to_string());
        }
    }
    if !bundle.text.ends_with("**Answer:**") {
        failures.push("prompt does not end on the open answer".to_string());
    }

    // The reject option joins the list without a worked example.
    let with_unknown = fixed_seed_bundle(true);
    let unknown_answers = with_unknown
        .text
        .lines()
        .filter(|l| l.starts_with("**Answer:**"))
        .count();
    if with_unknown.options.last().map(String::as_str) != Some("UNKNOWN")
        || unknown_answers != with_unknown.options.len()
    {
        failures.push("UNKNOWN handling is off".to_string());
    }

    verdict(
        7,
        failures.is_empty(),
        &format!(
            "five headers, {} exemplar blocks, one open answer, golden file matches{}",
            bundle.options.len(),
            if failures.is_empty() {
                String::new()
            } else {
                format!("; {}", failures.join("; "))
            }
        ),
    );
}

#[test]
fn criterion_08_mock_runs_replay_byte_identical() {
    let cfg = protocol_config();
    let first = run_eval(&cfg).unwrap();
    let second = run_eval(&cfg).unwrap();
    let replay_identical = report_json(&first) == report_json(&second);

    // The mock centroid backend must land exactly on the shortlist-restricted
    // nearest-centroid accuracy, computed here without the eval harness.
    let p = protocol();
    let model = pool_model();
    let mut correct = 0usize;
    for row in &p.query_rows {
        let options = shortlist(&model, &row.features, cfg.k).unwrap();
        if restricted_centroid_prediction(&model, &row.features, &options) == Some(row.label) {
            correct += 1;
        }
    }
    let independent = correct as f64 / p.query_rows.len() as f64;

    // With oracle shortlisting the truth must appear in every option list.
    let oracle = run_eval(&EvalConfig {
        shortlist: ShortlistChoice::Oracle,
        ..protocol_config()
    })
    .unwrap();
    let truth_always_listed = oracle.records.iter().all(|r| r.options.contains(&r.truth));

    let ok = replay_identical && first.overall_accuracy == independent && truth_always_listed;
    verdict(
        8,
        ok,
        &format!(
            "two runs byte-identical: {replay_identical}; accuracy {:.4} == independent {:.4}; oracle lists truth in all {} queries: {truth_always_listed}",
            first.overall_accuracy, independent, oracle.n_queries
        ),
    );
}

#[test]
fn criterion_09_ablation_harness() {
    let k_values: Vec<usize> = (1..=10).collect();
    let k_series = ablate_k(&protocol_config(), &k_values).unwrap();
    let tokens: Vec<f64> = k_series.iter().map(|(_, r)| r.token_stats.mean).collect();
    let strictly_increasing = tokens.windows(2).all(|w| w[0] < w[1]);

    let dir = artifact_dir();
    let files = emit_k_series(&k_series, &dir, "ablate_k").unwrap();
    let csv = std::fs::read_to_string(dir.join("ablate_k.csv")).unwrap();
    let svg_text = std::fs::read_to_string(dir.join("ablate_k.svg")).unwrap();
    let artifacts_complete =
        files.len() == 2 && csv.lines().count() == 11 && svg_text.contains("<svg");

    let bins_series = ablate_bins(
        &EvalConfig {
            keep_prompts: true,
            ..protocol_config()
        },
        &[3, 5, 10, 20],
    )
    .unwrap();
    let mut stats_lines = 0usize;
    let mut malformed = 0usize;
    for (_, report) in &bins_series {
        for record in &report.records {
            let text = record.prompt_text.as_deref().unwrap_or_default();
            for line in text.lines() {
                if let Some(rest) = line.strip_prefix("**Signal Statistics:** ") {
                    stats_lines += 1;
                    if rest.split(", ").count() != 17 {
                        malformed += 1;
                    }
                }
            }
        }
    }
    let bins_ok = bins_series.len() == 4 && stats_lines > 0 && malformed == 0;

    let ok = strictly_increasing && artifacts_complete && bins_ok;
    verdict(
        9,
        ok,
        &format!(
            "k sweep tokens {:.0}..{:.0} strictly increasing: {strictly_increasing}; csv+svg at {}; bin sweep checked {stats_lines} statistics lines, {malformed} malformed",
            tokens.first().copied().unwrap_or(0.0),
            tokens.last().copied().unwrap_or(0.0),
            dir.join("ablate_k.csv").display()
        ),
    );
}

#[test]
fn criterion_10_out_of_scope_statement() {
    verdict(
        10,
        true,
        "accuracy tables from large hosted models are out of scope at desk scale; \
         run criterion_10_live_endpoint_smoke with --ignored and AMC_ENDPOINT_URL \
         to exercise one live query",
    );
}

#[test]
#[ignore = "needs a live endpoint; set AMC_ENDPOINT_URL (and AMC_API_KEY if required)"]
fn criterion_10_live_endpoint_smoke() {
    let Ok(url) = std::env::var("AMC_ENDPOINT_URL") else {
        println!("criterion 10 (live): skip (AMC_ENDPOINT_URL not set)");
        return;
    };
    let config = EndpointConfig {
        url,
        model: std::env::var("AMC_MODEL").unwrap_or_else(|_| "local".to_string()),
        api_key: std::env::var("AMC_API_KEY").ok(),
        ..EndpointConfig::default()
    };
    let bundle = fixed_seed_bundle(false);
    let result = classify(&config, &bundle).unwrap();
    let ok = matches!(&result.predicted, Some(label) if bundle.options.contains(label));
    verdict(
        10,
        ok,
        &format!(
            "live endpoint answered {:?} from options {:?} in {} attempt(s)",
            result.predicted, bundle.options, result.attempt_count
        ),
    );
}
