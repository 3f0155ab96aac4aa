//! Constrained multiple-choice prompt assembly.
//!
//! A prompt has five fixed sections (ROLE, OBJECTIVE, CONTEXT, RESPONSE
//! RULES, TASK EXECUTION). The context section carries one worked exemplar
//! per candidate option; every exemplar and the query share the same
//! rendered option list, and the prompt ends with a bare `**Answer:**` for
//! the model to complete. A full-precision baseline builder exists only to
//! measure how many tokens the symbolic compression saves.

use serde::{Deserialize, Serialize};

use crate::discretize::SymbolicFeatures;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_NAMES};
use crate::labels::ModulationLabel;
use crate::shortlist::CentroidModel;
use crate::siggen::mix_seed;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Bumped whenever the rendered template changes shape.
pub const TEMPLATE_VERSION: &str = "v1";

/// The reject option appended after the real candidates when enabled.
pub const UNKNOWN_LABEL: &str = "UNKNOWN";

/// One labeled support row available for exemplar selection.
#[derive(Debug, Clone)]
pub struct ExemplarRow {
    pub id: String,
    pub label: ModulationLabel,
    pub features: FeatureVector,
}

/// The support set exemplars are drawn from. Must be disjoint from the
/// evaluation queries; that separation is the caller's responsibility.
#[derive(Debug, Clone, Default)]
pub struct ExemplarPool {
    pub rows: Vec<ExemplarRow>,
}

/// How the one exemplar per option is chosen from the pool.
#[derive(Debug, Clone)]
pub enum ExemplarStrategy {
    /// Seeded uniform choice among the option's rows.
    Random { seed: u64 },
    /// The row nearest its class centroid in z-scored feature space.
    Centroid(CentroidModel),
    /// The row with the lowest SNR, showing the model a hard case.
    LowSnr,
}

impl ExemplarStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            ExemplarStrategy::Random { .. } => "random",
            ExemplarStrategy::Centroid(_) => "centroid",
            ExemplarStrategy::LowSnr => "low_snr",
        }
    }
}

/// A fully rendered prompt plus the metadata needed to score the reply.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PromptBundle {
    pub query_id: String,
    pub text: String,
    /// Rendered option strings, including `UNKNOWN` when enabled.
    pub options: Vec<String>,
    pub estimated_tokens: usize,
    pub template_version: String,
}

/// Token estimation for budget accounting.
pub trait TokenEstimator {
    fn estimate(&self, text: &str) -> usize;
}

/// max(whitespace-separated words, ceil(bytes / 4)). Both views of cost are
/// crude; taking the larger keeps the estimate conservative.
#[derive(Debug, Clone, Copy, Default)]
pub struct DefaultEstimator;

impl TokenEstimator for DefaultEstimator {
    fn estimate(&self, text: &str) -> usize {
        estimate_tokens(text)
    }
}

pub fn estimate_tokens(text: &str) -> usize {
    let words = text.split_whitespace().count();
    let by_bytes = text.len().div_ceil(4);
    words.max(by_bytes)
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// Pick one pool row per option, in option order.
pub fn select_exemplars<'a>(
    pool: &'a ExemplarPool,
    options: &[ModulationLabel],
    strategy: &ExemplarStrategy,
) -> Result<Vec<&'a ExemplarRow>> {
    let mut picks = Vec::with_capacity(options.len());
    for label in options {
        let candidates: Vec<&ExemplarRow> =
            pool.rows.iter().filter(|r| r.label == *label).collect();
        if candidates.is_empty() {
            return Err(Error::Assembly(format!(
                "exemplar pool has no row labeled {label}"
            )));
        }
        let pick = match strategy {
            ExemplarStrategy::Random { seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(*seed, fnv1a(label.as_str())));
                candidates[rng.gen_range(0..candidates.len())]
            }
            ExemplarStrategy::Centroid(model) => {
                let centroid = model
                    .centroids
                    .iter()
                    .find(|(l, _)| l == label)
                    .map(|(_, c)| c.clone())
                    .ok_or_else(|| {
                        Error::Assembly(format!("centroid model has no class {label}"))
                    })?;
                candidates
                    .into_iter()
                    .min_by(|a, b| {
                        let da = centroid_distance(model, &centroid, &a.features);
                        let db = centroid_distance(model, &centroid, &b.features);
                        da.total_cmp(&db).then_with(|| a.id.cmp(&b.id))
                    })
                    .unwrap()
            }
            ExemplarStrategy::LowSnr => candidates
                .into_iter()
                .min_by(|a, b| {
                    a.features
                        .snr_db
                        .total_cmp(&b.features.snr_db)
                        .then_with(|| a.id.cmp(&b.id))
                })
                .unwrap(),
        };
        picks.push(pick);
    }
    Ok(picks)
}

fn centroid_distance(model: &CentroidModel, centroid: &[f64], fv: &FeatureVector) -> f64 {
    let raw = fv.retained();
    raw.iter()
        .zip(model.means.iter().zip(model.stds.iter()))
        .map(|(v, (m, s))| (v - m) / s)
        .zip(centroid.iter())
        .map(|(z, c)| (z - c) * (z - c))
        .sum::<f64>()
        .sqrt()
}

fn render_options(options: &[String]) -> String {
    let quoted: Vec<String> = options.iter().map(|o| format!("'{o}'")).collect();
    format!("[{}]", quoted.join(", "))
}

fn option_strings(options: &[ModulationLabel], allow_unknown: bool) -> Vec<String> {
    let mut out: Vec<String> = options.iter().map(|l| l.as_str().to_string()).collect();
    if allow_unknown {
        out.push(UNKNOWN_LABEL.to_string());
    }
    out
}

fn validate_options(options: &[ModulationLabel]) -> Result<()> {
    if options.is_empty() {
        return Err(Error::Assembly("empty option list".into()));
    }
    for (i, a) in options.iter().enumerate() {
        if options[i + 1..].contains(a) {
            return Err(Error::Assembly(format!("duplicate option {a}")));
        }
    }
    Ok(())
}

fn response_rules(allow_unknown: bool) -> String {
    let mut rules = String::new();
    rules.push_str("**RESPONSE RULES:**\n");
    rules.push_str(
        "- Reason step by step inside <think> and </think> tags before answering. \
         The <think> block is MANDATORY.\n",
    );
    rules.push_str(
        "- After </think>, output exactly one label copied verbatim from the \
         Classification Options list, and nothing else.\n",
    );
    if allow_unknown {
        rules.push_str("- If no listed option fits the statistics, answer UNKNOWN.\n");
    }
    rules
}

fn push_block(text: &mut String, stats_line: &str, options_line: &str, answer: Option<&str>) {
    text.push_str("**Signal Statistics:** ");
    text.push_str(stats_line);
    text.push('\n');
    text.push_str("**Classification Options:** ");
    text.push_str(options_line);
    text.push('\n');
    match answer {
        Some(label) => {
            text.push_str("**Answer:** ");
            text.push_str(label);
            text.push('\n');
        }
        None => text.push_str("**Answer:**"),
    }
}

/// Assemble the symbolic prompt. `exemplars` must hold one entry per option,
/// in option order; pair each option label with the symbolic statistics of
/// its chosen exemplar.
pub fn build_prompt(
    query_id: &str,
    query: &SymbolicFeatures,
    options: &[ModulationLabel],
    exemplars: &[(ModulationLabel, SymbolicFeatures)],
    allow_unknown: bool,
) -> Result<PromptBundle> {
    validate_options(options)?;
    if exemplars.len() != options.len() {
        return Err(Error::Assembly(format!(
            "{} exemplars for {} options",
            exemplars.len(),
            options.len()
        )));
    }
    for (opt, (lab, _)) in options.iter().zip(exemplars.iter()) {
        if opt != lab {
            return Err(Error::Assembly(format!(
                "exemplar order mismatch: expected {opt}, got {lab}"
            )));
        }
    }

    let option_names = option_strings(options, allow_unknown);
    let options_line = render_options(&option_names);

    let mut text = String::new();
    text.push_str("**ROLE:** You are an expert in radio signal analysis.\n\n");
    text.push_str(
        "**OBJECTIVE:** Identify the modulation type of a signal from its symbolic \
         statistics. Every statistic has been discretized into a letter token: 'A' is \
         the lowest bin and each later letter is a higher bin.\n\n",
    );
    text.push_str(
        "**CONTEXT:** The worked examples below show signal statistics, the candidate \
         options, and the correct answer.\n\n",
    );
    for (label, sym) in exemplars {
        push_block(&mut text, &sym.render(), &options_line, Some(label.as_str()));
        text.push('\n');
    }
    text.push_str(&response_rules(allow_unknown));
    text.push('\n');
    text.push_str("**TASK EXECUTION:** Classify the signal below.\n\n");
    push_block(&mut text, &query.render(), &options_line, None);

    let estimated_tokens = estimate_tokens(&text);
    Ok(PromptBundle {
        query_id: query_id.to_string(),
        text,
        options: option_names,
        estimated_tokens,
        template_version: TEMPLATE_VERSION.to_string(),
    })
}

fn render_full_statistics(fv: &FeatureVector) -> String {
    FEATURE_NAMES
        .iter()
        .zip(fv.values.iter())
        .map(|(name, v)| format!("{name}: {v:.6}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Assemble the uncompressed reference prompt: full-precision statistics,
/// all ten options, one exemplar per class, no reject option.
pub fn build_baseline_prompt(
    query_id: &str,
    query: &FeatureVector,
    exemplars: &[(ModulationLabel, FeatureVector)],
) -> Result<PromptBundle> {
    let options: Vec<ModulationLabel> = ModulationLabel::ALL.to_vec();
    if exemplars.len() != options.len() {
        return Err(Error::Assembly(format!(
            "baseline prompt needs {} exemplars, got {}",
            options.len(),
            exemplars.len()
        )));
    }
    for (opt, (lab, _)) in options.iter().zip(exemplars.iter()) {
        if opt != lab {
            return Err(Error::Assembly(format!(
                "exemplar order mismatch: expected {opt}, got {lab}"
            )));
        }
    }

    let option_names = option_strings(&options, false);
    let options_line = render_options(&option_names);

    let mut text = String::new();
    text.push_str("**ROLE:** You are an expert in radio signal analysis.\n\n");
    text.push_str(
        "**OBJECTIVE:** Identify the modulation type of a signal from its numeric \
         statistics.\n\n",
    );
    text.push_str(
        "**CONTEXT:** The worked examples below show signal statistics, the candidate \
         options, and the correct answer.\n\n",
    );
    for (label, fv) in exemplars {
        push_block(
            &mut text,
            &render_full_statistics(fv),
            &options_line,
            Some(label.as_str()),
        );
        text.push('\n');
    }
    text.push_str(&response_rules(false));
    text.push('\n');
    text.push_str("**TASK EXECUTION:** Classify the signal below.\n\n");
    push_block(&mut text, &render_full_statistics(query), &options_line, None);

    let estimated_tokens = estimate_tokens(&text);
    Ok(PromptBundle {
        query_id: query_id.to_string(),
        text,
        options: option_names,
        estimated_tokens,
        template_version: TEMPLATE_VERSION.to_string(),
    })
}
