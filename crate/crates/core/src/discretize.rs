//! Equal-frequency binning of the retained statistical features into
//! single-letter tokens, plus uniform SNR binning.
//!
//! A [`BinningScheme`] is calibrated once on a corpus (never on evaluation
//! queries) and is immutable afterwards. Quantization drops the five pruned
//! descriptive fields (nobs/min/max/mean/variance) and emits 17 tokens: the
//! SNR token first, then the 16 retained features. Values tied with a bin
//! edge map to the lower bin; out-of-range values clamp to the end bins.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{retained_feature_names, FeatureVector, RETAINED_FEATURE_COUNT};

/// Default SNR binning range in dB.
pub const DEFAULT_SNR_RANGE: (f64, f64) = (-10.0, 10.0);

/// Number of tokens produced per query: SNR + 16 retained features.
pub const TOKEN_COUNT: usize = 1 + RETAINED_FEATURE_COUNT;

/// Per-feature quantile edges plus the uniform SNR range.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningScheme {
    pub bins: usize,
    /// Retained feature names, in the order `edges` is indexed.
    pub feature_names: Vec<String>,
    /// `bins − 1` interior edges per retained feature, non-decreasing.
    pub edges: Vec<Vec<f64>>,
    /// (lo_db, hi_db) for uniform SNR binning.
    pub snr_range: (f64, f64),
}

/// The 17 (name, token) pairs for one query, SNR first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicFeatures {
    pub tokens: Vec<(String, char)>,
}

impl SymbolicFeatures {
    /// Render as the prompt statistics line: `snr: C, skewness: B, ...`.
    pub fn render(&self) -> String {
        self.tokens
            .iter()
            .map(|(name, tok)| format!("{name}: {tok}"))
            .collect::<Vec<_>>()
            .join(", ")
    }
}

/// The first `bins` uppercase letters.
pub fn alphabet(bins: usize) -> Vec<char> {
    (0..bins).map(|i| (b'A' + i as u8) as char).collect()
}

fn token_char(index: usize) -> char {
    (b'A' + index as u8) as char
}

/// Calibrate with the default SNR range.
pub fn calibrate(corpus: &[FeatureVector], bins: usize) -> Result<BinningScheme> {
    calibrate_with_range(corpus, bins, DEFAULT_SNR_RANGE)
}

/// Compute per-feature empirical quantile edges at i/bins, i = 1..bins−1.
pub fn calibrate_with_range(
    corpus: &[FeatureVector],
    bins: usize,
    snr_range: (f64, f64),
) -> Result<BinningScheme> {
    if !(2..=26).contains(&bins) {
        return Err(Error::Calibration(format!(
            "bin count must be in [2, 26], got {bins}"
        )));
    }
    if corpus.len() < 10 * bins {
        return Err(Error::Calibration(format!(
            "corpus of {} vectors is too small for {} bins (need >= {})",
            corpus.len(),
            bins,
            10 * bins
        )));
    }
    if snr_range.0 >= snr_range.1 {
        return Err(Error::Calibration(format!(
            "snr_range lo must be below hi, got {:?}",
            snr_range
        )));
    }

    let names = retained_feature_names();
    let n = corpus.len();
    let mut edges = Vec::with_capacity(RETAINED_FEATURE_COUNT);
    for (fi, name) in names.iter().enumerate() {
        let mut column: Vec<f64> = corpus.iter().map(|fv| fv.retained()[fi]).collect();
        if let Some(bad) = column.iter().find(|v| !v.is_finite()) {
            return Err(Error::Calibration(format!(
                "feature `{name}` has non-finite value {bad} in calibration corpus"
            )));
        }
        column.sort_by(f64::total_cmp);
        let feature_edges: Vec<f64> = (1..bins)
            .map(|i| {
                // Empirical quantile at i/bins: index ceil(i*n/bins) − 1.
                let idx = (i * n).div_ceil(bins) - 1;
                column[idx]
            })
            .collect();
        edges.push(feature_edges);
    }

    Ok(BinningScheme {
        bins,
        feature_names: names.iter().map(|s| s.to_string()).collect(),
        edges,
        snr_range,
    })
}

/// Bin index of `value` given sorted interior `edges`: the count of edges
/// strictly below it, so edge-tied values land in the lower bin.
fn bin_index(value: f64, edges: &[f64]) -> usize {
    edges.iter().filter(|e| value > **e).count()
}

/// Uniform SNR token over `scheme.snr_range`, clamped, exact edges mapping
/// to the lower bin.
pub fn snr_bin(snr_db: f64, scheme: &BinningScheme) -> char {
    let (lo, hi) = scheme.snr_range;
    let bins = scheme.bins;
    let clamped = snr_db.clamp(lo, hi);
    let pos = (clamped - lo) * bins as f64 / (hi - lo);
    let mut idx = pos.floor() as usize;
    if idx > 0 && pos == idx as f64 {
        idx -= 1;
    }
    token_char(idx.min(bins - 1))
}

/// Map a feature vector to its 17 symbolic tokens.
pub fn quantize(fv: &FeatureVector, scheme: &BinningScheme) -> Result<SymbolicFeatures> {
    let names = retained_feature_names();
    if scheme.feature_names.len() != names.len()
        || scheme.feature_names.iter().zip(names.iter()).any(|(a, b)| a != b)
    {
        return Err(Error::Quantization {
            feature: "<order>".into(),
            reason: "scheme feature order does not match the retained feature order".into(),
        });
    }
    if !fv.snr_db.is_finite() && fv.snr_db.is_nan() {
        return Err(Error::Quantization {
            feature: "snr".into(),
            reason: "NaN SNR".into(),
        });
    }

    let mut tokens = Vec::with_capacity(TOKEN_COUNT);
    tokens.push(("snr".to_string(), snr_bin(fv.snr_db, scheme)));
    for (fi, name) in names.iter().enumerate() {
        let value = fv.retained()[fi];
        if value.is_nan() {
            return Err(Error::Quantization {
                feature: name.to_string(),
                reason: "NaN value".into(),
            });
        }
        let idx = bin_index(value, &scheme.edges[fi]);
        tokens.push((name.to_string(), token_char(idx)));
    }
    Ok(SymbolicFeatures { tokens })
}

/// Persist a scheme as JSON.
pub fn save_scheme(path: &Path, scheme: &BinningScheme) -> Result<()> {
    let json = serde_json::to_string_pretty(scheme)
        .map_err(|e| Error::format(path, e.to_string()))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Load a scheme from JSON.
pub fn load_scheme(path: &Path) -> Result<BinningScheme> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}
