//! Statistical feature extraction: descriptive amplitude statistics plus
//! higher-order mixed moments and cumulants of a complex baseband segment.
//!
//! Conventions, fixed so downstream binning is reproducible:
//! - Mixed moment M_pq = mean(x^(p−q) · conj(x)^q).
//! - Cumulants are computed on mean-removed samples via the standard
//!   zero-mean expansions (C40 = M40 − 3·M20², etc.).
//! - Descriptive statistics use population (divide-by-n) estimators on the
//!   instantaneous amplitude |x[n]|; kurtosis is excess kurtosis.
//! - Degenerate cases are total: zero-variance amplitude yields skewness and
//!   kurtosis 0; normalized cumulant ratios with C21 = 0 are 0.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::siggen::IQSegment;

/// Number of entries in a full [`FeatureVector`].
pub const FEATURE_COUNT: usize = 21;

/// Number of features that survive pruning (everything after the first five
/// descriptive fields).
pub const RETAINED_FEATURE_COUNT: usize = 16;

/// Canonical feature order. This order is the contract for CSV columns,
/// binning schemes and centroid models.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = [
    "nobs", "min", "max", "mean", "variance", "skewness", "kurtosis", "c20", "c21", "c40",
    "c41", "c42", "c60", "c61", "c62", "c63", "c80", "c40_norm", "c42_norm", "c63_norm",
    "c80_norm",
];

/// Index of the first retained feature (`skewness`) in [`FEATURE_NAMES`].
pub const RETAINED_OFFSET: usize = 5;

/// Names of the 16 retained features, in order.
pub fn retained_feature_names() -> [&'static str; RETAINED_FEATURE_COUNT] {
    let mut out = [""; RETAINED_FEATURE_COUNT];
    out.copy_from_slice(&FEATURE_NAMES[RETAINED_OFFSET..]);
    out
}

/// The (p, q) orders of the twelve mixed moments kept in a [`CumulantSet`].
pub const MOMENT_ORDERS: [(u32, u32); 12] = [
    (2, 0),
    (2, 1),
    (2, 2),
    (4, 0),
    (4, 1),
    (4, 2),
    (4, 3),
    (6, 0),
    (6, 1),
    (6, 2),
    (6, 3),
    (8, 0),
];

/// Mixed moments and cumulants of one segment, computed on mean-removed
/// samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CumulantSet {
    pub m20: Complex64,
    pub m21: Complex64,
    pub m22: Complex64,
    pub m40: Complex64,
    pub m41: Complex64,
    pub m42: Complex64,
    pub m43: Complex64,
    pub m60: Complex64,
    pub m61: Complex64,
    pub m62: Complex64,
    pub m63: Complex64,
    pub m80: Complex64,
    pub c20: Complex64,
    pub c21: Complex64,
    pub c40: Complex64,
    pub c41: Complex64,
    pub c42: Complex64,
    pub c60: Complex64,
    pub c61: Complex64,
    pub c62: Complex64,
    pub c63: Complex64,
    pub c80: Complex64,
}

/// The 21 named statistics of one segment plus its SNR (carried separately).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    /// Values in [`FEATURE_NAMES`] order.
    pub values: [f64; FEATURE_COUNT],
    pub snr_db: f64,
}

impl FeatureVector {
    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES
            .iter()
            .position(|n| *n == name)
            .map(|i| self.values[i])
    }

    /// The 16 retained values (`skewness` onward), in canonical order.
    pub fn retained(&self) -> [f64; RETAINED_FEATURE_COUNT] {
        let mut out = [0.0; RETAINED_FEATURE_COUNT];
        out.copy_from_slice(&self.values[RETAINED_OFFSET..]);
        out
    }
}

fn widen(seg: &IQSegment) -> Vec<Complex64> {
    seg.samples
        .iter()
        .map(|s| Complex64::new(s.re as f64, s.im as f64))
        .collect()
}

/// Mixed moment M_pq = mean(x^(p−q) · conj(x)^q), single pass, no centering.
pub fn mixed_moment(samples: &[Complex64], p: u32, q: u32) -> Result<Complex64> {
    if samples.is_empty() {
        return Err(Error::invalid("mixed_moment on empty input"));
    }
    if q > p || p > 8 {
        return Err(Error::invalid(format!(
            "moment orders must satisfy 0 <= q <= p <= 8, got ({p}, {q})"
        )));
    }
    let mut sum = Complex64::new(0.0, 0.0);
    for &x in samples {
        sum += moment_term(x, p, q);
    }
    Ok(sum / samples.len() as f64)
}

/// x^(p−q) · conj(x)^q by repeated multiplication.
fn moment_term(x: Complex64, p: u32, q: u32) -> Complex64 {
    let mut acc = Complex64::new(1.0, 0.0);
    for _ in 0..(p - q) {
        acc *= x;
    }
    let cx = x.conj();
    for _ in 0..q {
        acc *= cx;
    }
    acc
}

/// Compute all tracked moments and cumulants of `samples` after removing the
/// sample mean.
pub fn cumulants(samples: &[Complex64]) -> Result<CumulantSet> {
    if samples.is_empty() {
        return Err(Error::invalid("cumulants on empty input"));
    }
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<Complex64>() / n;
    let centered: Vec<Complex64> = samples.iter().map(|x| x - mean).collect();

    let m = |p, q| mixed_moment(&centered, p, q).expect("nonempty");
    let m20 = m(2, 0);
    let m21 = m(2, 1);
    let m22 = m(2, 2);
    let m40 = m(4, 0);
    let m41 = m(4, 1);
    let m42 = m(4, 2);
    let m43 = m(4, 3);
    let m60 = m(6, 0);
    let m61 = m(6, 1);
    let m62 = m(6, 2);
    let m63 = m(6, 3);
    let m80 = m(8, 0);

    let c20 = m20;
    let c21 = m21;
    let c40 = m40 - 3.0 * m20 * m20;
    let c41 = m41 - 3.0 * m20 * m21;
    let c42 = m42 - m20 * m22 - 2.0 * m21 * m21;
    let c60 = m60 - 15.0 * m40 * m20 + 30.0 * m20 * m20 * m20;
    let c61 = m61 - 5.0 * m21 * m40 - 10.0 * m20 * m41 + 30.0 * m20 * m20 * m21;
    let c62 = m62 - 6.0 * m20 * m42 - 8.0 * m21 * m41 - m22 * m40
        + 6.0 * m20 * m20 * m22
        + 24.0 * m21 * m21 * m20;
    let c63 = m63 - 9.0 * m21 * m42 + 12.0 * m21 * m21 * m21 - 3.0 * m20 * m43
        - 3.0 * m22 * m41
        + 18.0 * m20 * m21 * m22;
    let c80 = m80 - 35.0 * m40 * m40 - 28.0 * m60 * m20 + 420.0 * m40 * m20 * m20
        - 630.0 * m20 * m20 * m20 * m20;

    Ok(CumulantSet {
        m20,
        m21,
        m22,
        m40,
        m41,
        m42,
        m43,
        m60,
        m61,
        m62,
        m63,
        m80,
        c20,
        c21,
        c40,
        c41,
        c42,
        c60,
        c61,
        c62,
        c63,
        c80,
    })
}

/// nobs, min, max, mean, variance, skewness, excess kurtosis of |x[n]|.
pub fn descriptive_stats(samples: &[Complex64]) -> Result<[f64; 7]> {
    if samples.is_empty() {
        return Err(Error::invalid("descriptive_stats on empty input"));
    }
    let n = samples.len() as f64;
    let amps: Vec<f64> = samples.iter().map(|x| x.norm()).collect();
    let min = amps.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = amps.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mean = amps.iter().sum::<f64>() / n;
    let m2 = amps.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n;
    let (skewness, kurtosis) = if m2 == 0.0 {
        (0.0, 0.0)
    } else {
        let m3 = amps.iter().map(|a| (a - mean).powi(3)).sum::<f64>() / n;
        let m4 = amps.iter().map(|a| (a - mean).powi(4)).sum::<f64>() / n;
        let skew = m3 / m2.powf(1.5);
        let kurt = m4 / (m2 * m2) - 3.0;
        (
            if skew.is_finite() { skew } else { 0.0 },
            if kurt.is_finite() { kurt } else { 0.0 },
        )
    };
    Ok([n, min, max, mean, m2, skewness, kurtosis])
}

/// Compose the full 21-entry feature vector of a segment.
pub fn extract_features(seg: &IQSegment) -> Result<FeatureVector> {
    let samples = widen(seg);
    let desc = descriptive_stats(&samples)?;
    let cs = cumulants(&samples)?;

    // C21 is the mean power of the centered samples: real and nonnegative.
    let c21 = cs.c21.re;
    let ratio = |num: f64, denom: f64| if denom == 0.0 { 0.0 } else { num / denom };

    let mut values = [0.0; FEATURE_COUNT];
    values[..7].copy_from_slice(&desc);
    values[7] = cs.c20.norm();
    values[8] = cs.c21.norm();
    values[9] = cs.c40.norm();
    values[10] = cs.c41.norm();
    values[11] = cs.c42.norm();
    values[12] = cs.c60.norm();
    values[13] = cs.c61.norm();
    values[14] = cs.c62.norm();
    values[15] = cs.c63.norm();
    values[16] = cs.c80.norm();
    values[17] = ratio(cs.c40.norm(), c21 * c21);
    values[18] = ratio(cs.c42.norm(), c21 * c21);
    values[19] = ratio(cs.c63.norm(), c21 * c21 * c21);
    values[20] = ratio(cs.c80.norm(), c21 * c21 * c21 * c21);

    Ok(FeatureVector {
        values,
        snr_db: seg.snr_db,
    })
}
