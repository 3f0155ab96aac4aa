//! Candidate-label shortlisting.
//!
//! The trained path is a nearest-centroid ranker over z-scored retained
//! features: cheap, deterministic, and good enough to keep the true label
//! inside a small top-k list. An oracle provider (truth planted at a seeded
//! position among random distractors) and a file importer (externally
//! produced shortlists) cover upper-bound and replay experiments.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::features::{retained_feature_names, FeatureVector, RETAINED_FEATURE_COUNT};
use crate::labels::ModulationLabel;
use crate::siggen::mix_seed;

const STD_FLOOR: f64 = 1e-9;

/// Nearest-centroid model over z-scored retained features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CentroidModel {
    pub feature_names: Vec<String>,
    /// Per-feature mean over the training rows.
    pub means: Vec<f64>,
    /// Per-feature standard deviation, floored to avoid division by zero.
    pub stds: Vec<f64>,
    /// One z-scored centroid per class, sorted by label name.
    pub centroids: Vec<(ModulationLabel, Vec<f64>)>,
}

impl CentroidModel {
    pub fn class_count(&self) -> usize {
        self.centroids.len()
    }

    fn zscore(&self, fv: &FeatureVector) -> [f64; RETAINED_FEATURE_COUNT] {
        let raw = fv.retained();
        let mut out = [0.0; RETAINED_FEATURE_COUNT];
        for i in 0..RETAINED_FEATURE_COUNT {
            out[i] = (raw[i] - self.means[i]) / self.stds[i];
        }
        out
    }
}

/// Fit per-class centroids from labeled feature vectors.
///
/// Rows may arrive in any order; accumulation is keyed by class so the
/// fitted model depends only on the multiset of rows.
pub fn train_centroids(rows: &[(ModulationLabel, FeatureVector)]) -> Result<CentroidModel> {
    if rows.is_empty() {
        return Err(Error::Training("no training rows".into()));
    }
    let n = rows.len() as f64;

    let mut means = vec![0.0; RETAINED_FEATURE_COUNT];
    for (_, fv) in rows {
        for (m, v) in means.iter_mut().zip(fv.retained()) {
            *m += v;
        }
    }
    for m in means.iter_mut() {
        *m /= n;
    }
    let mut vars = vec![0.0; RETAINED_FEATURE_COUNT];
    for (_, fv) in rows {
        for (s, (v, m)) in vars.iter_mut().zip(fv.retained().iter().zip(means.iter())) {
            let d = v - m;
            *s += d * d;
        }
    }
    let stds: Vec<f64> = vars.iter().map(|s| (s / n).sqrt().max(STD_FLOOR)).collect();

    let mut sums: HashMap<ModulationLabel, (Vec<f64>, usize)> = HashMap::new();
    for (label, fv) in rows {
        let entry = sums
            .entry(*label)
            .or_insert_with(|| (vec![0.0; RETAINED_FEATURE_COUNT], 0));
        let raw = fv.retained();
        for (acc, (v, (m, s))) in entry
            .0
            .iter_mut()
            .zip(raw.iter().zip(means.iter().zip(stds.iter())))
        {
            *acc += (v - m) / s;
        }
        entry.1 += 1;
    }
    if sums.len() < 2 {
        return Err(Error::Training(format!(
            "need at least 2 classes, got {}",
            sums.len()
        )));
    }

    let mut centroids: Vec<(ModulationLabel, Vec<f64>)> = sums
        .into_iter()
        .map(|(label, (sum, count))| {
            let c = sum.iter().map(|v| v / count as f64).collect();
            (label, c)
        })
        .collect();
    centroids.sort_by_key(|(label, _)| label.as_str());

    Ok(CentroidModel {
        feature_names: retained_feature_names()
            .iter()
            .map(|s| s.to_string())
            .collect(),
        means,
        stds,
        centroids,
    })
}

/// Full ranking of the model's classes by ascending centroid distance,
/// distance ties broken alphabetically.
pub fn rank_all(model: &CentroidModel, fv: &FeatureVector) -> Vec<(ModulationLabel, f64)> {
    let z = model.zscore(fv);
    let mut ranked: Vec<(ModulationLabel, f64)> = model
        .centroids
        .iter()
        .map(|(label, c)| {
            let d2: f64 = z.iter().zip(c.iter()).map(|(a, b)| (a - b) * (a - b)).sum();
            (*label, d2.sqrt())
        })
        .collect();
    ranked.sort_by(|a, b| a.1.total_cmp(&b.1).then_with(|| a.0.as_str().cmp(b.0.as_str())));
    ranked
}

/// The k nearest class labels. Prefixes nest: the k=3 list is the first
/// three entries of the k=5 list for the same query.
pub fn shortlist(model: &CentroidModel, fv: &FeatureVector, k: usize) -> Result<Vec<ModulationLabel>> {
    if k == 0 || k > model.class_count() {
        return Err(Error::Selection(format!(
            "k must be in [1, {}], got {k}",
            model.class_count()
        )));
    }
    Ok(rank_all(model, fv).into_iter().take(k).map(|(l, _)| l).collect())
}

/// Fraction of rows whose true label appears in their top-k shortlist.
pub fn topk_accuracy(
    model: &CentroidModel,
    rows: &[(ModulationLabel, FeatureVector)],
    k: usize,
) -> Result<f64> {
    if rows.is_empty() {
        return Err(Error::Selection("no evaluation rows".into()));
    }
    let mut hits = 0usize;
    for (label, fv) in rows {
        if shortlist(model, fv, k)?.contains(label) {
            hits += 1;
        }
    }
    Ok(hits as f64 / rows.len() as f64)
}

fn fnv1a(text: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in text.bytes() {
        h ^= b as u64;
        h = h.wrapping_mul(0x100_0000_01b3);
    }
    h
}

/// A k-item shortlist that always contains the true label, with seeded
/// distractors drawn from all ten classes and a seeded truth position.
/// Deterministic per (seed, query_id, truth, k).
pub fn oracle_shortlist(
    truth: ModulationLabel,
    k: usize,
    seed: u64,
    query_id: &str,
) -> Result<Vec<ModulationLabel>> {
    oracle_shortlist_from(&ModulationLabel::ALL, truth, k, seed, query_id)
}

/// Oracle shortlist with distractors restricted to `classes`, for datasets
/// covering a subset of the label space.
pub fn oracle_shortlist_from(
    classes: &[ModulationLabel],
    truth: ModulationLabel,
    k: usize,
    seed: u64,
    query_id: &str,
) -> Result<Vec<ModulationLabel>> {
    if !classes.contains(&truth) {
        return Err(Error::Selection(format!(
            "true label {truth} is not in the class universe"
        )));
    }
    if k == 0 || k > classes.len() {
        return Err(Error::Selection(format!(
            "k must be in [1, {}], got {k}",
            classes.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, fnv1a(query_id)));
    let mut others: Vec<ModulationLabel> =
        classes.iter().copied().filter(|l| *l != truth).collect();
    others.shuffle(&mut rng);
    let mut list: Vec<ModulationLabel> = others.into_iter().take(k - 1).collect();
    let pos = rng.gen_range(0..k);
    list.insert(pos, truth);
    Ok(list)
}

/// Read externally produced shortlists from a JSON object keyed by query id.
pub fn import_shortlists(path: &Path) -> Result<HashMap<String, Vec<ModulationLabel>>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let raw: HashMap<String, Vec<String>> =
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    let mut out = HashMap::with_capacity(raw.len());
    for (id, names) in raw {
        if names.is_empty() {
            return Err(Error::format(path, format!("empty shortlist for query `{id}`")));
        }
        let mut labels = Vec::with_capacity(names.len());
        for name in &names {
            let label: ModulationLabel = name
                .parse()
                .map_err(|_| Error::format(path, format!("unknown label `{name}` for query `{id}`")))?;
            if labels.contains(&label) {
                return Err(Error::format(
                    path,
                    format!("duplicate label `{name}` for query `{id}`"),
                ));
            }
            labels.push(label);
        }
        out.insert(id, labels);
    }
    Ok(out)
}

/// Write shortlists in the same JSON shape `import_shortlists` reads.
pub fn export_shortlists(
    path: &Path,
    lists: &HashMap<String, Vec<ModulationLabel>>,
) -> Result<()> {
    let raw: std::collections::BTreeMap<&str, Vec<&str>> = lists
        .iter()
        .map(|(id, labels)| (id.as_str(), labels.iter().map(|l| l.as_str()).collect()))
        .collect();
    let json = serde_json::to_string_pretty(&raw).map_err(|e| Error::format(path, e.to_string()))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn save_model(path: &Path, model: &CentroidModel) -> Result<()> {
    let json = serde_json::to_string_pretty(model).map_err(|e| Error::format(path, e.to_string()))?;
    std::fs::write(path, json).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: &Path) -> Result<CentroidModel> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))
}

/// Where a query's candidate list comes from during evaluation.
#[derive(Debug, Clone)]
pub enum ShortlistProvider {
    Centroid(CentroidModel),
    Oracle {
        seed: u64,
        classes: Vec<ModulationLabel>,
    },
    Imported(HashMap<String, Vec<ModulationLabel>>),
}

impl ShortlistProvider {
    pub fn shortlist_for(
        &self,
        query_id: &str,
        truth: ModulationLabel,
        fv: &FeatureVector,
        k: usize,
    ) -> Result<Vec<ModulationLabel>> {
        match self {
            ShortlistProvider::Centroid(model) => shortlist(model, fv, k),
            ShortlistProvider::Oracle { seed, classes } => {
                oracle_shortlist_from(classes, truth, k, *seed, query_id)
            }
            ShortlistProvider::Imported(map) => map
                .get(query_id)
                .cloned()
                .ok_or_else(|| Error::Selection(format!("no imported shortlist for query `{query_id}`"))),
        }
    }
}
