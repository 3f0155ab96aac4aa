//! CSV reading and writing for feature tables and symbolic token tables.
//!
//! Every field the pipeline emits is a number, a label, or a single letter,
//! so no quoting or escaping is needed. Floats are written with `Display`,
//! which round-trips exactly.

use std::path::Path;

use crate::discretize::SymbolicFeatures;
use crate::error::{Error, Result};
use crate::features::{FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
use crate::labels::ModulationLabel;

/// One labeled feature row keyed by query id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub id: String,
    pub label: ModulationLabel,
    pub features: FeatureVector,
}

pub fn write_features_csv(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let mut out = String::from("id,label,snr_db");
    for name in FEATURE_NAMES {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.id);
        out.push(',');
        out.push_str(row.label.as_str());
        out.push(',');
        out.push_str(&fmt_snr(row.features.snr_db));
        for v in row.features.values {
            out.push(',');
            out.push_str(&format!("{v}"));
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

fn fmt_snr(snr_db: f64) -> String {
    if snr_db == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{snr_db}")
    }
}

fn parse_snr(path: &Path, text: &str) -> Result<f64> {
    if text == "inf" {
        return Ok(f64::INFINITY);
    }
    text.parse()
        .map_err(|_| Error::format(path, format!("bad snr_db value `{text}`")))
}

pub fn read_features_csv(path: &Path) -> Result<Vec<FeatureRow>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::format(path, "empty file"))?;
    let expected_cols = 3 + FEATURE_COUNT;
    let header_cols: Vec<&str> = header.split(',').collect();
    if header_cols.len() != expected_cols || header_cols[0] != "id" {
        return Err(Error::format(
            path,
            format!("expected {} header columns starting with `id`", expected_cols),
        ));
    }
    for (i, name) in FEATURE_NAMES.iter().enumerate() {
        if header_cols[3 + i] != *name {
            return Err(Error::format(
                path,
                format!("header column {} is `{}`, expected `{name}`", 3 + i, header_cols[3 + i]),
            ));
        }
    }

    let mut rows = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split(',').collect();
        if cols.len() != expected_cols {
            return Err(Error::format(
                path,
                format!("line {}: expected {} columns, got {}", lineno + 2, expected_cols, cols.len()),
            ));
        }
        let label: ModulationLabel = cols[1]
            .parse()
            .map_err(|_| Error::format(path, format!("line {}: unknown label `{}`", lineno + 2, cols[1])))?;
        let snr_db = parse_snr(path, cols[2])?;
        let mut values = [0.0; FEATURE_COUNT];
        for (i, slot) in values.iter_mut().enumerate() {
            *slot = cols[3 + i].parse().map_err(|_| {
                Error::format(
                    path,
                    format!("line {}: bad value `{}` for {}", lineno + 2, cols[3 + i], FEATURE_NAMES[i]),
                )
            })?;
        }
        rows.push(FeatureRow {
            id: cols[0].to_string(),
            label,
            features: FeatureVector { values, snr_db },
        });
    }
    Ok(rows)
}

/// One symbolic row: id, label, then the 17 tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolicRow {
    pub id: String,
    pub label: ModulationLabel,
    pub symbolic: SymbolicFeatures,
}

pub fn write_symbolic_csv(path: &Path, rows: &[SymbolicRow]) -> Result<()> {
    let mut out = String::from("id,label");
    if let Some(first) = rows.first() {
        for (name, _) in &first.symbolic.tokens {
            out.push(',');
            out.push_str(name);
        }
    }
    out.push('\n');
    for row in rows {
        out.push_str(&row.id);
        out.push(',');
        out.push_str(row.label.as_str());
        for (_, tok) in &row.symbolic.tokens {
            out.push(',');
            out.push(*tok);
        }
        out.push('\n');
    }
    std::fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_rows() -> Vec<FeatureRow> {
        (0..4)
            .map(|i| {
                let mut values = [0.0; FEATURE_COUNT];
                for (j, slot) in values.iter_mut().enumerate() {
                    *slot = (i * 31 + j) as f64 * 0.014159 - 0.9;
                }
                FeatureRow {
                    id: format!("q_{i:03}"),
                    label: ModulationLabel::ALL[i],
                    features: FeatureVector {
                        values,
                        snr_db: if i == 3 { f64::INFINITY } else { i as f64 * 2.5 - 5.0 },
                    },
                }
            })
            .collect()
    }

    #[test]
    fn features_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        let rows = sample_rows();
        write_features_csv(&path, &rows).unwrap();
        let back = read_features_csv(&path).unwrap();
        assert_eq!(rows.len(), back.len());
        for (a, b) in rows.iter().zip(back.iter()) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.label, b.label);
            assert_eq!(a.features.snr_db, b.features.snr_db);
            for (x, y) in a.features.values.iter().zip(b.features.values.iter()) {
                assert_eq!(x.to_bits(), y.to_bits());
            }
        }
    }

    #[test]
    fn header_mismatch_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.csv");
        std::fs::write(&path, "id,label,snr_db,wrong\nq,GMSK,0,1\n").unwrap();
        assert!(read_features_csv(&path).is_err());
    }

    #[test]
    fn bad_cells_are_format_errors_naming_the_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("features.csv");
        write_features_csv(&path, &sample_rows()).unwrap();
        let mut text = std::fs::read_to_string(&path).unwrap();
        text = text.replacen("4ASK", "QAM64", 1);
        std::fs::write(&path, text).unwrap();
        let err = read_features_csv(&path).unwrap_err();
        assert!(err.to_string().contains("QAM64"), "{err}");
    }

    #[test]
    fn symbolic_rows_write_letters() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("symbolic.csv");
        let tokens: Vec<(String, char)> = std::iter::once(("snr".to_string(), 'C'))
            .chain(
                crate::features::retained_feature_names()
                    .iter()
                    .map(|n| (n.to_string(), 'B')),
            )
            .collect();
        let rows = vec![SymbolicRow {
            id: "q_000".to_string(),
            label: ModulationLabel::Ook,
            symbolic: SymbolicFeatures { tokens },
        }];
        write_symbolic_csv(&path, &rows).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("id,label,snr,skewness"));
        assert!(text.contains("q_000,OOK,C,B"));
        assert_eq!(text.lines().count(), 2);
        assert_eq!(text.lines().nth(1).unwrap().split(',').count(), 19);
    }
}
