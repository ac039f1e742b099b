//! Tabular dataset ingestion: CSV parsing, one-hot encoding of declared
//! categorical columns, zero-variance column dropping, and z-score
//! normalization (centering and dividing by the empirical standard
//! deviation, population convention).

use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::ExperimentError;
use crate::seed::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TargetKind {
    Regression,
    Classification,
}

/// Declares how to interpret the CSV columns.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CsvSchema {
    /// Name of the target column.
    pub target: String,
    pub target_kind: TargetKind,
    /// Feature columns to one-hot encode; the derived columns are excluded
    /// from per-feature hypothesis tests.
    #[serde(default)]
    pub categorical: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Targets {
    /// N×q regression targets.
    Regression(Vec<Vec<f64>>),
    Classes {
        labels: Vec<usize>,
        n_classes: usize,
        class_names: Vec<String>,
    },
}

impl Targets {
    pub fn len(&self) -> usize {
        match self {
            Targets::Regression(rows) => rows.len(),
            Targets::Classes { labels, .. } => labels.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Dimension of the model output needed to fit these targets.
    pub fn output_dim(&self) -> usize {
        match self {
            Targets::Regression(rows) => rows.first().map(|r| r.len()).unwrap_or(0),
            Targets::Classes { n_classes, .. } => *n_classes,
        }
    }

    fn select(&self, indices: &[usize]) -> Targets {
        match self {
            Targets::Regression(rows) => {
                Targets::Regression(indices.iter().map(|&i| rows[i].clone()).collect())
            }
            Targets::Classes {
                labels,
                n_classes,
                class_names,
            } => Targets::Classes {
                labels: indices.iter().map(|&i| labels[i]).collect(),
                n_classes: *n_classes,
                class_names: class_names.clone(),
            },
        }
    }
}

/// Per-feature normalization statistics recorded for inverse transforms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureStats {
    pub mean: f64,
    pub std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub name: String,
    /// N×p, normalized to mean 0 and standard deviation 1 per feature.
    pub features: Vec<Vec<f64>>,
    pub targets: Targets,
    pub feature_names: Vec<String>,
    pub normalization_stats: Vec<FeatureStats>,
    /// True for columns produced by one-hot encoding.
    pub from_categorical: Vec<bool>,
    pub warnings: Vec<String>,
}

impl Dataset {
    pub fn num_examples(&self) -> usize {
        self.features.len()
    }

    pub fn num_features(&self) -> usize {
        self.feature_names.len()
    }

    /// Indices of the non-categorical features, the ones hypothesis tests
    /// run over.
    pub fn testable_features(&self) -> Vec<usize> {
        (0..self.num_features())
            .filter(|&j| !self.from_categorical[j])
            .collect()
    }

    /// max − min per feature over this dataset.
    pub fn feature_ranges(&self) -> Vec<f64> {
        (0..self.num_features())
            .map(|j| {
                let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
                for row in &self.features {
                    lo = lo.min(row[j]);
                    hi = hi.max(row[j]);
                }
                hi - lo
            })
            .collect()
    }

    /// Normalizes raw feature rows in place and assembles a dataset.
    /// Zero-variance columns are dropped with a warning.
    pub fn from_raw(
        name: &str,
        mut rows: Vec<Vec<f64>>,
        targets: Targets,
        feature_names: Vec<String>,
        from_categorical: Vec<bool>,
    ) -> Result<Self, ExperimentError> {
        if rows.is_empty() {
            return Err(ExperimentError::Schema("dataset has no rows".into()));
        }
        if rows.len() != targets.len() {
            return Err(ExperimentError::Schema(
                "feature and target row counts differ".into(),
            ));
        }
        let p = feature_names.len();
        if rows.iter().any(|r| r.len() != p) || from_categorical.len() != p {
            return Err(ExperimentError::Schema(
                "inconsistent feature row widths".into(),
            ));
        }
        let n = rows.len() as f64;
        let mut keep = Vec::new();
        let mut stats = Vec::new();
        let mut warnings = Vec::new();
        for j in 0..p {
            let mean = rows.iter().map(|r| r[j]).sum::<f64>() / n;
            let var = rows
                .iter()
                .map(|r| (r[j] - mean) * (r[j] - mean))
                .sum::<f64>()
                / n;
            let std = var.sqrt();
            if std < 1e-12 {
                warnings.push(format!(
                    "dropped zero-variance feature '{}'",
                    feature_names[j]
                ));
                continue;
            }
            keep.push(j);
            stats.push(FeatureStats { mean, std });
        }
        if keep.is_empty() {
            return Err(ExperimentError::Schema(
                "all features have zero variance".into(),
            ));
        }
        for row in rows.iter_mut() {
            let normalized: Vec<f64> = keep
                .iter()
                .zip(&stats)
                .map(|(&j, s)| (row[j] - s.mean) / s.std)
                .collect();
            *row = normalized;
        }
        Ok(Dataset {
            name: name.to_string(),
            features: rows,
            targets,
            feature_names: keep.iter().map(|&j| feature_names[j].clone()).collect(),
            normalization_stats: stats,
            from_categorical: keep.iter().map(|&j| from_categorical[j]).collect(),
            warnings,
        })
    }

    /// Seeded shuffle split into (train, test).
    pub fn split(&self, test_fraction: f64, seed: u64) -> (Dataset, Dataset) {
        let n = self.num_examples();
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(&mut rng_from_seed(seed));
        let n_test = ((n as f64 * test_fraction).round() as usize).clamp(1, n - 1);
        let (test_idx, train_idx) = indices.split_at(n_test);
        (
            self.subset(train_idx, "train"),
            self.subset(test_idx, "test"),
        )
    }

    fn subset(&self, indices: &[usize], suffix: &str) -> Dataset {
        Dataset {
            name: format!("{}_{suffix}", self.name),
            features: indices.iter().map(|&i| self.features[i].clone()).collect(),
            targets: self.targets.select(indices),
            feature_names: self.feature_names.clone(),
            normalization_stats: self.normalization_stats.clone(),
            from_categorical: self.from_categorical.clone(),
            warnings: Vec::new(),
        }
    }
}

/// Parses, one-hot encodes, and normalizes a CSV file according to the
/// schema. Missing values (empty fields) are an error; constant columns are
/// dropped with a warning recorded on the dataset.
pub fn ingest_csv(path: &Path, schema: &CsvSchema) -> Result<Dataset, ExperimentError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| ExperimentError::Csv(e.to_string()))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| ExperimentError::Csv(e.to_string()))?
        .iter()
        .map(|h| h.trim().to_string())
        .collect();
    let target_idx = headers
        .iter()
        .position(|h| *h == schema.target)
        .ok_or_else(|| {
            ExperimentError::Schema(format!("target column '{}' not found", schema.target))
        })?;
    for cat in &schema.categorical {
        if !headers.iter().any(|h| h == cat) {
            return Err(ExperimentError::Schema(format!(
                "categorical column '{cat}' not found"
            )));
        }
        if cat == &schema.target {
            return Err(ExperimentError::Schema(
                "target cannot be a categorical feature".into(),
            ));
        }
    }
    let is_categorical: Vec<bool> = headers
        .iter()
        .map(|h| schema.categorical.contains(h))
        .collect();

    let mut numeric_rows: Vec<Vec<f64>> = Vec::new();
    let mut categorical_rows: Vec<Vec<String>> = Vec::new();
    let mut raw_targets: Vec<String> = Vec::new();
    for (row_idx, record) in reader.records().enumerate() {
        let record = record.map_err(|e| ExperimentError::Csv(e.to_string()))?;
        let mut numeric = Vec::new();
        let mut categorical = Vec::new();
        for (col, field) in record.iter().enumerate() {
            let field = field.trim();
            if field.is_empty() {
                return Err(ExperimentError::MissingValue {
                    row: row_idx,
                    column: headers[col].clone(),
                });
            }
            if col == target_idx {
                raw_targets.push(field.to_string());
            } else if is_categorical[col] {
                categorical.push(field.to_string());
            } else {
                let value: f64 = field.parse().map_err(|_| ExperimentError::Parse {
                    row: row_idx,
                    column: headers[col].clone(),
                    value: field.to_string(),
                })?;
                numeric.push(value);
            }
        }
        numeric_rows.push(numeric);
        categorical_rows.push(categorical);
    }
    if numeric_rows.is_empty() {
        return Err(ExperimentError::Schema("csv has no data rows".into()));
    }

    let numeric_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(col, _)| *col != target_idx && !is_categorical[*col])
        .map(|(_, h)| h.clone())
        .collect();
    let categorical_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(col, _)| *col != target_idx && is_categorical[*col])
        .map(|(_, h)| h.clone())
        .collect();

    // One-hot encode each categorical column over its sorted distinct values.
    let mut feature_names = numeric_names;
    let mut from_categorical = vec![false; feature_names.len()];
    let mut rows = numeric_rows;
    for (c, cat_name) in categorical_names.iter().enumerate() {
        let mut levels: Vec<String> = categorical_rows.iter().map(|r| r[c].clone()).collect();
        levels.sort();
        levels.dedup();
        for level in &levels {
            feature_names.push(format!("{cat_name}={level}"));
            from_categorical.push(true);
            for (row, cats) in rows.iter_mut().zip(&categorical_rows) {
                row.push(if &cats[c] == level { 1.0 } else { 0.0 });
            }
        }
    }

    let targets = match schema.target_kind {
        TargetKind::Regression => {
            let mut parsed = Vec::with_capacity(raw_targets.len());
            for (row_idx, value) in raw_targets.iter().enumerate() {
                let y: f64 = value.parse().map_err(|_| ExperimentError::Parse {
                    row: row_idx,
                    column: schema.target.clone(),
                    value: value.clone(),
                })?;
                parsed.push(vec![y]);
            }
            Targets::Regression(parsed)
        }
        TargetKind::Classification => {
            let mut class_names: Vec<String> = raw_targets.clone();
            class_names.sort();
            class_names.dedup();
            let labels = raw_targets
                .iter()
                .map(|v| class_names.iter().position(|c| c == v).unwrap())
                .collect();
            Targets::Classes {
                labels,
                n_classes: class_names.len(),
                class_names,
            }
        }
    };

    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".to_string());
    Dataset::from_raw(&name, rows, targets, feature_names, from_categorical)
}
