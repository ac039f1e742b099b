//! The models × examples × thresholds ROC sweep and its forged-model
//! injection mode.
//!
//! Trained mode: train `n_models` networks with derived seeds, reuse the same
//! sampled examples for every model, compute every attribution, label the two
//! end-tasks, and pool the (feature, example) confusion counts per model into
//! one ROC curve per (method, task, model) over a shared 40-threshold grid
//! (micro-averaging; the choice is recorded in the output provenance).
//!
//! Injection mode replaces the trained models with forged pairs anchored at
//! one sampled example and feature. The complete-and-linear methods are
//! evaluated in their exact forms against the forging baseline — that is the
//! regime in which their attributions provably coincide on a pair — while
//! the local methods see the models unchanged.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::train::output_coordinate;
use super::{train_mlp, Dataset, ExperimentError, TrainConfig, TrainReport};
use crate::attribution::{attribute, MethodSettings, MethodTag};
use crate::baseline::Baseline;
use crate::forge::{forge_pair, LocalBehaviour};
use crate::hyptest::{
    recourse_ground_truth, roc_curve, spurious_ground_truth, spurious_ground_truth_sup,
    threshold_grid, write_roc_svg_grouped, Neighbourhood, RocCurve, TestKind,
};
use crate::model::{Model, PiecewiseLinear1D};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EndTask {
    Recourse,
    Spurious,
}

impl EndTask {
    pub fn as_str(&self) -> &'static str {
        match self {
            EndTask::Recourse => "recourse",
            EndTask::Spurious => "spurious",
        }
    }

    pub fn test_kind(&self) -> TestKind {
        match self {
            EndTask::Recourse => TestKind::RecourseSign,
            EndTask::Spurious => TestKind::SpuriousMagnitude,
        }
    }
}

/// Sweep shape: the defaults mirror the experiment protocol (10 models,
/// 20 shared examples, 40 thresholds, 10% neighbourhoods, 100 calibration
/// examples).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub n_models: usize,
    pub n_examples: usize,
    pub n_thresholds: usize,
    pub neighbourhood_fraction: f64,
    pub methods: Vec<MethodTag>,
    pub end_tasks: Vec<EndTask>,
    pub calibration_examples: usize,
    pub seed: u64,
    pub settings: MethodSettings,
    pub forged_injection: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_models: 10,
            n_examples: 20,
            n_thresholds: 40,
            neighbourhood_fraction: 0.1,
            methods: vec![
                MethodTag::ShapSampled,
                MethodTag::IntegratedGradients,
                MethodTag::Gradient,
                MethodTag::Smoothgrad,
                MethodTag::Lime,
            ],
            end_tasks: vec![EndTask::Recourse, EndTask::Spurious],
            calibration_examples: 100,
            seed: 0,
            settings: MethodSettings::default(),
            forged_injection: false,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_models == 0 || self.n_examples == 0 || self.n_thresholds < 2 {
            return Err(ExperimentError::Config(
                "need at least one model, one example, and two thresholds".into(),
            ));
        }
        if !(self.neighbourhood_fraction > 0.0 && self.neighbourhood_fraction <= 1.0) {
            return Err(ExperimentError::Config(
                "neighbourhood fraction must be in (0, 1]".into(),
            ));
        }
        if self.methods.is_empty() || self.end_tasks.is_empty() {
            return Err(ExperimentError::Config(
                "need at least one method and one end-task".into(),
            ));
        }
        if self.calibration_examples == 0 {
            return Err(ExperimentError::Config(
                "calibration_examples must be positive".into(),
            ));
        }
        self.settings.validate()?;
        Ok(())
    }
}

/// One per-model family of ROC curves for a (method, task) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepCurveSet {
    pub method: MethodTag,
    pub task: EndTask,
    pub thresholds: Vec<f64>,
    pub per_model: Vec<RocCurve>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepOutput {
    pub dataset: String,
    pub curves: Vec<SweepCurveSet>,
    pub train_reports: Vec<TrainReport>,
    /// Resolved configuration and aggregation choices.
    pub provenance: serde_json::Value,
}

impl SweepOutput {
    /// One CSV per (method, task): `{dataset}_{method}_{task}.csv` with
    /// columns (model_index, threshold, fpr, tpr).
    pub fn write_csvs(&self, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
        std::fs::create_dir_all(dir)?;
        let mut paths = Vec::new();
        for set in &self.curves {
            let mut body = String::from("model_index,threshold,fpr,tpr\n");
            for (mi, curve) in set.per_model.iter().enumerate() {
                for (alpha, (fpr, tpr)) in curve.thresholds.iter().zip(&curve.points) {
                    body.push_str(&format!("{mi},{alpha},{fpr},{tpr}\n"));
                }
            }
            let path = dir.join(format!(
                "{}_{}_{}.csv",
                self.dataset,
                set.method.as_str(),
                set.task.as_str()
            ));
            std::fs::write(&path, body)?;
            paths.push(path);
        }
        Ok(paths)
    }

    /// One SVG per task overlaying all methods, diagonal reference included.
    pub fn write_plots(&self, dir: &Path) -> Result<Vec<PathBuf>, ExperimentError> {
        std::fs::create_dir_all(dir)?;
        let mut tasks: Vec<EndTask> = Vec::new();
        for c in &self.curves {
            if !tasks.contains(&c.task) {
                tasks.push(c.task);
            }
        }
        let mut paths = Vec::new();
        for task in tasks {
            let groups: Vec<(String, Vec<&RocCurve>)> = self
                .curves
                .iter()
                .filter(|c| c.task == task)
                .map(|c| (c.method.as_str().to_string(), c.per_model.iter().collect()))
                .collect();
            let path = dir.join(format!("{}_{}.svg", self.dataset, task.as_str()));
            write_roc_svg_grouped(
                &path,
                &format!("{} / {}", self.dataset, task.as_str()),
                &groups,
            )?;
            paths.push(path);
        }
        Ok(paths)
    }
}

const CH_SPLIT: u64 = 0xE1;
const CH_MODELS: u64 = 0xE2;
const CH_EXAMPLES: u64 = 0xE3;
const CH_CALIBRATION: u64 = 0xE4;
const CH_ATTRIBUTION: u64 = 0xE5;
const CH_SHAP_BASE: u64 = 0xE6;

fn sample_rows(dataset: &Dataset, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = dataset.num_examples();
    let mut rng = rng_from_seed(seed);
    if count <= n {
        use rand::seq::SliceRandom;
        let mut indices: Vec<usize> = (0..n).collect();
        indices.shuffle(&mut rng);
        indices[..count]
            .iter()
            .map(|&i| dataset.features[i].clone())
            .collect()
    } else {
        use rand::Rng;
        (0..count)
            .map(|_| dataset.features[rng.gen_range(0..n)].clone())
            .collect()
    }
}

pub fn run_sweep(
    dataset: &Dataset,
    exp: &ExperimentConfig,
    train: &TrainConfig,
) -> Result<SweepOutput, ExperimentError> {
    exp.validate()?;
    train.validate()?;
    if exp.forged_injection {
        run_sweep_forged(dataset, exp)
    } else {
        run_sweep_trained(dataset, exp, train)
    }
}

fn provenance_json(
    dataset: &Dataset,
    exp: &ExperimentConfig,
    train: Option<&TrainConfig>,
) -> serde_json::Value {
    serde_json::json!({
        "dataset": dataset.name,
        "experiment": exp,
        "train": train,
        "rate_aggregation": "pooled_confusion_counts_micro",
        "dataset_warnings": dataset.warnings,
    })
}

fn run_sweep_trained(
    dataset: &Dataset,
    exp: &ExperimentConfig,
    train: &TrainConfig,
) -> Result<SweepOutput, ExperimentError> {
    let (train_set, eval_set) = dataset.split(0.25, derive_seed(exp.seed, CH_SPLIT));
    let model_master = derive_seed(exp.seed, CH_MODELS);
    let trained: Vec<(Model, TrainReport)> = (0..exp.n_models)
        .into_par_iter()
        .map(|i| {
            let config = TrainConfig {
                seed: derive_seed(model_master, i as u64),
                ..train.clone()
            };
            train_mlp(&train_set, &config).map(|(mlp, report)| (Model::mlp(mlp), report))
        })
        .collect::<Result<_, _>>()?;
    let models: Vec<&Model> = trained.iter().map(|(m, _)| m).collect();

    // The same examples are reused for every model.
    let examples = sample_rows(
        &eval_set,
        exp.n_examples,
        derive_seed(exp.seed, CH_EXAMPLES),
    );
    let calibration = sample_rows(
        &eval_set,
        exp.calibration_examples,
        derive_seed(exp.seed, CH_CALIBRATION),
    );
    let features = dataset.testable_features();
    let ranges = dataset.feature_ranges();
    let p = dataset.num_features();

    let shap_baseline = Baseline::Empirical {
        samples: sample_rows(
            &train_set,
            exp.settings
                .shap_baseline_samples
                .min(train_set.num_examples()),
            derive_seed(exp.seed, CH_SHAP_BASE),
        ),
    };
    // Zero is the data mean after normalization.
    let ig_baseline = Baseline::Pointmass {
        point: vec![0.0; p],
    };

    // Output coordinate per (model, example): predicted class, or 0.
    let mut out_coord = vec![vec![0usize; examples.len()]; models.len()];
    for (mi, model) in models.iter().enumerate() {
        for (ei, x) in examples.iter().enumerate() {
            out_coord[mi][ei] = output_coordinate(model, dataset, x)?;
        }
    }

    // All attributions, cell-parallel with derived seeds.
    let attr_master = derive_seed(exp.seed, CH_ATTRIBUTION);
    let n_methods = exp.methods.len();
    let cells: Vec<(usize, usize, usize)> = (0..models.len())
        .flat_map(|mi| {
            (0..examples.len()).flat_map(move |ei| (0..n_methods).map(move |qi| (mi, ei, qi)))
        })
        .collect();
    let attributions: Vec<crate::attribution::Attribution> = cells
        .par_iter()
        .map(|&(mi, ei, qi)| {
            let cell = ((mi * examples.len()) + ei) * n_methods + qi;
            let settings = exp
                .settings
                .clone()
                .with_seed(derive_seed(attr_master, cell as u64));
            let method = exp.methods[qi];
            let baseline = match method {
                MethodTag::ShapExact | MethodTag::ShapSampled => Some(&shap_baseline),
                MethodTag::IntegratedGradients | MethodTag::IntegratedGradientsExact => {
                    Some(&ig_baseline)
                }
                _ => None,
            };
            attribute(method, models[mi], baseline, &examples[ei], &settings)
        })
        .collect::<Result<_, _>>()?;
    let attr_at = |mi: usize, ei: usize, qi: usize| -> &crate::attribution::Attribution {
        &attributions[((mi * examples.len()) + ei) * n_methods + qi]
    };

    // Ground truths. Spurious thresholds are per (model, feature, output).
    let mut recourse_truth = vec![vec![vec![false; p]; examples.len()]; models.len()];
    let mut spurious_truth = vec![vec![vec![false; p]; examples.len()]; models.len()];
    let want_recourse = exp.end_tasks.contains(&EndTask::Recourse);
    let want_spurious = exp.end_tasks.contains(&EndTask::Spurious);
    for (mi, model) in models.iter().enumerate() {
        for (ei, x) in examples.iter().enumerate() {
            let k = out_coord[mi][ei];
            for &j in &features {
                let nb = Neighbourhood::new(x.clone(), j, exp.neighbourhood_fraction, ranges[j])?;
                if want_recourse {
                    recourse_truth[mi][ei][j] = recourse_ground_truth(model, &nb, k)?;
                }
                if want_spurious {
                    spurious_truth[mi][ei][j] =
                        spurious_ground_truth(model, &nb, k, &calibration, 0.8)?;
                }
            }
        }
    }

    // Assemble per-(method, task) curve families over a shared grid.
    let mut curves = Vec::new();
    for (qi, &method) in exp.methods.iter().enumerate() {
        for &task in &exp.end_tasks {
            let mut per_model_predictions: Vec<Vec<(f64, bool)>> = Vec::with_capacity(models.len());
            for mi in 0..models.len() {
                let mut predictions = Vec::with_capacity(examples.len() * features.len());
                for ei in 0..examples.len() {
                    let attribution = attr_at(mi, ei, qi);
                    let k = out_coord[mi][ei];
                    for &j in &features {
                        let truth = match task {
                            EndTask::Recourse => recourse_truth[mi][ei][j],
                            EndTask::Spurious => spurious_truth[mi][ei][j],
                        };
                        predictions.push((attribution.score(j, k), truth));
                    }
                }
                per_model_predictions.push(predictions);
            }
            let pooled: Vec<f64> = per_model_predictions
                .iter()
                .flat_map(|preds| preds.iter().map(|(s, _)| *s))
                .collect();
            let thresholds = threshold_grid(&pooled, exp.n_thresholds, task.test_kind());
            let per_model = per_model_predictions
                .iter()
                .map(|preds| {
                    roc_curve(preds, task.test_kind(), &thresholds).with_provenance(
                        method.as_str(),
                        &dataset.name,
                        task.as_str(),
                    )
                })
                .collect();
            curves.push(SweepCurveSet {
                method,
                task,
                thresholds,
                per_model,
            });
        }
    }
    Ok(SweepOutput {
        dataset: dataset.name.clone(),
        curves,
        train_reports: trained.into_iter().map(|(_, r)| r).collect(),
        provenance: provenance_json(dataset, exp, Some(train)),
    })
}

/// In injection mode the complete-and-linear methods run in their exact
/// forms against the forging baseline; local methods are unchanged.
fn injection_method(method: MethodTag) -> MethodTag {
    match method {
        MethodTag::ShapSampled => MethodTag::ShapExact,
        MethodTag::IntegratedGradients => MethodTag::IntegratedGradientsExact,
        other => other,
    }
}

fn run_sweep_forged(
    dataset: &Dataset,
    exp: &ExperimentConfig,
) -> Result<SweepOutput, ExperimentError> {
    let (train_set, eval_set) = dataset.split(0.25, derive_seed(exp.seed, CH_SPLIT));
    let examples = sample_rows(&eval_set, 1, derive_seed(exp.seed, CH_EXAMPLES));
    let anchor = examples[0].clone();
    let features = dataset.testable_features();
    let feature = *features.first().ok_or_else(|| {
        ExperimentError::Config(
            "forged injection needs at least one non-categorical feature".into(),
        )
    })?;
    let ranges = dataset.feature_ranges();
    let range = ranges[feature];
    let delta = exp.neighbourhood_fraction * range;
    let p = dataset.num_features();
    let x_j = anchor[feature];

    // Domain box: the dataset hull padded by half a range per side, which
    // strictly contains every neighbourhood.
    let domain: Vec<(f64, f64)> = (0..p)
        .map(|j| {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for row in &dataset.features {
                lo = lo.min(row[j]);
                hi = hi.max(row[j]);
            }
            (lo - 0.5 * ranges[j], hi + 0.5 * ranges[j])
        })
        .collect();

    let forge_baseline = Baseline::Empirical {
        samples: sample_rows(
            &train_set,
            exp.settings
                .shap_baseline_samples
                .min(train_set.num_examples()),
            derive_seed(exp.seed, CH_SHAP_BASE),
        ),
    };

    let n_pairs = (exp.n_models / 2).max(1);
    let methods: Vec<MethodTag> = {
        let mut mapped: Vec<MethodTag> = Vec::new();
        for &m in &exp.methods {
            let m = injection_method(m);
            if !mapped.contains(&m) {
                mapped.push(m);
            }
        }
        mapped
    };
    let attr_master = derive_seed(exp.seed, CH_ATTRIBUTION);
    let nb = Neighbourhood::new(anchor.clone(), feature, exp.neighbourhood_fraction, range)?;

    let mut curves = Vec::new();
    for &task in &exp.end_tasks {
        // Task-appropriate behaviour pairs with identical attribution 0.
        let mut pair_models: Vec<(Model, bool, Model, bool)> = Vec::with_capacity(n_pairs);
        for i in 0..n_pairs {
            let (g0, g1, sup_eps) = match task {
                EndTask::Recourse => {
                    let slope = 1.0 + 0.5 * i as f64;
                    (
                        PiecewiseLinear1D::linear(slope, -slope * x_j),
                        PiecewiseLinear1D::linear(-slope, slope * x_j),
                        0.0,
                    )
                }
                EndTask::Spurious => {
                    let eps = 0.5 + 0.25 * i as f64;
                    (
                        PiecewiseLinear1D::constant(0.0),
                        PiecewiseLinear1D::new(
                            vec![x_j - delta, x_j, x_j + delta],
                            vec![0.0, eps, 0.0],
                            0.0,
                            0.0,
                        )
                        .map_err(ExperimentError::Model)?,
                        eps / 2.0,
                    )
                }
            };
            let (f0, f1) = forge_pair(
                &LocalBehaviour::new(g0, anchor.clone(), feature, delta)?,
                &LocalBehaviour::new(g1, anchor.clone(), feature, delta)?,
                &forge_baseline,
                &domain,
                0.0,
            )?;
            let (t0, t1) = match task {
                EndTask::Recourse => (
                    recourse_ground_truth(&f0.model, &nb, 0)?,
                    recourse_ground_truth(&f1.model, &nb, 0)?,
                ),
                EndTask::Spurious => (
                    spurious_ground_truth_sup(&f0.model, &nb, 0, sup_eps)?,
                    spurious_ground_truth_sup(&f1.model, &nb, 0, sup_eps)?,
                ),
            };
            pair_models.push((f0.model, t0, f1.model, t1));
        }

        for (qi, &method) in methods.iter().enumerate() {
            let baseline = method.needs_baseline().then_some(&forge_baseline);
            let mut per_pair_predictions: Vec<Vec<(f64, bool)>> = Vec::with_capacity(n_pairs);
            for (pi, (m0, t0, m1, t1)) in pair_models.iter().enumerate() {
                let cell = (pi * methods.len() + qi) as u64;
                let settings = exp
                    .settings
                    .clone()
                    .with_seed(derive_seed(attr_master, cell));
                let s0 = attribute(method, m0, baseline, &anchor, &settings)?.score(feature, 0);
                let s1 = attribute(method, m1, baseline, &anchor, &settings)?.score(feature, 0);
                per_pair_predictions.push(vec![(s0, *t0), (s1, *t1)]);
            }
            let pooled: Vec<f64> = per_pair_predictions
                .iter()
                .flat_map(|preds| preds.iter().map(|(s, _)| *s))
                .collect();
            let thresholds = threshold_grid(&pooled, exp.n_thresholds, task.test_kind());
            let per_model = per_pair_predictions
                .iter()
                .map(|preds| {
                    roc_curve(preds, task.test_kind(), &thresholds).with_provenance(
                        method.as_str(),
                        &dataset.name,
                        task.as_str(),
                    )
                })
                .collect();
            curves.push(SweepCurveSet {
                method,
                task,
                thresholds,
                per_model,
            });
        }
    }
    Ok(SweepOutput {
        dataset: format!("{}_forged", dataset.name),
        curves,
        train_reports: Vec::new(),
        provenance: provenance_json(dataset, exp, None),
    })
}
