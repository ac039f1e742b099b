//! Hypothesis-testing harness: end-task ground truths (recourse direction and
//! spurious-feature sensitivity), threshold tests on attribution scores,
//! worst-case specificity/sensitivity over finite model families, and ROC
//! curves over a threshold grid.
//!
//! Ground truths follow the experiment protocol: a neighbourhood of 20 copies
//! of the example with the tested feature shifted by offsets evenly spaced in
//! (−fraction·range, +fraction·range); recourse compares the mean model
//! output over the positive-offset half against the negative-offset half, and
//! the spurious label compares the output variance over the grid against a
//! quantile of the same statistic on calibration examples (a sup form is
//! available for constructions where the supremum is known on the grid).

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attribution::AttributionError;
use crate::model::{Model, ModelError};

#[derive(Debug, Error)]
pub enum HyptestError {
    #[error("invalid neighbourhood: {0}")]
    InvalidNeighbourhood(String),
    #[error("empty calibration set")]
    EmptyCalibration,
    #[error("empty model set")]
    EmptyModelSet,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Attribution(#[from] AttributionError),
}

/// Number of perturbed copies in a neighbourhood grid.
pub const GRID_SIZE: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestKind {
    /// Reject iff score > α (sign and magnitude carry information).
    RecourseSign,
    /// Reject iff |score| > α (only magnitude carries information).
    SpuriousMagnitude,
}

/// Deterministic threshold test h(φ) ∈ {0, 1}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdTest {
    pub kind: TestKind,
    pub alpha: f64,
}

impl ThresholdTest {
    pub fn new(kind: TestKind, alpha: f64) -> Self {
        Self { kind, alpha }
    }

    /// Strict inequality at the threshold.
    pub fn run(&self, score: f64) -> bool {
        match self.kind {
            TestKind::RecourseSign => score > self.alpha,
            TestKind::SpuriousMagnitude => score.abs() > self.alpha,
        }
    }
}

/// The perturbation grid around an example along one feature.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighbourhood {
    pub x: Vec<f64>,
    pub feature: usize,
    /// The percentage knob of the protocol, default 0.1.
    pub fraction: f64,
    /// Feature max − min over the dataset under consideration.
    pub range: f64,
}

impl Neighbourhood {
    pub fn new(
        x: Vec<f64>,
        feature: usize,
        fraction: f64,
        range: f64,
    ) -> Result<Self, HyptestError> {
        if feature >= x.len() {
            return Err(HyptestError::InvalidNeighbourhood(format!(
                "feature {feature} out of range for dimension {}",
                x.len()
            )));
        }
        if !(fraction > 0.0 && fraction <= 1.0) {
            return Err(HyptestError::InvalidNeighbourhood(
                "fraction must be in (0, 1]".into(),
            ));
        }
        if !(range > 0.0) {
            return Err(HyptestError::InvalidNeighbourhood(
                "range must be positive".into(),
            ));
        }
        Ok(Self {
            x,
            feature,
            fraction,
            range,
        })
    }

    /// Half-width of the offset interval.
    pub fn half_width(&self) -> f64 {
        self.fraction * self.range
    }

    /// 20 offsets evenly spaced inside the open interval (−pR, pR),
    /// symmetric about zero: ten negative, ten positive, none zero.
    pub fn offsets(&self) -> Vec<f64> {
        let half = self.half_width();
        (0..GRID_SIZE)
            .map(|i| (i as f64 + 0.5 - GRID_SIZE as f64 / 2.0) / (GRID_SIZE as f64 / 2.0) * half)
            .collect()
    }

    /// The 20 perturbed copies of `x`.
    pub fn grid(&self) -> Vec<Vec<f64>> {
        self.offsets()
            .into_iter()
            .map(|d| {
                let mut copy = self.x.clone();
                copy[self.feature] += d;
                copy
            })
            .collect()
    }
}

fn grid_outputs(
    model: &Model,
    nb: &Neighbourhood,
    output_k: usize,
) -> Result<Vec<f64>, HyptestError> {
    nb.grid()
        .iter()
        .map(|pt| Ok(model.evaluate(pt)?[output_k]))
        .collect()
}

/// Recourse ground truth: 1 iff the average model output over the
/// positive-offset half of the grid exceeds the negative-offset half.
pub fn recourse_ground_truth(
    model: &Model,
    nb: &Neighbourhood,
    output_k: usize,
) -> Result<bool, HyptestError> {
    let outputs = grid_outputs(model, nb, output_k)?;
    let offsets = nb.offsets();
    let (mut up, mut down, mut n_up, mut n_down) = (0.0, 0.0, 0usize, 0usize);
    for (y, d) in outputs.iter().zip(&offsets) {
        if *d > 0.0 {
            up += y;
            n_up += 1;
        } else {
            down += y;
            n_down += 1;
        }
    }
    Ok(up / n_up as f64 > down / n_down as f64)
}

/// Population variance of the model output over the neighbourhood grid.
pub fn neighbourhood_variance(
    model: &Model,
    nb: &Neighbourhood,
    output_k: usize,
) -> Result<f64, HyptestError> {
    let outputs = grid_outputs(model, nb, output_k)?;
    let n = outputs.len() as f64;
    let mean = outputs.iter().sum::<f64>() / n;
    Ok(outputs.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n)
}

/// Nearest-rank quantile of an unsorted slice.
fn quantile(values: &mut [f64], q: f64) -> f64 {
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = values.len();
    let rank = ((q * n as f64).ceil() as usize).clamp(1, n);
    values[rank - 1]
}

/// Spurious-feature ground truth in the variance form: 1 iff the output
/// variance over the example's grid strictly exceeds the `q`-quantile of the
/// same statistic computed on the calibration examples' neighbourhoods.
pub fn spurious_ground_truth(
    model: &Model,
    nb: &Neighbourhood,
    output_k: usize,
    calibration_examples: &[Vec<f64>],
    q: f64,
) -> Result<bool, HyptestError> {
    if calibration_examples.is_empty() {
        return Err(HyptestError::EmptyCalibration);
    }
    let variance = neighbourhood_variance(model, nb, output_k)?;
    let mut calib = Vec::with_capacity(calibration_examples.len());
    for example in calibration_examples {
        let cal_nb = Neighbourhood::new(example.clone(), nb.feature, nb.fraction, nb.range)?;
        calib.push(neighbourhood_variance(model, &cal_nb, output_k)?);
    }
    let eps = quantile(&mut calib, q);
    Ok(variance > eps)
}

/// Sup form of the spurious ground truth: 1 iff `sup |f|` over the one-sided
/// grid (positive offsets only) is at least `epsilon`. Used where the
/// supremum is attained on the grid by construction.
pub fn spurious_ground_truth_sup(
    model: &Model,
    nb: &Neighbourhood,
    output_k: usize,
    epsilon: f64,
) -> Result<bool, HyptestError> {
    let outputs = grid_outputs(model, nb, output_k)?;
    let offsets = nb.offsets();
    let sup = outputs
        .iter()
        .zip(&offsets)
        .filter(|(_, d)| **d > 0.0)
        .map(|(y, _)| y.abs())
        .fold(0.0_f64, f64::max);
    Ok(sup >= epsilon)
}

/// Applies the threshold test to a raw attribution score.
pub fn run_threshold_test(test: &ThresholdTest, attribution_score: f64) -> u8 {
    test.run(attribution_score) as u8
}

/// Threshold grid: `count` values evenly spaced between the 1st and 99th
/// percentile of the observed test statistic (|score| for the magnitude
/// test, the signed score for the sign test). A degenerate distribution is
/// widened to a unit band around its value.
pub fn threshold_grid(scores: &[f64], count: usize, kind: TestKind) -> Vec<f64> {
    assert!(count >= 2, "a threshold grid needs at least two points");
    let mut magnitudes: Vec<f64> = match kind {
        TestKind::RecourseSign => scores.to_vec(),
        TestKind::SpuriousMagnitude => scores.iter().map(|s| s.abs()).collect(),
    };
    magnitudes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let interp = |q: f64| -> f64 {
        if magnitudes.is_empty() {
            return 0.0;
        }
        let pos = q * (magnitudes.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        magnitudes[lo] * (1.0 - frac) + magnitudes[hi] * frac
    };
    let mut lo = interp(0.01);
    let mut hi = interp(0.99);
    if !(hi - lo > 1e-12) {
        lo -= 0.5;
        hi += 0.5;
    }
    (0..count)
        .map(|i| lo + (hi - lo) * i as f64 / (count - 1) as f64)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RocProvenance {
    pub method: String,
    pub dataset: String,
    pub task: String,
}

/// Empirical ROC curve over a threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub thresholds: Vec<f64>,
    /// (false positive rate, true positive rate) per threshold; NaN marks a
    /// rate with an empty denominator (degenerate labels).
    pub points: Vec<(f64, f64)>,
    pub kind: TestKind,
    pub degenerate: bool,
    #[serde(default)]
    pub provenance: RocProvenance,
}

impl RocCurve {
    pub fn with_provenance(mut self, method: &str, dataset: &str, task: &str) -> Self {
        self.provenance = RocProvenance {
            method: method.to_string(),
            dataset: dataset.to_string(),
            task: task.to_string(),
        };
        self
    }

    /// Within one curve both rates must be non-increasing in the threshold.
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| {
            let ((f0, t0), (f1, t1)) = (w[0], w[1]);
            let fpr_ok = f0.is_nan() || f1.is_nan() || f1 <= f0 + 1e-12;
            let tpr_ok = t0.is_nan() || t1.is_nan() || t1 <= t0 + 1e-12;
            fpr_ok && tpr_ok
        })
    }

    pub fn to_csv_string(&self) -> String {
        let mut out = String::from("threshold,fpr,tpr\n");
        for (alpha, (fpr, tpr)) in self.thresholds.iter().zip(&self.points) {
            out.push_str(&format!("{alpha},{fpr},{tpr}\n"));
        }
        out
    }
}

/// Aggregates threshold-test outcomes against truth labels into per-threshold
/// (fpr, tpr) points. Requires at least one prediction; degenerate label sets
/// are flagged and the undefined rates emitted as NaN.
pub fn roc_curve(predictions: &[(f64, bool)], kind: TestKind, thresholds: &[f64]) -> RocCurve {
    let pos = predictions.iter().filter(|(_, truth)| *truth).count();
    let neg = predictions.len() - pos;
    let degenerate = pos == 0 || neg == 0;
    let points = thresholds
        .iter()
        .map(|&alpha| {
            let test = ThresholdTest::new(kind, alpha);
            let (mut tp, mut fp) = (0usize, 0usize);
            for &(score, truth) in predictions {
                if test.run(score) {
                    if truth {
                        tp += 1;
                    } else {
                        fp += 1;
                    }
                }
            }
            let tpr = if pos > 0 {
                tp as f64 / pos as f64
            } else {
                f64::NAN
            };
            let fpr = if neg > 0 {
                fp as f64 / neg as f64
            } else {
                f64::NAN
            };
            (fpr, tpr)
        })
        .collect();
    RocCurve {
        thresholds: thresholds.to_vec(),
        points,
        kind,
        degenerate,
        provenance: RocProvenance::default(),
    }
}

/// Worst-case outcome of a deterministic test over two finite model families,
/// mirroring the inf-based specificity/sensitivity definitions: spec is the
/// minimum of 1 − h over the null set, sens the minimum of h over the
/// alternate set. The raw confusion counts are also reported.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub spec: f64,
    pub sens: f64,
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
}

pub fn scenario_spec_sens<F>(
    model_set_0: &[Model],
    model_set_1: &[Model],
    mut attributor: F,
    test: &ThresholdTest,
) -> Result<ScenarioResult, HyptestError>
where
    F: FnMut(&Model) -> Result<f64, HyptestError>,
{
    if model_set_0.is_empty() || model_set_1.is_empty() {
        return Err(HyptestError::EmptyModelSet);
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    let mut spec = 1.0_f64;
    let mut sens = 1.0_f64;
    for model in model_set_0 {
        let reject = test.run(attributor(model)?);
        if reject {
            fp += 1;
        } else {
            tn += 1;
        }
        spec = spec.min(1.0 - reject as u8 as f64);
    }
    for model in model_set_1 {
        let reject = test.run(attributor(model)?);
        if reject {
            tp += 1;
        } else {
            fn_ += 1;
        }
        sens = sens.min(reject as u8 as f64);
    }
    Ok(ScenarioResult {
        spec,
        sens,
        tp,
        fp,
        tn,
        fn_,
    })
}

/// Writes a standalone SVG plot of one or more ROC curves with the random-
/// guessing diagonal as a dashed reference line. NaN points are skipped.
pub fn write_roc_svg(
    path: &std::path::Path,
    title: &str,
    curves: &[(String, &RocCurve)],
) -> std::io::Result<()> {
    let groups: Vec<(String, Vec<&RocCurve>)> = curves
        .iter()
        .map(|(label, curve)| (label.clone(), vec![*curve]))
        .collect();
    write_roc_svg_grouped(path, title, &groups)
}

/// Grouped variant: all curves in one group share a colour and one legend
/// entry (one group per attribution method, one curve per model).
pub fn write_roc_svg_grouped(
    path: &std::path::Path,
    title: &str,
    groups: &[(String, Vec<&RocCurve>)],
) -> std::io::Result<()> {
    const SIZE: f64 = 480.0;
    const MARGIN: f64 = 50.0;
    const PALETTE: [&str; 8] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f",
    ];
    let span = SIZE - 2.0 * MARGIN;
    let sx = |v: f64| MARGIN + v * span;
    let sy = |v: f64| SIZE - MARGIN - v * span;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{SIZE}\" height=\"{SIZE}\" viewBox=\"0 0 {SIZE} {SIZE}\">\n"
    ));
    svg.push_str(&format!(
        "<rect width=\"{SIZE}\" height=\"{SIZE}\" fill=\"white\"/>\n<text x=\"{}\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"15\">{title}</text>\n",
        SIZE / 2.0
    ));
    // Axes.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(1.0),
        sy(0.0)
    ));
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        sx(0.0),
        sy(0.0),
        sx(0.0),
        sy(1.0)
    ));
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"10\">{tick}</text>\n",
            sx(tick), sy(0.0) + 16.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"10\">{tick}</text>\n",
            sx(0.0) - 6.0, sy(tick) + 3.0
        ));
    }
    svg.push_str(&format!(
        "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">false positive rate</text>\n",
        SIZE / 2.0, SIZE - 10.0
    ));
    svg.push_str(&format!(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" transform=\"rotate(-90 14 {} )\">true positive rate</text>\n",
        SIZE / 2.0, SIZE / 2.0
    ));
    // Random-guessing diagonal.
    svg.push_str(&format!(
        "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n",
        sx(0.0), sy(0.0), sx(1.0), sy(1.0)
    ));
    for (i, (label, group)) in groups.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        for curve in group {
            let mut coords: Vec<(f64, f64)> = curve
                .points
                .iter()
                .filter(|(f, t)| f.is_finite() && t.is_finite())
                .map(|&(f, t)| (f, t))
                .collect();
            coords.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let path_points: Vec<String> = coords
                .iter()
                .map(|(f, t)| format!("{},{}", sx(*f), sy(*t)))
                .collect();
            if !path_points.is_empty() {
                svg.push_str(&format!(
                    "<polyline fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\" opacity=\"0.8\" points=\"{}\"/>\n",
                    path_points.join(" ")
                ));
            }
        }
        let ly = 40.0 + 16.0 * i as f64;
        svg.push_str(&format!(
            "<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{color}\" stroke-width=\"2\"/>\n",
            SIZE - 170.0, ly, SIZE - 150.0, ly
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-family=\"sans-serif\" font-size=\"11\">{label}</text>\n",
            SIZE - 144.0,
            ly + 4.0
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)
}
