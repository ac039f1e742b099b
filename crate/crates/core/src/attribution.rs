//! The five feature-attribution methods: exact and sampled SHAP, integrated
//! gradients (midpoint quadrature plus an exact path-integral variant for
//! additive models), plain gradient, SmoothGrad, and LIME.
//!
//! Each method is a pure map from (model, baseline, example) to a p×q score
//! matrix. Sampling methods take an explicit seed through [`MethodSettings`]
//! and are bit-reproducible. Completeness and linearity checkers live here as
//! well; they are the executable forms of the two axioms the rest of the
//! toolkit revolves around:
//!
//! - complete: Σ_j Φ(f,μ,x)_j = f(x) − E_{X∼μ} f(X)
//! - linear:   Φ(f,μ,x)_j = Φ(f^{(j)}, μ_j, x_j) for f(x) = Σ_j f^{(j)}(x_j)

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{Baseline, BaselineError};
use crate::model::{Component1D, Model, ModelError, ModelKind, PiecewiseLinear1D};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Error)]
pub enum AttributionError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
    #[error("exact SHAP supports at most 20 features, got {0}")]
    TooManyFeatures(usize),
    #[error("unsupported baseline for {method}: {reason}")]
    UnsupportedBaseline {
        method: &'static str,
        reason: String,
    },
    #[error("invalid settings: {0}")]
    InvalidSettings(String),
    #[error("singular ridge system")]
    SingularSystem,
    #[error("{0}")]
    MethodNotApplicable(String),
}

/// Knobs for the sampled methods, with the defaults used by the experiment
/// pipeline: 20 quadrature steps, 100 baseline samples and 500 subset samples
/// for sampled SHAP, Gaussian(x, σ²I) clouds with σ = 0.1 and 100 samples for
/// SmoothGrad and LIME, and λ = 1 for the ridge penalty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSettings {
    pub ig_steps: usize,
    pub shap_baseline_samples: usize,
    pub shap_subset_samples: usize,
    pub smoothgrad_sigma: f64,
    pub smoothgrad_samples: usize,
    pub lime_lambda: f64,
    pub lime_sigma: f64,
    pub lime_samples: usize,
    pub rng_seed: u64,
}

impl Default for MethodSettings {
    fn default() -> Self {
        Self {
            ig_steps: 20,
            shap_baseline_samples: 100,
            shap_subset_samples: 500,
            smoothgrad_sigma: 0.1,
            smoothgrad_samples: 100,
            lime_lambda: 1.0,
            lime_sigma: 0.1,
            lime_samples: 100,
            rng_seed: 0,
        }
    }
}

impl MethodSettings {
    pub fn validate(&self) -> Result<(), AttributionError> {
        let counts = [
            ("ig_steps", self.ig_steps),
            ("shap_baseline_samples", self.shap_baseline_samples),
            ("shap_subset_samples", self.shap_subset_samples),
            ("smoothgrad_samples", self.smoothgrad_samples),
            ("lime_samples", self.lime_samples),
        ];
        for (name, v) in counts {
            if v < 1 {
                return Err(AttributionError::InvalidSettings(format!(
                    "{name} must be ≥ 1"
                )));
            }
        }
        if !(self.smoothgrad_sigma > 0.0) || !(self.lime_sigma > 0.0) {
            return Err(AttributionError::InvalidSettings(
                "sigmas must be positive".into(),
            ));
        }
        if !(self.lime_lambda > 0.0) {
            return Err(AttributionError::InvalidSettings(
                "lime_lambda must be positive".into(),
            ));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.rng_seed = seed;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodTag {
    ShapExact,
    ShapSampled,
    IntegratedGradients,
    IntegratedGradientsExact,
    Gradient,
    Smoothgrad,
    Lime,
}

impl MethodTag {
    pub fn as_str(&self) -> &'static str {
        match self {
            MethodTag::ShapExact => "shap_exact",
            MethodTag::ShapSampled => "shap_sampled",
            MethodTag::IntegratedGradients => "integrated_gradients",
            MethodTag::IntegratedGradientsExact => "integrated_gradients_exact",
            MethodTag::Gradient => "gradient",
            MethodTag::Smoothgrad => "smoothgrad",
            MethodTag::Lime => "lime",
        }
    }

    pub fn needs_baseline(&self) -> bool {
        matches!(
            self,
            MethodTag::ShapExact
                | MethodTag::ShapSampled
                | MethodTag::IntegratedGradients
                | MethodTag::IntegratedGradientsExact
        )
    }
}

impl std::str::FromStr for MethodTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shap" | "shap_exact" => Ok(MethodTag::ShapExact),
            "shap_sampled" => Ok(MethodTag::ShapSampled),
            "ig" | "integrated_gradients" => Ok(MethodTag::IntegratedGradients),
            "ig_exact" | "integrated_gradients_exact" => Ok(MethodTag::IntegratedGradientsExact),
            "gradient" => Ok(MethodTag::Gradient),
            "smoothgrad" => Ok(MethodTag::Smoothgrad),
            "lime" => Ok(MethodTag::Lime),
            other => Err(format!("unknown attribution method '{other}'")),
        }
    }
}

/// A p×q matrix of per-feature scores with provenance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Attribution {
    /// `scores[j][k]` is the attribution of feature j for output k.
    pub scores: Vec<Vec<f64>>,
    pub method_tag: MethodTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub settings: Option<MethodSettings>,
}

impl Attribution {
    fn new(scores: Vec<Vec<f64>>, method_tag: MethodTag, settings: Option<MethodSettings>) -> Self {
        debug_assert!(scores.iter().flatten().all(|s| s.is_finite()));
        Self {
            scores,
            method_tag,
            settings,
        }
    }

    pub fn num_features(&self) -> usize {
        self.scores.len()
    }

    pub fn num_outputs(&self) -> usize {
        self.scores.first().map(|r| r.len()).unwrap_or(0)
    }

    /// Scalar score of feature `j` for output `k`.
    pub fn score(&self, j: usize, k: usize) -> f64 {
        self.scores[j][k]
    }

    /// Rows are features, columns are outputs.
    pub fn to_csv_string(&self) -> String {
        let q = self.num_outputs();
        let mut out = String::from("feature");
        for k in 0..q {
            out.push_str(&format!(",output_{k}"));
        }
        out.push('\n');
        for (j, row) in self.scores.iter().enumerate() {
            out.push_str(&j.to_string());
            for v in row {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("attribution serialization cannot fail")
    }
}

// Seed channels, so the methods never share RNG streams.
const CH_SHAP_OUTER: u64 = 0x01;
const CH_SHAP_INNER: u64 = 0x02;
const CH_IG_BASELINE: u64 = 0x03;
const CH_SMOOTHGRAD: u64 = 0x04;
const CH_LIME: u64 = 0x05;

/// Shapley kernel weights by subset size: ω(i) = i!(p−i−1)!/p!.
fn shapley_weights(p: usize) -> Vec<f64> {
    let mut w = vec![0.0; p];
    w[0] = 1.0 / p as f64;
    for i in 1..p {
        w[i] = w[i - 1] * i as f64 / (p - i) as f64;
    }
    w
}

fn atoms_or_err(
    baseline: &Baseline,
    method: &'static str,
) -> Result<Vec<Vec<f64>>, AttributionError> {
    match baseline.atoms() {
        Some(atoms) => Ok(atoms.into_iter().map(|a| a.to_vec()).collect()),
        None => Err(AttributionError::UnsupportedBaseline {
            method,
            reason: "requires a pointmass or empirical baseline so the outer expectation is an exact finite average".into(),
        }),
    }
}

fn check_example(model: &Model, x: &[f64]) -> Result<(), AttributionError> {
    if x.len() != model.input_dim() {
        return Err(ModelError::DimensionMismatch {
            expected: model.input_dim(),
            got: x.len(),
        }
        .into());
    }
    Ok(())
}

/// Exact marginal SHAP: enumerate S ⊆ [p]\{j} and weight the hybrid-example
/// differences by ω(|S|). Terms with j ∈ S vanish identically, so this is an
/// exact regrouping of the sum over all S ⊆ [p].
pub fn shap_exact(
    model: &Model,
    baseline: &Baseline,
    x: &[f64],
) -> Result<Attribution, AttributionError> {
    check_example(model, x)?;
    let p = model.input_dim();
    let q = model.output_dim();
    if p > 20 {
        return Err(AttributionError::TooManyFeatures(p));
    }
    let atoms = atoms_or_err(baseline, "shap_exact")?;
    if baseline.dim() != p {
        return Err(AttributionError::UnsupportedBaseline {
            method: "shap_exact",
            reason: format!(
                "baseline dimension {} does not match model dimension {p}",
                baseline.dim()
            ),
        });
    }
    let weights = shapley_weights(p);
    let mut scores = vec![vec![0.0; q]; p];
    let mut z = vec![0.0; p];
    for j in 0..p {
        let others: Vec<usize> = (0..p).filter(|&i| i != j).collect();
        let masks = 1usize << others.len();
        for atom in &atoms {
            for mask in 0..masks {
                z.copy_from_slice(atom);
                let mut size = 0usize;
                for (bit, &o) in others.iter().enumerate() {
                    if mask & (1 << bit) != 0 {
                        z[o] = x[o];
                        size += 1;
                    }
                }
                z[j] = x[j];
                let with_j = model.evaluate(&z)?;
                z[j] = atom[j];
                let without_j = model.evaluate(&z)?;
                for k in 0..q {
                    scores[j][k] += weights[size] * (with_j[k] - without_j[k]);
                }
            }
        }
    }
    let n = atoms.len() as f64;
    for row in &mut scores {
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    Ok(Attribution::new(scores, MethodTag::ShapExact, None))
}

/// Monte Carlo SHAP: subsets are drawn with probability ω(|S|) by first
/// sampling |S| from the normalized size distribution and then a uniform
/// subset of that size; the estimator is the unweighted mean of differences.
pub fn shap_sampled(
    model: &Model,
    baseline: &Baseline,
    x: &[f64],
    settings: &MethodSettings,
) -> Result<Attribution, AttributionError> {
    check_example(model, x)?;
    settings.validate()?;
    let p = model.input_dim();
    let q = model.output_dim();
    if baseline.dim() != p {
        return Err(AttributionError::UnsupportedBaseline {
            method: "shap_sampled",
            reason: format!(
                "baseline dimension {} does not match model dimension {p}",
                baseline.dim()
            ),
        });
    }
    let outer = baseline.sample(
        derive_seed(settings.rng_seed, CH_SHAP_OUTER),
        settings.shap_baseline_samples,
    );
    let mut rng = rng_from_seed(derive_seed(settings.rng_seed, CH_SHAP_INNER));

    // P(|S| = i) ∝ ω(i)·C(p−1, i); for the Shapley kernel this is uniform
    // over sizes, but we normalize generically.
    let weights = shapley_weights(p);
    let mut size_probs = vec![0.0; p];
    let mut binom = 1.0;
    for i in 0..p {
        size_probs[i] = weights[i] * binom;
        binom *= (p - 1 - i) as f64 / (i + 1) as f64;
    }
    let total: f64 = size_probs.iter().sum();
    for v in size_probs.iter_mut() {
        *v /= total;
    }

    let mut scores = vec![vec![0.0; q]; p];
    let mut z = vec![0.0; p];
    let mut pool: Vec<usize> = Vec::with_capacity(p);
    for j in 0..p {
        let others: Vec<usize> = (0..p).filter(|&i| i != j).collect();
        for atom in &outer {
            for _ in 0..settings.shap_subset_samples {
                let u: f64 = rng.gen();
                let mut size = 0usize;
                let mut cum = 0.0;
                for (i, &pr) in size_probs.iter().enumerate() {
                    cum += pr;
                    if u < cum {
                        size = i;
                        break;
                    }
                }
                pool.clear();
                pool.extend_from_slice(&others);
                let (subset, _) = pool.partial_shuffle(&mut rng, size);
                z.copy_from_slice(atom);
                for &o in subset.iter() {
                    z[o] = x[o];
                }
                z[j] = x[j];
                let with_j = model.evaluate(&z)?;
                z[j] = atom[j];
                let without_j = model.evaluate(&z)?;
                for k in 0..q {
                    scores[j][k] += with_j[k] - without_j[k];
                }
            }
        }
        let n = (outer.len() * settings.shap_subset_samples) as f64;
        for v in scores[j].iter_mut() {
            *v /= n;
        }
    }
    Ok(Attribution::new(
        scores,
        MethodTag::ShapSampled,
        Some(settings.clone()),
    ))
}

/// Integrated gradients with midpoint-rule quadrature (nodes α = (t−½)/steps).
/// The baseline expectation is an exact average for pointmass and empirical
/// baselines; other variants are approximated with `shap_baseline_samples`
/// seeded draws.
pub fn integrated_gradients(
    model: &Model,
    baseline: &Baseline,
    x: &[f64],
    settings: &MethodSettings,
) -> Result<Attribution, AttributionError> {
    check_example(model, x)?;
    settings.validate()?;
    let p = model.input_dim();
    let q = model.output_dim();
    if baseline.dim() != p {
        return Err(AttributionError::UnsupportedBaseline {
            method: "integrated_gradients",
            reason: format!(
                "baseline dimension {} does not match model dimension {p}",
                baseline.dim()
            ),
        });
    }
    let atoms = match baseline.atoms() {
        Some(atoms) => atoms.into_iter().map(|a| a.to_vec()).collect::<Vec<_>>(),
        None => baseline.sample(
            derive_seed(settings.rng_seed, CH_IG_BASELINE),
            settings.shap_baseline_samples,
        ),
    };
    let steps = settings.ig_steps;
    let mut scores = vec![vec![0.0; q]; p];
    let mut z = vec![0.0; p];
    for atom in &atoms {
        let mut path_sum = vec![vec![0.0; q]; p];
        for t in 0..steps {
            let alpha = (t as f64 + 0.5) / steps as f64;
            for (zi, (&xi, &ai)) in z.iter_mut().zip(x.iter().zip(atom.iter())) {
                *zi = ai + alpha * (xi - ai);
            }
            let grad = model.gradient(&z)?;
            for j in 0..p {
                for k in 0..q {
                    path_sum[j][k] += grad[j][k];
                }
            }
        }
        for j in 0..p {
            let scale = (x[j] - atom[j]) / steps as f64;
            for k in 0..q {
                scores[j][k] += scale * path_sum[j][k];
            }
        }
    }
    let n = atoms.len() as f64;
    for row in &mut scores {
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    Ok(Attribution::new(
        scores,
        MethodTag::IntegratedGradients,
        Some(settings.clone()),
    ))
}

/// Signed path integral ∫_a^b f'(t) dt of a piecewise-linear function,
/// accumulated piece by piece rather than as a value difference.
fn pwl_path_integral(pwl: &PiecewiseLinear1D, a: f64, b: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let (lo, hi) = if a < b { (a, b) } else { (b, a) };
    let n = pwl.breakpoints.len();
    let mut total = 0.0;
    let first = pwl.breakpoints[0];
    let last = pwl.breakpoints[n - 1];
    if lo < first {
        total += pwl.left_slope * (first.min(hi) - lo);
    }
    for i in 0..n.saturating_sub(1) {
        let seg_lo = pwl.breakpoints[i].max(lo);
        let seg_hi = pwl.breakpoints[i + 1].min(hi);
        if seg_hi > seg_lo {
            let slope =
                (pwl.values[i + 1] - pwl.values[i]) / (pwl.breakpoints[i + 1] - pwl.breakpoints[i]);
            total += slope * (seg_hi - seg_lo);
        }
    }
    if hi > last {
        total += pwl.right_slope * (hi - last.max(lo));
    }
    if a < b {
        total
    } else {
        -total
    }
}

/// Exact integrated gradients for additive models under an atom baseline:
/// the path integral per component is evaluated in closed form, so the
/// quadrature error is zero.
pub fn integrated_gradients_exact(
    model: &Model,
    baseline: &Baseline,
    x: &[f64],
) -> Result<Attribution, AttributionError> {
    check_example(model, x)?;
    let additive = match &model.kind {
        ModelKind::Additive(a) => a,
        _ => {
            return Err(AttributionError::MethodNotApplicable(
                "integrated_gradients_exact requires an additive model".into(),
            ))
        }
    };
    let atoms = atoms_or_err(baseline, "integrated_gradients_exact")?;
    let p = model.input_dim();
    let mut scores = vec![vec![0.0; 1]; p];
    for atom in &atoms {
        for (j, comp) in additive.components.iter().enumerate() {
            let contrib = match comp {
                Component1D::Pwl(pwl) => pwl_path_integral(pwl, atom[j], x[j]),
                // Exact integral of a polynomial derivative along the path.
                Component1D::Poly(poly) => poly.evaluate(x[j]) - poly.evaluate(atom[j]),
            };
            scores[j][0] += contrib;
        }
    }
    let n = atoms.len() as f64;
    for row in &mut scores {
        row[0] /= n;
    }
    Ok(Attribution::new(
        scores,
        MethodTag::IntegratedGradientsExact,
        None,
    ))
}

/// The gradient method: Φ(f, μ, x) = ∇f(x), constant in the baseline.
pub fn gradient_method(model: &Model, x: &[f64]) -> Result<Attribution, AttributionError> {
    let scores = model.gradient(x)?;
    Ok(Attribution::new(scores, MethodTag::Gradient, None))
}

/// Seeded Gaussian cloud around `x` with isotropic standard deviation σ.
/// Shared by SmoothGrad and LIME so tests can rebuild the exact sample.
pub fn gaussian_cloud(x: &[f64], sigma: f64, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| {
            x.iter()
                .map(|&xi| {
                    xi + sigma
                        * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)
                })
                .collect()
        })
        .collect()
}

/// SmoothGrad: the seeded Monte Carlo average of ∇f over Gaussian
/// perturbations of `x`.
pub fn smoothgrad(
    model: &Model,
    x: &[f64],
    settings: &MethodSettings,
) -> Result<Attribution, AttributionError> {
    check_example(model, x)?;
    settings.validate()?;
    let p = model.input_dim();
    let q = model.output_dim();
    let cloud = gaussian_cloud(
        x,
        settings.smoothgrad_sigma,
        settings.smoothgrad_samples,
        derive_seed(settings.rng_seed, CH_SMOOTHGRAD),
    );
    let mut scores = vec![vec![0.0; q]; p];
    for point in &cloud {
        let grad = model.gradient(point)?;
        for j in 0..p {
            for k in 0..q {
                scores[j][k] += grad[j][k];
            }
        }
    }
    let n = cloud.len() as f64;
    for row in &mut scores {
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    Ok(Attribution::new(
        scores,
        MethodTag::Smoothgrad,
        Some(settings.clone()),
    ))
}

/// Gaussian elimination with partial pivoting on a small dense system.
fn solve_linear(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>, AttributionError> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[pivot][col].abs() < 1e-12 {
            return Err(AttributionError::SingularSystem);
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// LIME without intercept: the ridge minimizer of
/// E(⟨β, x'⟩ − f(x'))² + λ‖β‖² over a seeded Gaussian sample, with the
/// empirical expectation taken as the sample mean, so the normal equations
/// are (A/n + λI)β = b/n with A = Σ x'x'ᵀ and b = Σ x'·f(x'). Vector outputs
/// are solved per output coordinate.
pub fn lime(
    model: &Model,
    x: &[f64],
    settings: &MethodSettings,
) -> Result<Attribution, AttributionError> {
    check_example(model, x)?;
    settings.validate()?;
    let p = model.input_dim();
    let q = model.output_dim();
    let cloud = gaussian_cloud(
        x,
        settings.lime_sigma,
        settings.lime_samples,
        derive_seed(settings.rng_seed, CH_LIME),
    );
    let n = cloud.len() as f64;
    let mut gram = vec![vec![0.0; p]; p];
    let mut rhs = vec![vec![0.0; p]; q];
    for point in &cloud {
        let y = model.evaluate(point)?;
        for j in 0..p {
            for i in j..p {
                gram[j][i] += point[j] * point[i];
            }
            for k in 0..q {
                rhs[k][j] += point[j] * y[k];
            }
        }
    }
    for j in 0..p {
        for i in 0..j {
            gram[j][i] = gram[i][j];
        }
    }
    for row in gram.iter_mut() {
        for v in row.iter_mut() {
            *v /= n;
        }
    }
    for j in 0..p {
        gram[j][j] += settings.lime_lambda;
    }
    let mut scores = vec![vec![0.0; q]; p];
    for k in 0..q {
        let b: Vec<f64> = rhs[k].iter().map(|v| v / n).collect();
        let beta = solve_linear(gram.clone(), b)?;
        for j in 0..p {
            scores[j][k] = beta[j];
        }
    }
    Ok(Attribution::new(
        scores,
        MethodTag::Lime,
        Some(settings.clone()),
    ))
}

/// Dispatches on the method tag. `baseline` is required for the complete and
/// linear methods and ignored by the local ones.
pub fn attribute(
    method: MethodTag,
    model: &Model,
    baseline: Option<&Baseline>,
    x: &[f64],
    settings: &MethodSettings,
) -> Result<Attribution, AttributionError> {
    let need = |method: &'static str| -> Result<&Baseline, AttributionError> {
        baseline.ok_or(AttributionError::UnsupportedBaseline {
            method,
            reason: "a baseline is required".into(),
        })
    };
    match method {
        MethodTag::ShapExact => shap_exact(model, need("shap_exact")?, x),
        MethodTag::ShapSampled => shap_sampled(model, need("shap_sampled")?, x, settings),
        MethodTag::IntegratedGradients => {
            integrated_gradients(model, need("integrated_gradients")?, x, settings)
        }
        MethodTag::IntegratedGradientsExact => {
            integrated_gradients_exact(model, need("integrated_gradients_exact")?, x)
        }
        MethodTag::Gradient => gradient_method(model, x),
        MethodTag::Smoothgrad => smoothgrad(model, x, settings),
        MethodTag::Lime => lime(model, x, settings),
    }
}

/// Checks the completeness identity for the given method at tolerance
/// `tol`, per output coordinate. Only SHAP and integrated gradients qualify.
pub fn verify_completeness(
    method: MethodTag,
    model: &Model,
    baseline: &Baseline,
    x: &[f64],
    tol: f64,
    settings: &MethodSettings,
) -> Result<bool, AttributionError> {
    if !matches!(
        method,
        MethodTag::ShapExact | MethodTag::IntegratedGradients | MethodTag::IntegratedGradientsExact
    ) {
        return Err(AttributionError::MethodNotApplicable(format!(
            "completeness is only asserted for shap_exact and integrated_gradients, not {}",
            method.as_str()
        )));
    }
    let attribution = attribute(method, model, Some(baseline), x, settings)?;
    let atoms = atoms_or_err(baseline, "verify_completeness")?;
    let q = model.output_dim();
    let mut mean = vec![0.0; q];
    for atom in &atoms {
        let y = model.evaluate(atom)?;
        for k in 0..q {
            mean[k] += y[k];
        }
    }
    for v in mean.iter_mut() {
        *v /= atoms.len() as f64;
    }
    let fx = model.evaluate(x)?;
    for k in 0..q {
        let total: f64 = (0..model.input_dim())
            .map(|j| attribution.score(j, k))
            .sum();
        if (total - (fx[k] - mean[k])).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the linearity identity: the p-dimensional attribution of the
/// additive model against the 1-D attribution of each component under its
/// marginal.
pub fn verify_linearity(
    method: MethodTag,
    components: &[Component1D],
    baseline: &Baseline,
    x: &[f64],
    tol: f64,
    settings: &MethodSettings,
) -> Result<bool, AttributionError> {
    if !matches!(
        method,
        MethodTag::ShapExact | MethodTag::IntegratedGradients | MethodTag::IntegratedGradientsExact
    ) {
        return Err(AttributionError::MethodNotApplicable(format!(
            "linearity is only asserted for shap_exact and integrated_gradients, not {}",
            method.as_str()
        )));
    }
    let model = Model::additive(crate::model::AdditiveModel::new(components.to_vec())?);
    let full = attribute(method, &model, Some(baseline), x, settings)?;
    for (j, comp) in components.iter().enumerate() {
        let one_d = match comp {
            Component1D::Pwl(p) => Model::pwl1d(p.clone()),
            Component1D::Poly(p) => Model::poly(p.clone()),
        };
        let marginal = baseline.marginal(j)?;
        let single = attribute(method, &one_d, Some(&marginal), &[x[j]], settings)?;
        if (full.score(j, 0) - single.score(0, 0)).abs() > tol {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Same check, but takes an arbitrary model and rejects anything that is
/// not additive (linearity is only defined for additive models).
pub fn verify_linearity_model(
    method: MethodTag,
    model: &Model,
    baseline: &Baseline,
    x: &[f64],
    tol: f64,
    settings: &MethodSettings,
) -> Result<bool, AttributionError> {
    match &model.kind {
        ModelKind::Additive(a) => {
            verify_linearity(method, &a.components, baseline, x, tol, settings)
        }
        _ => Err(AttributionError::MethodNotApplicable(
            "linearity check requires an additive model".into(),
        )),
    }
}
