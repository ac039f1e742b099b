//! Model classes used throughout the toolkit: 1-D piecewise-linear functions,
//! additive multivariate models, 1-D polynomials, and small ReLU MLPs.
//!
//! Every model evaluates exactly in f64, exposes an analytic gradient, and can
//! report a sound sup-norm Lipschitz bound over a box. Models are immutable
//! after construction; all operations are pure.
//!
//! Convention at kinks: the derivative of a piecewise-linear function at a
//! breakpoint (and of ReLU at zero) is the right-derivative, which makes the
//! gradient total and deterministic.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("input dimension mismatch: model expects {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid model: {0}")]
    Invalid(String),
    #[error("degenerate box: lo must be strictly below hi in every coordinate")]
    DegenerateBox,
}

/// A continuous piecewise-linear function on the real line.
///
/// Between consecutive breakpoints the function linearly interpolates the
/// stored values; beyond the first (last) breakpoint it continues with
/// `left_slope` (`right_slope`). Continuity is therefore guaranteed by
/// construction, and the piece count is `breakpoints.len() + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinear1D {
    pub breakpoints: Vec<f64>,
    pub values: Vec<f64>,
    pub left_slope: f64,
    pub right_slope: f64,
}

impl PiecewiseLinear1D {
    pub fn new(
        breakpoints: Vec<f64>,
        values: Vec<f64>,
        left_slope: f64,
        right_slope: f64,
    ) -> Result<Self, ModelError> {
        let pwl = Self {
            breakpoints,
            values,
            left_slope,
            right_slope,
        };
        pwl.validate()?;
        Ok(pwl)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.breakpoints.is_empty() {
            return Err(ModelError::Invalid(
                "at least one breakpoint required".into(),
            ));
        }
        if self.breakpoints.len() != self.values.len() {
            return Err(ModelError::Invalid(format!(
                "breakpoints ({}) and values ({}) must have equal length",
                self.breakpoints.len(),
                self.values.len()
            )));
        }
        if !self.breakpoints.windows(2).all(|w| w[0] < w[1]) {
            return Err(ModelError::Invalid(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        let finite = self
            .breakpoints
            .iter()
            .chain(self.values.iter())
            .all(|v| v.is_finite())
            && self.left_slope.is_finite()
            && self.right_slope.is_finite();
        if !finite {
            return Err(ModelError::Invalid(
                "all breakpoints, values and slopes must be finite".into(),
            ));
        }
        Ok(())
    }

    /// The constant function `t ↦ c`.
    pub fn constant(c: f64) -> Self {
        Self {
            breakpoints: vec![0.0],
            values: vec![c],
            left_slope: 0.0,
            right_slope: 0.0,
        }
    }

    /// The linear function `t ↦ slope·t + intercept`.
    pub fn linear(slope: f64, intercept: f64) -> Self {
        Self {
            breakpoints: vec![0.0],
            values: vec![intercept],
            left_slope: slope,
            right_slope: slope,
        }
    }

    /// The absolute-value function `t ↦ |t|`.
    pub fn abs_value() -> Self {
        Self {
            breakpoints: vec![0.0],
            values: vec![0.0],
            left_slope: -1.0,
            right_slope: 1.0,
        }
    }

    fn segment_slope(&self, i: usize) -> f64 {
        (self.values[i + 1] - self.values[i]) / (self.breakpoints[i + 1] - self.breakpoints[i])
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|b| *b <= t);
        if idx == 0 {
            self.values[0] + self.left_slope * (t - self.breakpoints[0])
        } else if idx == n {
            self.values[n - 1] + self.right_slope * (t - self.breakpoints[n - 1])
        } else {
            let i = idx - 1;
            self.values[i] + (t - self.breakpoints[i]) * self.segment_slope(i)
        }
    }

    /// Right-derivative at `t` (kink convention).
    pub fn derivative(&self, t: f64) -> f64 {
        let n = self.breakpoints.len();
        let idx = self.breakpoints.partition_point(|b| *b <= t);
        if idx == 0 {
            self.left_slope
        } else if idx == n {
            self.right_slope
        } else {
            self.segment_slope(idx - 1)
        }
    }

    /// Maximum absolute slope over pieces intersecting `[lo, hi]`; this is the
    /// exact sup-norm Lipschitz constant of the function on that interval.
    pub fn max_abs_slope_over(&self, lo: f64, hi: f64) -> f64 {
        let n = self.breakpoints.len();
        let mut m: f64 = 0.0;
        if lo < self.breakpoints[0] {
            m = m.max(self.left_slope.abs());
        }
        if hi > self.breakpoints[n - 1] {
            m = m.max(self.right_slope.abs());
        }
        for i in 0..n.saturating_sub(1) {
            if self.breakpoints[i] < hi && self.breakpoints[i + 1] > lo {
                m = m.max(self.segment_slope(i).abs());
            }
        }
        m
    }

    /// Restriction to `[lo, hi]`: the returned function agrees with `self` on
    /// the closed interval and extends linearly with the boundary slopes.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<Self, ModelError> {
        if !(lo < hi) {
            return Err(ModelError::Invalid("restrict requires lo < hi".into()));
        }
        let mut breakpoints = vec![lo];
        for &b in &self.breakpoints {
            if b > lo && b < hi {
                breakpoints.push(b);
            }
        }
        breakpoints.push(hi);
        let values: Vec<f64> = breakpoints.iter().map(|&t| self.evaluate(t)).collect();
        Self::new(
            breakpoints,
            values,
            self.derivative(lo),
            self.derivative(hi),
        )
    }
}

/// A 1-D polynomial with degree-ascending coefficients.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial1D {
    pub coefficients: Vec<f64>,
}

impl Polynomial1D {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, ModelError> {
        if coefficients.is_empty() {
            return Err(ModelError::Invalid(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if !coefficients.iter().all(|c| c.is_finite()) {
            return Err(ModelError::Invalid(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Self { coefficients })
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c)
    }

    pub fn derivative_coefficients(&self) -> Vec<f64> {
        self.coefficients
            .iter()
            .enumerate()
            .skip(1)
            .map(|(k, &c)| k as f64 * c)
            .collect()
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.derivative_coefficients()
            .iter()
            .rev()
            .fold(0.0, |acc, &c| acc * t + c)
    }

    /// Sound bound on `sup |p'(t)|` over `[lo, hi]` via coefficient sums.
    pub fn lipschitz_over(&self, lo: f64, hi: f64) -> f64 {
        let m = lo.abs().max(hi.abs());
        self.derivative_coefficients()
            .iter()
            .enumerate()
            .map(|(k, d)| d.abs() * m.powi(k as i32))
            .sum()
    }
}

/// One additive component: a 1-D piecewise-linear function or polynomial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Component1D {
    #[serde(rename = "pwl1d")]
    Pwl(PiecewiseLinear1D),
    Poly(Polynomial1D),
}

impl Component1D {
    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            Component1D::Pwl(p) => p.evaluate(t),
            Component1D::Poly(p) => p.evaluate(t),
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match self {
            Component1D::Pwl(p) => p.derivative(t),
            Component1D::Poly(p) => p.derivative(t),
        }
    }

    pub fn lipschitz_over(&self, lo: f64, hi: f64) -> f64 {
        match self {
            Component1D::Pwl(p) => p.max_abs_slope_over(lo, hi),
            Component1D::Poly(p) => p.lipschitz_over(lo, hi),
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        match self {
            Component1D::Pwl(p) => p.validate(),
            Component1D::Poly(p) => {
                if p.coefficients.is_empty() {
                    Err(ModelError::Invalid("empty polynomial component".into()))
                } else {
                    Ok(())
                }
            }
        }
    }
}

/// `f(x) = Σ_j components[j](x_j)`, scalar output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdditiveModel {
    pub components: Vec<Component1D>,
}

impl AdditiveModel {
    pub fn new(components: Vec<Component1D>) -> Result<Self, ModelError> {
        if components.is_empty() {
            return Err(ModelError::Invalid(
                "additive model needs at least one component".into(),
            ));
        }
        for c in &components {
            c.validate()?;
        }
        Ok(Self { components })
    }

    pub fn input_dim(&self) -> usize {
        self.components.len()
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.components
            .iter()
            .zip(x)
            .map(|(c, &t)| c.evaluate(t))
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpLayer {
    /// Row-major weight matrix, one row per output unit.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

/// A fully connected ReLU network: ReLU on hidden layers, identity output.
/// As a function of its input it is piecewise linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpModel {
    pub layers: Vec<MlpLayer>,
}

impl MlpModel {
    pub fn new(layers: Vec<MlpLayer>) -> Result<Self, ModelError> {
        let mlp = Self { layers };
        mlp.validate()?;
        Ok(mlp)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.layers.is_empty() {
            return Err(ModelError::Invalid("MLP needs at least one layer".into()));
        }
        let mut dim = self.layers[0].weights.first().map(|r| r.len()).unwrap_or(0);
        if dim == 0 {
            return Err(ModelError::Invalid("first layer has no inputs".into()));
        }
        for (i, layer) in self.layers.iter().enumerate() {
            if layer.weights.is_empty() || layer.weights.len() != layer.bias.len() {
                return Err(ModelError::Invalid(format!(
                    "layer {i}: weight rows must match bias length and be non-empty"
                )));
            }
            for row in &layer.weights {
                if row.len() != dim {
                    return Err(ModelError::Invalid(format!(
                        "layer {i}: expected rows of length {dim}, got {}",
                        row.len()
                    )));
                }
            }
            dim = layer.weights.len();
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].weights[0].len()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().unwrap().bias.len()
    }

    /// Total number of hidden units, an upper bound on kinks along any segment.
    pub fn hidden_units(&self) -> usize {
        self.layers[..self.layers.len() - 1]
            .iter()
            .map(|l| l.bias.len())
            .sum()
    }

    pub fn forward(&self, x: &[f64]) -> Vec<f64> {
        let last = self.layers.len() - 1;
        let mut a = x.to_vec();
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = layer.bias.clone();
            for (out, row) in z.iter_mut().zip(&layer.weights) {
                *out += row.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>();
            }
            if i < last {
                for v in z.iter_mut() {
                    *v = v.max(0.0);
                }
            }
            a = z;
        }
        a
    }

    /// Jacobian as a p×q matrix: `jac[j][k] = ∂f_k/∂x_j`. ReLU at exactly
    /// zero pre-activation uses the right-derivative (slope 1).
    pub fn jacobian(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let p = self.input_dim();
        let last = self.layers.len() - 1;
        let mut a = x.to_vec();
        // jac_rows[u][j] = ∂a_u/∂x_j for the current activation vector.
        let mut jac_rows: Vec<Vec<f64>> = (0..p)
            .map(|j| (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for (i, layer) in self.layers.iter().enumerate() {
            let out_dim = layer.bias.len();
            let mut z = layer.bias.clone();
            let mut next_jac = vec![vec![0.0; p]; out_dim];
            for u in 0..out_dim {
                let row = &layer.weights[u];
                z[u] += row.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>();
                for (w, jr) in row.iter().zip(&jac_rows) {
                    if *w != 0.0 {
                        for j in 0..p {
                            next_jac[u][j] += w * jr[j];
                        }
                    }
                }
            }
            if i < last {
                for u in 0..out_dim {
                    if z[u] < 0.0 {
                        z[u] = 0.0;
                        for v in next_jac[u].iter_mut() {
                            *v = 0.0;
                        }
                    }
                }
            }
            a = z;
            jac_rows = next_jac;
        }
        // Transpose q×p -> p×q.
        let q = jac_rows.len();
        (0..p)
            .map(|j| (0..q).map(|k| jac_rows[k][j]).collect())
            .collect()
    }

    /// Product of ∞-operator norms of the weight matrices. Loose but sound.
    pub fn lipschitz_product_bound(&self) -> f64 {
        self.layers
            .iter()
            .map(|l| {
                l.weights
                    .iter()
                    .map(|row| row.iter().map(|w| w.abs()).sum::<f64>())
                    .fold(0.0_f64, f64::max)
            })
            .product()
    }
}

/// Tagged model variant; the serialized form carries a `"kind"` discriminator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(rename = "pwl1d")]
    Pwl1d(PiecewiseLinear1D),
    Additive(AdditiveModel),
    Poly(Polynomial1D),
    Mlp(MlpModel),
}

/// Handle over any supported model, with an optional cached Lipschitz bound
/// (sup-norm, valid on the domain box it was computed for).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    #[serde(flatten)]
    pub kind: ModelKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lipschitz: Option<f64>,
}

impl From<ModelKind> for Model {
    fn from(kind: ModelKind) -> Self {
        Self {
            kind,
            lipschitz: None,
        }
    }
}

impl Model {
    pub fn pwl1d(p: PiecewiseLinear1D) -> Self {
        ModelKind::Pwl1d(p).into()
    }

    pub fn additive(a: AdditiveModel) -> Self {
        ModelKind::Additive(a).into()
    }

    pub fn poly(p: Polynomial1D) -> Self {
        ModelKind::Poly(p).into()
    }

    pub fn mlp(m: MlpModel) -> Self {
        ModelKind::Mlp(m).into()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match &self.kind {
            ModelKind::Pwl1d(p) => p.validate(),
            ModelKind::Additive(a) => {
                if a.components.is_empty() {
                    return Err(ModelError::Invalid(
                        "additive model with no components".into(),
                    ));
                }
                a.components.iter().try_for_each(|c| c.validate())
            }
            ModelKind::Poly(p) => {
                if p.coefficients.is_empty() {
                    Err(ModelError::Invalid("empty polynomial".into()))
                } else {
                    Ok(())
                }
            }
            ModelKind::Mlp(m) => m.validate(),
        }
    }

    pub fn input_dim(&self) -> usize {
        match &self.kind {
            ModelKind::Pwl1d(_) | ModelKind::Poly(_) => 1,
            ModelKind::Additive(a) => a.input_dim(),
            ModelKind::Mlp(m) => m.input_dim(),
        }
    }

    pub fn output_dim(&self) -> usize {
        match &self.kind {
            ModelKind::Mlp(m) => m.output_dim(),
            _ => 1,
        }
    }

    fn check_dim(&self, x: &[f64]) -> Result<(), ModelError> {
        if x.len() != self.input_dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    /// Exact function value, `q`-dimensional.
    pub fn evaluate(&self, x: &[f64]) -> Result<Vec<f64>, ModelError> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            ModelKind::Pwl1d(p) => vec![p.evaluate(x[0])],
            ModelKind::Poly(p) => vec![p.evaluate(x[0])],
            ModelKind::Additive(a) => vec![a.evaluate(x)],
            ModelKind::Mlp(m) => m.forward(x),
        })
    }

    /// Scalar shortcut for models with one output.
    pub fn evaluate_scalar(&self, x: &[f64]) -> Result<f64, ModelError> {
        let y = self.evaluate(x)?;
        Ok(y[0])
    }

    /// Analytic gradient as a p×q matrix (`grad[j][k] = ∂f_k/∂x_j`), using
    /// the right-derivative at kinks.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<Vec<f64>>, ModelError> {
        self.check_dim(x)?;
        Ok(match &self.kind {
            ModelKind::Pwl1d(p) => vec![vec![p.derivative(x[0])]],
            ModelKind::Poly(p) => vec![vec![p.derivative(x[0])]],
            ModelKind::Additive(a) => a
                .components
                .iter()
                .zip(x)
                .map(|(c, &t)| vec![c.derivative(t)])
                .collect(),
            ModelKind::Mlp(m) => m.jacobian(x),
        })
    }

    /// Upper bound on the sup-norm Lipschitz constant over the box. Exact for
    /// piecewise-linear and additive models; product-of-norms bound for MLPs.
    pub fn lipschitz_bound(&self, domain: &[(f64, f64)]) -> Result<f64, ModelError> {
        if domain.len() != self.input_dim() {
            return Err(ModelError::DimensionMismatch {
                expected: self.input_dim(),
                got: domain.len(),
            });
        }
        if domain.iter().any(|(lo, hi)| !(lo < hi)) {
            return Err(ModelError::DegenerateBox);
        }
        Ok(match &self.kind {
            ModelKind::Pwl1d(p) => p.max_abs_slope_over(domain[0].0, domain[0].1),
            ModelKind::Poly(p) => p.lipschitz_over(domain[0].0, domain[0].1),
            // Sum convention: |f(x)-f(x')| ≤ Σ_j L_j |x_j-x'_j| ≤ (Σ_j L_j)·‖x-x'‖_∞.
            ModelKind::Additive(a) => a
                .components
                .iter()
                .zip(domain)
                .map(|(c, &(lo, hi))| c.lipschitz_over(lo, hi))
                .sum(),
            ModelKind::Mlp(m) => m.lipschitz_product_bound(),
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("model serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, ModelError> {
        let model: Model = serde_json::from_value(value.clone())
            .map_err(|e| ModelError::Invalid(format!("model JSON: {e}")))?;
        model.validate()?;
        Ok(model)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;
    use proptest::prelude::*;
    use rand::Rng;

    fn abs_model() -> Model {
        Model::pwl1d(PiecewiseLinear1D::abs_value())
    }

    #[test]
    fn abs_evaluates() {
        assert_eq!(abs_model().evaluate_scalar(&[2.0]).unwrap(), 2.0);
        assert_eq!(abs_model().evaluate_scalar(&[-3.5]).unwrap(), 3.5);
    }

    #[test]
    fn additive_identity_components() {
        let m = Model::additive(
            AdditiveModel::new(vec![
                Component1D::Pwl(PiecewiseLinear1D::linear(1.0, 0.0)),
                Component1D::Pwl(PiecewiseLinear1D::linear(1.0, 0.0)),
            ])
            .unwrap(),
        );
        assert_eq!(m.evaluate_scalar(&[1.0, 1.0]).unwrap(), 2.0);
    }

    #[test]
    fn cubic_root() {
        let m = Model::poly(Polynomial1D::new(vec![0.0, -1.0, 0.0, 1.0]).unwrap());
        assert_eq!(m.evaluate_scalar(&[1.0]).unwrap(), 0.0);
        assert_eq!(m.gradient(&[1.0]).unwrap()[0][0], 2.0);
    }

    #[test]
    fn abs_gradient_right_branch_and_kink() {
        assert_eq!(abs_model().gradient(&[2.0]).unwrap()[0][0], 1.0);
        // Right-derivative convention at the kink.
        assert_eq!(abs_model().gradient(&[0.0]).unwrap()[0][0], 1.0);
        assert_eq!(abs_model().gradient(&[-1.0]).unwrap()[0][0], -1.0);
    }

    #[test]
    fn single_layer_mlp_gradient_is_weight_row() {
        let m = Model::mlp(
            MlpModel::new(vec![MlpLayer {
                weights: vec![vec![2.0, 3.0]],
                bias: vec![0.0],
            }])
            .unwrap(),
        );
        let g = m.gradient(&[0.4, -1.7]).unwrap();
        assert_eq!(g, vec![vec![2.0], vec![3.0]]);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let err = abs_model().evaluate(&[1.0, 2.0]).unwrap_err();
        assert!(matches!(
            err,
            ModelError::DimensionMismatch {
                expected: 1,
                got: 2
            }
        ));
    }

    #[test]
    fn lipschitz_examples() {
        assert_eq!(abs_model().lipschitz_bound(&[(-1.0, 1.0)]).unwrap(), 1.0);
        let additive = Model::additive(
            AdditiveModel::new(vec![
                Component1D::Pwl(PiecewiseLinear1D::linear(2.0, 0.0)),
                Component1D::Pwl(PiecewiseLinear1D::linear(-3.0, 0.0)),
            ])
            .unwrap(),
        );
        assert_eq!(
            additive
                .lipschitz_bound(&[(-2.0, 2.0), (-2.0, 2.0)])
                .unwrap(),
            5.0
        );
        let constant = Model::pwl1d(PiecewiseLinear1D::constant(4.0));
        assert_eq!(constant.lipschitz_bound(&[(-1.0, 1.0)]).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_box_rejected() {
        assert!(matches!(
            abs_model().lipschitz_bound(&[(1.0, 1.0)]),
            Err(ModelError::DegenerateBox)
        ));
    }

    fn random_mlp(rng: &mut impl Rng, p: usize, hidden: &[usize], q: usize) -> MlpModel {
        let mut dims = vec![p];
        dims.extend_from_slice(hidden);
        dims.push(q);
        let layers = dims
            .windows(2)
            .map(|w| MlpLayer {
                weights: (0..w[1])
                    .map(|_| (0..w[0]).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect(),
                bias: (0..w[1]).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            })
            .collect();
        MlpModel::new(layers).unwrap()
    }

    /// Along a random segment an MLP restricts to a piecewise-linear function:
    /// second differences of 101 evenly spaced samples vanish except in at
    /// most `hidden_units` kink clusters.
    #[test]
    fn mlp_is_piecewise_linear_on_segments() {
        let mut rng = rng_from_seed(41);
        for _ in 0..20 {
            let mlp = random_mlp(&mut rng, 3, &[4, 3], 1);
            let model = Model::mlp(mlp.clone());
            let a: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let samples: Vec<f64> = (0..=100)
                .map(|i| {
                    let t = i as f64 / 100.0;
                    let x: Vec<f64> = a
                        .iter()
                        .zip(&b)
                        .map(|(ai, bi)| ai + t * (bi - ai))
                        .collect();
                    model.evaluate_scalar(&x).unwrap()
                })
                .collect();
            let mut clusters = 0usize;
            let mut in_cluster = false;
            for i in 1..100 {
                let second = samples[i + 1] - 2.0 * samples[i] + samples[i - 1];
                if second.abs() > 1e-8 {
                    if !in_cluster {
                        clusters += 1;
                    }
                    in_cluster = true;
                } else {
                    in_cluster = false;
                }
            }
            assert!(
                clusters <= mlp.hidden_units(),
                "{clusters} kink clusters exceeds {} hidden units",
                mlp.hidden_units()
            );
        }
    }

    /// Analytic gradients match central finite differences at smooth points.
    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = rng_from_seed(42);
        let h = 1e-5;
        let models: Vec<Model> = vec![
            Model::poly(Polynomial1D::new(vec![0.3, -1.0, 0.5, 0.25]).unwrap()),
            Model::pwl1d(
                PiecewiseLinear1D::new(vec![-1.0, 0.0, 1.0], vec![1.0, 0.0, 0.5], -2.0, 1.5)
                    .unwrap(),
            ),
            Model::mlp(random_mlp(&mut rng, 4, &[5], 2)),
        ];
        for model in &models {
            let p = model.input_dim();
            let q = model.output_dim();
            let mut checked = 0;
            while checked < 100 {
                let x: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
                if !is_smooth_at(model, &x, 10.0 * h) {
                    continue;
                }
                checked += 1;
                let grad = model.gradient(&x).unwrap();
                for j in 0..p {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[j] += h;
                    xm[j] -= h;
                    let fp = model.evaluate(&xp).unwrap();
                    let fm = model.evaluate(&xm).unwrap();
                    for k in 0..q {
                        let fd = (fp[k] - fm[k]) / (2.0 * h);
                        assert!(
                            (grad[j][k] - fd).abs() <= 1e-5,
                            "fd mismatch: {} vs {}",
                            grad[j][k],
                            fd
                        );
                    }
                }
            }
        }
    }

    fn is_smooth_at(model: &Model, x: &[f64], margin: f64) -> bool {
        match &model.kind {
            ModelKind::Pwl1d(p) => p.breakpoints.iter().all(|b| (x[0] - b).abs() > margin),
            ModelKind::Poly(_) => true,
            ModelKind::Additive(a) => a.components.iter().zip(x).all(|(c, &t)| match c {
                Component1D::Pwl(p) => p.breakpoints.iter().all(|b| (t - b).abs() > margin),
                Component1D::Poly(_) => true,
            }),
            ModelKind::Mlp(m) => {
                // Stay away from ReLU boundaries: all hidden pre-activations
                // must be comfortably nonzero.
                let last = m.layers.len() - 1;
                let mut a = x.to_vec();
                for (i, layer) in m.layers.iter().enumerate() {
                    let mut z = layer.bias.clone();
                    for (out, row) in z.iter_mut().zip(&layer.weights) {
                        *out += row.iter().zip(&a).map(|(w, v)| w * v).sum::<f64>();
                    }
                    if i < last {
                        if z.iter().any(|v| v.abs() < 100.0 * margin) {
                            return false;
                        }
                        for v in z.iter_mut() {
                            *v = v.max(0.0);
                        }
                    }
                    a = z;
                }
                true
            }
        }
    }

    /// The reported bound dominates empirical difference quotients.
    #[test]
    fn lipschitz_bound_dominates_difference_quotients() {
        let mut rng = rng_from_seed(43);
        let domain2 = vec![(-2.0, 2.0); 2];
        let domain1 = vec![(-2.0, 2.0)];
        let models: Vec<(Model, Vec<(f64, f64)>)> = vec![
            (
                Model::pwl1d(
                    PiecewiseLinear1D::new(vec![-0.5, 0.3, 1.2], vec![0.2, -1.0, 0.7], -3.0, 0.5)
                        .unwrap(),
                ),
                domain1.clone(),
            ),
            (
                Model::poly(Polynomial1D::new(vec![0.0, -1.0, 0.0, 1.0]).unwrap()),
                domain1,
            ),
            (
                Model::mlp(random_mlp(&mut rng, 2, &[6], 1)),
                domain2.clone(),
            ),
            (
                Model::additive(
                    AdditiveModel::new(vec![
                        Component1D::Pwl(PiecewiseLinear1D::abs_value()),
                        Component1D::Poly(Polynomial1D::new(vec![0.0, 0.0, 1.0]).unwrap()),
                    ])
                    .unwrap(),
                ),
                domain2,
            ),
        ];
        for (model, domain) in &models {
            let bound = model.lipschitz_bound(domain).unwrap();
            for _ in 0..10_000 {
                let x: Vec<f64> = domain
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..hi))
                    .collect();
                let y: Vec<f64> = domain
                    .iter()
                    .map(|&(lo, hi)| rng.gen_range(lo..hi))
                    .collect();
                let dist = x
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                if dist < 1e-9 {
                    continue;
                }
                let fx = model.evaluate(&x).unwrap();
                let fy = model.evaluate(&y).unwrap();
                for k in 0..model.output_dim() {
                    let quot = (fx[k] - fy[k]).abs() / dist;
                    assert!(quot <= bound * (1.0 + 1e-12) + 1e-12, "{quot} > {bound}");
                }
            }
        }
    }

    prop_compose! {
        fn arb_pwl()(
            n in 1usize..6,
            raw in proptest::collection::vec(-100.0f64..100.0, 12),
        ) -> PiecewiseLinear1D {
            let mut sorted: Vec<f64> = raw[..n].to_vec();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut bps: Vec<f64> = Vec::new();
            for b in sorted {
                if bps.last().map_or(true, |&prev| b - prev > 0.1) {
                    bps.push(b);
                }
            }
            let values = raw[6..6 + bps.len()].to_vec();
            PiecewiseLinear1D::new(bps, values, raw[10], raw[11]).unwrap()
        }
    }

    proptest! {
        /// JSON round-trips are bit-exact for finite doubles.
        #[test]
        fn json_round_trip_exact(pwl in arb_pwl()) {
            let model = Model::pwl1d(pwl);
            let json = serde_json::to_string(&model).unwrap();
            let back: Model = serde_json::from_str(&json).unwrap();
            prop_assert_eq!(model, back);
        }

        #[test]
        fn pwl_continuous_at_breakpoints(pwl in arb_pwl()) {
            let slope_cap = pwl.max_abs_slope_over(f64::NEG_INFINITY, f64::INFINITY);
            for &b in &pwl.breakpoints {
                let eps = 1e-9 * (1.0 + b.abs());
                let at = pwl.evaluate(b);
                // A probe at distance eps may move by slope·eps; anything
                // beyond that would be a jump in the representation.
                let tol = eps * slope_cap + 1e-9 * (1.0 + at.abs());
                prop_assert!((pwl.evaluate(b - eps) - at).abs() <= tol);
                prop_assert!((pwl.evaluate(b + eps) - at).abs() <= tol);
            }
        }
    }

    #[test]
    fn mlp_json_round_trip() {
        let mut rng = rng_from_seed(44);
        let model = Model::mlp(random_mlp(&mut rng, 3, &[4], 2));
        let json = serde_json::to_string(&model).unwrap();
        let back: Model = serde_json::from_str(&json).unwrap();
        assert_eq!(model, back);
    }

    #[test]
    fn restriction_agrees_on_interval() {
        let pwl =
            PiecewiseLinear1D::new(vec![-1.0, 0.0, 2.0], vec![3.0, 0.0, 1.0], -1.0, 2.0).unwrap();
        let r = pwl.restrict(-0.5, 1.0).unwrap();
        for i in 0..=50 {
            let t = -0.5 + 1.5 * i as f64 / 50.0;
            assert!((pwl.evaluate(t) - r.evaluate(t)).abs() < 1e-12);
        }
    }
}
