//! Counterexample forging: given a prescribed local behaviour g around an
//! example, a baseline, and a target attribution φ, build a model that equals
//! g on the δ-neighbourhood of the example and receives attribution exactly φ
//! from every complete and linear attribution method.
//!
//! The construction keeps a single active feature. Outside the neighbourhood
//! the component continues linearly on each side of the witness interval
//! (slopes βL and βR, one of which is zero) and vanishes beyond it, so the
//! whole model is piecewise linear. The nonzero slope is the solution of one
//! linear equation in exact interval masses and truncated first moments of
//! the baseline marginal; completeness then pins the attribution to φ, and
//! linearity carries the value to the multivariate model.
//!
//! Also houses the random-polynomial sign experiment over f(x) = a·xⁿ − x,
//! where the complete-and-linear attribution a(1 − E Xⁿ) − 1 disagrees in
//! sign with f'(1) = n·a − 1 for all a in (1/n, 1/(1 − E Xⁿ)).

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::baseline::{Baseline, BaselineError, Interval};
use crate::model::{AdditiveModel, Component1D, Model, ModelError, PiecewiseLinear1D};
use crate::seed::rng_from_seed;

/// Width of the continuity ramp appended just outside the witness interval.
/// The ramp carries zero baseline mass when the witness endpoints sit at the
/// domain edge, so it does not perturb the attribution equation.
pub const RAMP_WIDTH: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("assumption violated: {0}")]
    AssumptionViolated(String),
    #[error("degenerate behaviour: {0}")]
    DegenerateBehaviour(String),
    #[error("moment condition violated: E X^n = {0} is outside (1/2, 1)")]
    MomentCondition(f64),
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

/// The behaviour a forged model must reproduce on the closed neighbourhood
/// `[x_j − δ, x_j + δ]` of feature `j`.
///
/// The supplied function is normalized to its restriction on that interval at
/// construction time, so the forged component shares the exact breakpoint
/// anchors (and therefore the exact evaluation arithmetic) with `g`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalBehaviour {
    g: PiecewiseLinear1D,
    x: Vec<f64>,
    feature: usize,
    delta: f64,
}

impl LocalBehaviour {
    pub fn new(
        g: PiecewiseLinear1D,
        x: Vec<f64>,
        feature: usize,
        delta: f64,
    ) -> Result<Self, ForgeError> {
        if feature >= x.len() {
            return Err(ForgeError::Config(format!(
                "feature {feature} out of range for dimension {}",
                x.len()
            )));
        }
        if !(delta > 0.0) {
            return Err(ForgeError::Config("delta must be positive".into()));
        }
        g.validate()?;
        let lo = x[feature] - delta;
        let hi = x[feature] + delta;
        for t in [lo, x[feature], hi] {
            if !g.evaluate(t).is_finite() {
                return Err(ForgeError::DegenerateBehaviour(format!(
                    "g({t}) is not finite"
                )));
            }
        }
        let g = g.restrict(lo, hi)?;
        Ok(Self {
            g,
            x,
            feature,
            delta,
        })
    }

    pub fn g(&self) -> &PiecewiseLinear1D {
        &self.g
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn feature(&self) -> usize {
        self.feature
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    fn neighbourhood(&self) -> (f64, f64) {
        (
            self.x[self.feature] - self.delta,
            self.x[self.feature] + self.delta,
        )
    }

    fn same_anchor(&self, other: &Self) -> bool {
        self.x == other.x && self.feature == other.feature && self.delta == other.delta
    }
}

/// Provenance block serialized next to the forged model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForgeProvenance {
    pub target_phi: f64,
    pub delta: f64,
    pub feature: usize,
    pub witness: (f64, f64),
    pub beta_left: f64,
    pub beta_right: f64,
}

/// A model produced by the forge together with the solved slopes and witness.
#[derive(Debug, Clone, PartialEq)]
pub struct ForgedModel {
    pub model: Model,
    pub provenance: ForgeProvenance,
}

impl ForgedModel {
    pub fn beta_left(&self) -> f64 {
        self.provenance.beta_left
    }

    pub fn beta_right(&self) -> f64 {
        self.provenance.beta_right
    }

    /// Model JSON with an extra `forge_provenance` block.
    pub fn to_json(&self) -> serde_json::Value {
        let mut value = self.model.to_json();
        value["forge_provenance"] =
            serde_json::to_value(&self.provenance).expect("provenance serialization cannot fail");
        value
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, ForgeError> {
        let provenance: ForgeProvenance = serde_json::from_value(
            value
                .get("forge_provenance")
                .ok_or_else(|| ForgeError::Config("missing forge_provenance block".into()))?
                .clone(),
        )
        .map_err(|e| ForgeError::Config(format!("forge_provenance: {e}")))?;
        let model = Model::from_json(value)?;
        Ok(Self { model, provenance })
    }
}

/// Exact `E[g(X_j) · 1{X_j ∈ [lo, hi]}]` for a piecewise-linear `g`: a finite
/// sum for atomic baselines, and per-piece closed forms in the interval mass
/// and truncated first moment otherwise.
pub fn pwl_expectation_over(
    baseline: &Baseline,
    j: usize,
    g: &PiecewiseLinear1D,
    lo: f64,
    hi: f64,
) -> Result<f64, ForgeError> {
    let interval = Interval::closed(lo, hi);
    if let Some(atoms) = baseline.atoms() {
        let total: f64 = atoms
            .iter()
            .filter(|a| interval.contains(a[j]))
            .map(|a| g.evaluate(a[j]))
            .sum();
        return Ok(total / atoms.len() as f64);
    }
    // Split [lo, hi] at the breakpoints of g; on each piece g is the line
    // g(a) + slope·(t − a), so the expectation contribution is
    // (g(a) − slope·a)·mass + slope·truncated_first_moment.
    let mut cuts = vec![lo];
    for &b in &g.breakpoints {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    cuts.push(hi);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (a, b) = (w[0], w[1]);
        if !(a < b) {
            continue;
        }
        let slope = g.derivative(a);
        let intercept = g.evaluate(a) - slope * a;
        let piece = Interval::closed(a, b);
        total += intercept * baseline.interval_mass(j, &piece)?
            + slope * baseline.truncated_first_moment(j, &piece)?;
    }
    Ok(total)
}

/// Builds the forged 1-D component from the solved slopes.
fn build_component(
    g: &PiecewiseLinear1D,
    nb: (f64, f64),
    witness: (f64, f64),
    beta_left: f64,
    beta_right: f64,
) -> Result<PiecewiseLinear1D, ForgeError> {
    let (nb_lo, nb_hi) = nb;
    let (w_lo, w_hi) = witness;
    let g_lo = g.values[0];
    let g_hi = *g.values.last().unwrap();
    let mut breakpoints = Vec::new();
    let mut values = Vec::new();
    let left_slope = if w_lo.is_finite() {
        let at_witness = beta_left * (w_lo - nb_lo) + g_lo;
        breakpoints.push(w_lo - RAMP_WIDTH);
        values.push(0.0);
        breakpoints.push(w_lo);
        values.push(at_witness);
        0.0
    } else {
        beta_left
    };
    // The anchors on [nb_lo, nb_hi] are g's own breakpoints and values, so
    // evaluation inside the neighbourhood follows the same arithmetic path.
    breakpoints.extend_from_slice(&g.breakpoints);
    values.extend_from_slice(&g.values);
    let right_slope = if w_hi.is_finite() {
        let at_witness = beta_right * (w_hi - nb_hi) + g_hi;
        breakpoints.push(w_hi);
        values.push(at_witness);
        breakpoints.push(w_hi + RAMP_WIDTH);
        values.push(0.0);
        0.0
    } else {
        beta_right
    };
    PiecewiseLinear1D::new(breakpoints, values, left_slope, right_slope).map_err(|e| {
        ForgeError::Config(format!(
            "forged component violates the breakpoint invariants: {e}"
        ))
    })
}

/// Forges a model that equals `behaviour.g` on the neighbourhood and receives
/// attribution `target_phi` at `(baseline, x)` on the active feature from
/// every complete and linear method.
///
/// `domain` is the per-feature domain box; feature `feature`'s extent is used
/// as the witness interval (the widest valid choice).
pub fn forge_counterexample(
    behaviour: &LocalBehaviour,
    baseline: &Baseline,
    domain: &[(f64, f64)],
    target_phi: f64,
) -> Result<ForgedModel, ForgeError> {
    let p = behaviour.x.len();
    if baseline.dim() != p || domain.len() != p {
        return Err(ForgeError::Config(format!(
            "dimension mismatch: behaviour {p}, baseline {}, domain {}",
            baseline.dim(),
            domain.len()
        )));
    }
    if !target_phi.is_finite() {
        return Err(ForgeError::Config(
            "target attribution must be finite".into(),
        ));
    }
    let j = behaviour.feature;
    let check = baseline.check_assumption1(&behaviour.x, j, behaviour.delta, domain)?;
    if !check.holds {
        return Err(ForgeError::AssumptionViolated(format!(
            "baseline has no marginal mass in ({}, {}) outside [{}, {}] for feature {j}",
            check.witness.0,
            check.witness.1,
            behaviour.x[j] - behaviour.delta,
            behaviour.x[j] + behaviour.delta,
        )));
    }
    let (w_lo, w_hi) = check.witness;
    let (nb_lo, nb_hi) = behaviour.neighbourhood();
    let g = &behaviour.g;

    let left = Interval::open(w_lo, nb_lo);
    let right = Interval::open(nb_hi, w_hi);
    let mass_left = baseline.interval_mass(j, &left)?;
    let mass_right = baseline.interval_mass(j, &right)?;
    let mom_left = baseline.truncated_first_moment(j, &left)?;
    let mom_right = baseline.truncated_first_moment(j, &right)?;
    let coef_left = mom_left - nb_lo * mass_left;
    let coef_right = mom_right - nb_hi * mass_right;

    let g_lo = g.evaluate(nb_lo);
    let g_hi = g.evaluate(nb_hi);
    let g_at_x = g.evaluate(behaviour.x[j]);
    let mid = pwl_expectation_over(baseline, j, g, nb_lo, nb_hi)?;
    let rhs = -g_lo * mass_left - g_hi * mass_right - mid + g_at_x - target_phi;

    let (beta_left, beta_right) = if coef_left == 0.0 && coef_right == 0.0 {
        return Err(ForgeError::AssumptionViolated(
            "both equation coefficients vanish; no outer mass to carry the slope".into(),
        ));
    } else if coef_left.abs() >= coef_right.abs() && coef_left != 0.0 {
        // Ties go to the left side for determinism.
        (rhs / coef_left, 0.0)
    } else {
        (0.0, rhs / coef_right)
    };

    let component = build_component(g, (nb_lo, nb_hi), (w_lo, w_hi), beta_left, beta_right)?;
    let components: Vec<Component1D> = (0..p)
        .map(|i| {
            if i == j {
                Component1D::Pwl(component.clone())
            } else {
                Component1D::Pwl(PiecewiseLinear1D::constant(0.0))
            }
        })
        .collect();
    let model = Model::additive(AdditiveModel::new(components)?);
    Ok(ForgedModel {
        model,
        provenance: ForgeProvenance {
            target_phi,
            delta: behaviour.delta,
            feature: j,
            witness: (w_lo, w_hi),
            beta_left,
            beta_right,
        },
    })
}

/// Two models with identical attribution `shared_phi` but the two supplied
/// local behaviours: no test reading only the shared attribution can tell
/// them apart.
pub fn forge_pair(
    behaviour0: &LocalBehaviour,
    behaviour1: &LocalBehaviour,
    baseline: &Baseline,
    domain: &[(f64, f64)],
    shared_phi: f64,
) -> Result<(ForgedModel, ForgedModel), ForgeError> {
    if !behaviour0.same_anchor(behaviour1) {
        return Err(ForgeError::Config(
            "paired behaviours must share the example, feature, and radius".into(),
        ));
    }
    Ok((
        forge_counterexample(behaviour0, baseline, domain, shared_phi)?,
        forge_counterexample(behaviour1, baseline, domain, shared_phi)?,
    ))
}

/// Monte Carlo estimate of the probability that the complete-and-linear
/// attribution of f(x) = a·xⁿ − x at x = 1 disagrees in sign with f'(1),
/// over a ~ N(0, 1). The baseline must be one-dimensional with E Xⁿ in
/// (1/2, 1); the closed forms are a(1 − E Xⁿ) − 1 and n·a − 1.
pub fn random_polynomial_mc(
    n_degree: u32,
    baseline: &Baseline,
    mc_samples: usize,
    rng_seed: u64,
) -> Result<f64, ForgeError> {
    if n_degree < 2 {
        return Err(ForgeError::Config(
            "polynomial degree must be at least 2".into(),
        ));
    }
    if baseline.dim() != 1 {
        return Err(ForgeError::Config(
            "the sign experiment uses a one-dimensional baseline".into(),
        ));
    }
    if mc_samples == 0 {
        return Err(ForgeError::Config("mc_samples must be positive".into()));
    }
    let moment = baseline.raw_moment(0, n_degree)?;
    if !(moment > 0.5 && moment < 1.0) {
        return Err(ForgeError::MomentCondition(moment));
    }
    let mut rng = rng_from_seed(rng_seed);
    let mut disagreements = 0usize;
    for _ in 0..mc_samples {
        let a: f64 = <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
        let attribution = a * (1.0 - moment) - 1.0;
        let derivative = n_degree as f64 * a - 1.0;
        if (attribution > 0.0) != (derivative > 0.0) {
            disagreements += 1;
        }
    }
    Ok(disagreements as f64 / mc_samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::attribution::{
        integrated_gradients, integrated_gradients_exact, shap_exact, MethodSettings,
    };
    use crate::baseline::std_normal_cdf;

    fn unif(lo: f64, hi: f64) -> Baseline {
        Baseline::UniformBox {
            lo: vec![lo],
            hi: vec![hi],
        }
    }

    fn reference_behaviour(g: PiecewiseLinear1D) -> LocalBehaviour {
        LocalBehaviour::new(g, vec![0.1], 0, 0.2).unwrap()
    }

    /// Exact SHAP of an additive model under a 1-D uniform baseline, via
    /// trapezoidal integration over the piecewise-linear component. This is
    /// an independent oracle: it never touches the forge's moment equation.
    fn shap_additive_uniform_oracle(model: &Model, lo: f64, hi: f64, x: f64) -> f64 {
        let comp = match &model.kind {
            crate::model::ModelKind::Additive(a) => match &a.components[0] {
                Component1D::Pwl(p) => p.clone(),
                _ => panic!("oracle expects a piecewise-linear component"),
            },
            _ => panic!("oracle expects an additive model"),
        };
        let mut cuts = vec![lo];
        for &b in &comp.breakpoints {
            if b > lo && b < hi {
                cuts.push(b);
            }
        }
        cuts.push(hi);
        let mut integral = 0.0;
        for w in cuts.windows(2) {
            integral += 0.5 * (comp.evaluate(w[0]) + comp.evaluate(w[1])) * (w[1] - w[0]);
        }
        comp.evaluate(x) - integral / (hi - lo)
    }

    #[test]
    fn targets_zero_and_one_under_uniform() {
        let g =
            PiecewiseLinear1D::new(vec![-0.1, 0.1, 0.3], vec![0.15, 0.0, 0.2], -1.0, 1.0).unwrap();
        for phi in [0.0, 1.0] {
            let forged = forge_counterexample(
                &reference_behaviour(g.clone()),
                &unif(-1.0, 1.0),
                &[(-1.0, 1.0)],
                phi,
            )
            .unwrap();
            let got = shap_additive_uniform_oracle(&forged.model, -1.0, 1.0, 0.1);
            assert!((got - phi).abs() < 1e-9, "phi={phi} got {got}");
        }
    }

    #[test]
    fn empirical_discretization_is_exact_for_shap() {
        let g =
            PiecewiseLinear1D::new(vec![-0.1, 0.1, 0.3], vec![0.15, 0.0, 0.2], -1.0, 1.0).unwrap();
        let samples = unif(-1.0, 1.0).sample(2024, 10_000);
        let empirical = Baseline::Empirical { samples };
        for phi in [0.0, 1.0] {
            let forged =
                forge_counterexample(&reference_behaviour(g.clone()), &empirical, &[(-1.0, 1.0)], phi)
                    .unwrap();
            let attr = shap_exact(&forged.model, &empirical, &[0.1]).unwrap();
            assert!(
                (attr.score(0, 0) - phi).abs() < 1e-9,
                "phi={phi} got {}",
                attr.score(0, 0)
            );
        }
    }

    #[test]
    fn pointmass_inside_neighbourhood_violates_assumption() {
        let g = PiecewiseLinear1D::constant(0.3);
        let behaviour = reference_behaviour(g);
        let inside = Baseline::Pointmass { point: vec![0.15] };
        let err = forge_counterexample(&behaviour, &inside, &[(-1.0, 1.0)], 1.0).unwrap_err();
        assert!(matches!(err, ForgeError::AssumptionViolated(_)));
    }

    #[test]
    fn forged_model_matches_behaviour_bitwise_on_neighbourhood() {
        let g = PiecewiseLinear1D::new(vec![-0.05, 0.12, 0.26], vec![0.4, -0.9, 0.33], 2.0, -0.7)
            .unwrap();
        let behaviour = reference_behaviour(g);
        let forged =
            forge_counterexample(&behaviour, &unif(-1.0, 1.0), &[(-1.0, 1.0)], 0.42).unwrap();
        for i in 0..50 {
            let t = (-0.1_f64 + 0.4 * i as f64 / 49.0).clamp(-0.1, 0.3);
            let expected = behaviour.g().evaluate(t);
            let got = forged.model.evaluate_scalar(&[t]).unwrap();
            assert!(got == expected, "t={t}: {got} != {expected}");
        }
    }

    #[test]
    fn forge_pair_recourse_example() {
        // g⁰ increasing, g¹ decreasing, shared attribution 0.
        let g0 = PiecewiseLinear1D::linear(1.0, -0.1); // t - x_j at x_j = 0.1
        let g1 = PiecewiseLinear1D::linear(-1.0, 0.1); // x_j - t
        let b0 = reference_behaviour(g0);
        let b1 = reference_behaviour(g1);
        let baseline = unif(-1.0, 1.0);
        let (f0, f1) = forge_pair(&b0, &b1, &baseline, &[(-1.0, 1.0)], 0.0).unwrap();
        let s0 = shap_additive_uniform_oracle(&f0.model, -1.0, 1.0, 0.1);
        let s1 = shap_additive_uniform_oracle(&f1.model, -1.0, 1.0, 0.1);
        assert!((s0 - s1).abs() <= 2e-6, "{s0} vs {s1}");
        // Opposite local slopes at the example.
        let d0 = f0.model.gradient(&[0.1]).unwrap()[0][0];
        let d1 = f1.model.gradient(&[0.1]).unwrap()[0][0];
        assert_eq!(d0, 1.0);
        assert_eq!(d1, -1.0);
    }

    #[test]
    fn forge_pair_spurious_example_and_identical_behaviours() {
        let g0 = PiecewiseLinear1D::constant(0.0);
        let g1 = PiecewiseLinear1D::constant(0.25);
        let baseline = unif(-1.0, 1.0);
        let (f0, f1) = forge_pair(
            &reference_behaviour(g0.clone()),
            &reference_behaviour(g1),
            &baseline,
            &[(-1.0, 1.0)],
            0.0,
        )
        .unwrap();
        let s0 = shap_additive_uniform_oracle(&f0.model, -1.0, 1.0, 0.1);
        let s1 = shap_additive_uniform_oracle(&f1.model, -1.0, 1.0, 0.1);
        assert!((s0 - s1).abs() <= 2e-6);
        assert_eq!(f0.model.evaluate_scalar(&[0.1]).unwrap(), 0.0);
        assert_eq!(f1.model.evaluate_scalar(&[0.1]).unwrap(), 0.25);

        // Identical behaviours give identical restrictions and attributions.
        let (a, b) = forge_pair(
            &reference_behaviour(g0.clone()),
            &reference_behaviour(g0),
            &baseline,
            &[(-1.0, 1.0)],
            0.7,
        )
        .unwrap();
        for i in 0..20 {
            let t = -0.1 + 0.4 * i as f64 / 19.0;
            assert_eq!(
                a.model.evaluate_scalar(&[t]).unwrap(),
                b.model.evaluate_scalar(&[t]).unwrap()
            );
        }
    }

    #[test]
    fn mismatched_anchors_are_rejected() {
        let b0 = reference_behaviour(PiecewiseLinear1D::constant(0.0));
        let b1 = LocalBehaviour::new(PiecewiseLinear1D::constant(0.0), vec![0.2], 0, 0.2).unwrap();
        assert!(matches!(
            forge_pair(&b0, &b1, &unif(-1.0, 1.0), &[(-1.0, 1.0)], 0.0),
            Err(ForgeError::Config(_))
        ));
    }

    #[test]
    fn exactly_one_slope_is_zero_and_ig_matches() {
        let mut rng = rng_from_seed(99);
        use rand::Rng;
        for case in 0..100 {
            let x_j: f64 = rng.gen_range(-0.4..0.4);
            let delta: f64 = rng.gen_range(0.05..0.3);
            let g = PiecewiseLinear1D::new(
                vec![x_j - 0.5 * delta, x_j + 0.4 * delta],
                vec![rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            )
            .unwrap();
            let behaviour = LocalBehaviour::new(g, vec![x_j], 0, delta).unwrap();
            let phi: f64 = rng.gen_range(-2.0..2.0);
            let (baseline, domain): (Baseline, Vec<(f64, f64)>) = match case % 3 {
                0 => (unif(-1.5, 1.5), vec![(-1.5, 1.5)]),
                1 => {
                    let samples = unif(-1.5, 1.5).sample(500 + case as u64, 200);
                    (Baseline::Empirical { samples }, vec![(-1.5, 1.5)])
                }
                _ => {
                    let side = if rng.gen::<bool>() { 1.2 } else { -1.2 };
                    (Baseline::Pointmass { point: vec![side] }, vec![(-1.5, 1.5)])
                }
            };
            let forged = forge_counterexample(&behaviour, &baseline, &domain, phi).unwrap();
            let (bl, br) = (forged.beta_left(), forged.beta_right());
            assert!(
                (bl == 0.0) ^ (br == 0.0),
                "case {case}: slopes ({bl}, {br}) are not one-sided"
            );
            match &baseline {
                Baseline::UniformBox { .. } => {
                    let got = shap_additive_uniform_oracle(&forged.model, -1.5, 1.5, x_j);
                    assert!((got - phi).abs() < 1e-6, "case {case}: {got} vs {phi}");
                }
                _ => {
                    let attr = shap_exact(&forged.model, &baseline, &[x_j]).unwrap();
                    assert!(
                        (attr.score(0, 0) - phi).abs() < 1e-6,
                        "case {case}: {} vs {phi}",
                        attr.score(0, 0)
                    );
                    let exact_ig =
                        integrated_gradients_exact(&forged.model, &baseline, &[x_j]).unwrap();
                    assert!((exact_ig.score(0, 0) - phi).abs() < 1e-6);
                }
            }
            if matches!(baseline, Baseline::Pointmass { .. }) {
                // Midpoint-rule IG converges to the same value.
                let settings = MethodSettings {
                    ig_steps: 20_000,
                    ..MethodSettings::default()
                };
                let ig = integrated_gradients(&forged.model, &baseline, &[x_j], &settings).unwrap();
                assert!(
                    (ig.score(0, 0) - phi).abs() < 1e-3,
                    "case {case}: ig {}",
                    ig.score(0, 0)
                );
            }
        }
    }

    #[test]
    fn gaussian_baseline_forging_matches_sampled_shap() {
        // Gaussian marginals exercise the closed-form truncated moments. The
        // domain extends far enough that the outside mass is below the
        // configuration threshold.
        let g = PiecewiseLinear1D::new(vec![0.0], vec![0.5], 1.0, -1.0).unwrap();
        let behaviour = LocalBehaviour::new(g, vec![0.0], 0, 0.2).unwrap();
        let baseline = Baseline::GaussianIso {
            center: vec![0.0],
            sigma: 0.4,
        };
        let domain = [(-4.0, 4.0)];
        let forged = forge_counterexample(&behaviour, &baseline, &domain, 1.3).unwrap();
        // Monte Carlo check of f(x) − E f(X) = φ.
        let samples = baseline.sample(31337, 200_000);
        let mean: f64 = samples
            .iter()
            .map(|s| forged.model.evaluate_scalar(s).unwrap())
            .sum::<f64>()
            / samples.len() as f64;
        let fx = forged.model.evaluate_scalar(&[0.0]).unwrap();
        assert!((fx - mean - 1.3).abs() < 0.02, "{}", fx - mean);
    }

    #[test]
    fn forged_model_json_round_trip() {
        let g = PiecewiseLinear1D::constant(0.1);
        let forged =
            forge_counterexample(&reference_behaviour(g), &unif(-1.0, 1.0), &[(-1.0, 1.0)], 1.0)
                .unwrap();
        let json = forged.to_json();
        assert!(json.get("forge_provenance").is_some());
        let back = ForgedModel::from_json(&json).unwrap();
        assert_eq!(forged, back);
    }

    #[test]
    fn prop4_estimate_matches_gaussian_cdf_value() {
        // n = 2, Unif(−1.5, 1.5): E X² = 0.75, disagreement on a ∈ (1/2, 4).
        let estimate = random_polynomial_mc(2, &unif(-1.5, 1.5), 200_000, 7).unwrap();
        let expected = std_normal_cdf(4.0) - std_normal_cdf(0.5);
        assert!((expected - 0.3085).abs() < 1e-4);
        assert!(
            (estimate - expected).abs() < 0.01,
            "{estimate} vs {expected}"
        );
        assert!(estimate > 0.25 && estimate < 0.5);
    }

    #[test]
    fn prop4_rejects_bad_moment() {
        // E X² = 1/3 for Unif(−1, 1), outside (1/2, 1).
        let err = random_polynomial_mc(2, &unif(-1.0, 1.0), 10, 0).unwrap_err();
        assert!(matches!(err, ForgeError::MomentCondition(_)));
    }
}
