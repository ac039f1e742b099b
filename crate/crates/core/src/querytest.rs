//! Brute-force query testing: the uniform query strategy on (0, δ]^p, the
//! reject-on-any-positive test with a τ randomization floor, the exact rate
//! formulas spec = 1 − τ and sens = 1 − (1−τ)(1 − (2ε/(Lδ))^p)^n, and the
//! adversarial single-cell bump behind the matching upper bound, whose
//! detection probability is at most n·r^{−p} for r = ⌊Lδ/(2ε)⌋.
//!
//! Queries are iid uniform (non-adaptive); the framework's gradient channel
//! is carried in the plan but unused by the test. Trials are independent
//! given per-trial derived seeds, so empirical rates are deterministic for a
//! fixed seed and independent of the parallelism degree.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Error)]
pub enum QueryTestError {
    #[error("invalid query plan: {0}")]
    InvalidPlan(String),
    #[error("grid resolution r = {0} is too coarse; need r ≥ 2")]
    GridTooCoarse(usize),
}

/// Query strategy, test, and budget for one spurious-feature experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QueryPlan {
    /// Side length of the query box (0, δ]^p.
    pub delta: f64,
    /// Input dimension.
    pub p: usize,
    /// Evaluation budget.
    pub n: usize,
    /// Randomization floor of the test in [0, 1].
    pub tau: f64,
    /// Sensitivity scale: the alternate class attains at least ε.
    pub epsilon: f64,
    /// Lipschitz bound on the model class.
    pub lipschitz: f64,
    pub rng_seed: u64,
}

impl QueryPlan {
    pub fn validate(&self) -> Result<(), QueryTestError> {
        if !(self.delta > 0.0) || !(self.epsilon > 0.0) || !(self.lipschitz > 0.0) {
            return Err(QueryTestError::InvalidPlan(
                "delta, epsilon, lipschitz must be positive".into(),
            ));
        }
        if self.p == 0 {
            return Err(QueryTestError::InvalidPlan(
                "dimension p must be at least 1".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(QueryTestError::InvalidPlan("tau must lie in [0, 1]".into()));
        }
        // Otherwise the positive region covers the box and the rates trivialize.
        if 2.0 * self.epsilon > self.lipschitz * self.delta {
            return Err(QueryTestError::InvalidPlan(format!(
                "need 2ε ≤ Lδ, got 2·{} > {}·{}",
                self.epsilon, self.lipschitz, self.delta
            )));
        }
        Ok(())
    }

    /// Per-query probability of hitting the hardest bump's positive region.
    pub fn hit_probability(&self) -> f64 {
        (2.0 * self.epsilon / (self.lipschitz * self.delta)).powi(self.p as i32)
    }

    /// Cells per axis of the adversarial grid: r = ⌊Lδ/(2ε)⌋.
    pub fn cells_per_axis(&self) -> usize {
        (self.lipschitz * self.delta / (2.0 * self.epsilon)).floor() as usize
    }

    /// Side length of one grid cell, 2ε/L.
    pub fn cell_side(&self) -> f64 {
        2.0 * self.epsilon / self.lipschitz
    }

    fn draw_query(&self, rng: &mut impl Rng) -> Vec<f64> {
        // δ − U[0, δ) lies in (0, δ].
        (0..self.p)
            .map(|_| self.delta - rng.gen_range(0.0..self.delta))
            .collect()
    }
}

/// The square-based pyramid bump supported on one grid cell: value
/// ε·max(0, 1 − (L/ε)·‖x − c‖_∞), zero outside the cell, maximum ε at the
/// cell center. Its sup-norm Lipschitz constant is L (the proof quotes the
/// looser bound 2L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpModel {
    pub cell_index: usize,
    pub cells_per_axis: usize,
    pub p: usize,
    pub epsilon: f64,
    pub lipschitz: f64,
}

impl BumpModel {
    pub fn new(plan: &QueryPlan, cell_index: usize) -> Result<Self, QueryTestError> {
        plan.validate()?;
        let r = plan.cells_per_axis();
        let total = r.checked_pow(plan.p as u32).ok_or_else(|| {
            QueryTestError::InvalidPlan(format!("cell grid {r}^{} overflows", plan.p))
        })?;
        if cell_index >= total {
            return Err(QueryTestError::InvalidPlan(format!(
                "cell index {cell_index} out of range for {total} cells"
            )));
        }
        Ok(Self {
            cell_index,
            cells_per_axis: r,
            p: plan.p,
            epsilon: plan.epsilon,
            lipschitz: plan.lipschitz,
        })
    }

    fn digit(&self, axis: usize) -> usize {
        let mut idx = self.cell_index;
        for _ in 0..axis {
            idx /= self.cells_per_axis;
        }
        idx % self.cells_per_axis
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let side = 2.0 * self.epsilon / self.lipschitz;
        let mut dist = 0.0_f64;
        for axis in 0..self.p {
            let center = (self.digit(axis) as f64 + 0.5) * side;
            dist = dist.max((x[axis] - center).abs());
        }
        self.epsilon * (1.0 - self.lipschitz / self.epsilon * dist).max(0.0)
    }

    /// Whether `x` lies in the bump's (left-open, right-closed) grid cell.
    pub fn cell_contains(&self, x: &[f64]) -> bool {
        let side = 2.0 * self.epsilon / self.lipschitz;
        (0..self.p).all(|axis| {
            let lo = self.digit(axis) as f64 * side;
            x[axis] > lo && x[axis] <= lo + side
        })
    }
}

/// One observed query. The framework exposes a gradient channel next to the
/// value channel; the reject-on-positive test reads only the value.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryRecord {
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient: Option<Vec<f64>>,
}

fn run_once(plan: &QueryPlan, model: &dyn Fn(&[f64]) -> f64, seed: u64) -> bool {
    let mut rng = rng_from_seed(seed);
    let mut positive = false;
    for _ in 0..plan.n {
        let point = plan.draw_query(&mut rng);
        let value = model(&point);
        let record = QueryRecord {
            point,
            value,
            gradient: None,
        };
        if record.value > 0.0 {
            positive = true;
        }
    }
    if positive {
        true
    } else {
        rng.gen::<f64>() < plan.tau
    }
}

/// One run of the query test: draw n iid uniform queries on (0, δ]^p,
/// evaluate the model, and reject with probability τ + (1−τ)·1{any value
/// observed is positive}. Deterministic given the plan seed.
pub fn run_query_test(
    plan: &QueryPlan,
    model: &dyn Fn(&[f64]) -> f64,
) -> Result<bool, QueryTestError> {
    plan.validate()?;
    Ok(run_once(plan, model, plan.rng_seed))
}

/// The Theorem-F.1 closed forms (spec, sens).
pub fn theoretical_rates(plan: &QueryPlan) -> Result<(f64, f64), QueryTestError> {
    plan.validate()?;
    let spec = 1.0 - plan.tau;
    let sens = 1.0 - (1.0 - plan.tau) * (1.0 - plan.hit_probability()).powi(plan.n as i32);
    Ok((spec, sens))
}

const CH_SPEC: u64 = 0xA1;
const CH_SENS: u64 = 0xA2;
const CH_ADVERSARY: u64 = 0xA3;

/// Empirical rates over seeded trials: specificity against the zero model,
/// sensitivity against the hardest alternate member — the pyramid bump whose
/// positive region has side exactly 2ε/L, placed fully inside the box.
pub fn empirical_rates(plan: &QueryPlan, trials: usize) -> Result<(f64, f64), QueryTestError> {
    plan.validate()?;
    if trials == 0 {
        return Err(QueryTestError::InvalidPlan(
            "trials must be positive".into(),
        ));
    }
    let bump = BumpModel::new(plan, 0)?;
    let spec_master = derive_seed(plan.rng_seed, CH_SPEC);
    let sens_master = derive_seed(plan.rng_seed, CH_SENS);
    let zero_rejections: usize = (0..trials)
        .into_par_iter()
        .filter(|&t| run_once(plan, &|_| 0.0, derive_seed(spec_master, t as u64)))
        .count();
    let bump_rejections: usize = (0..trials)
        .into_par_iter()
        .filter(|&t| run_once(plan, &|x| bump.value(x), derive_seed(sens_master, t as u64)))
        .count();
    let spec_hat = 1.0 - zero_rejections as f64 / trials as f64;
    let sens_hat = bump_rejections as f64 / trials as f64;
    Ok((spec_hat, sens_hat))
}

/// Outcome of the adversarial union-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryCheck {
    pub detection_rate: f64,
    pub bound: f64,
    pub margin: f64,
    pub passed: bool,
}

/// Places the bump in the least-likely grid cell (all cells are equally
/// likely under uniform queries) and verifies that the empirical probability
/// of any query landing in that cell is at most n·r^{−p} plus four binomial
/// standard errors — the mechanism of the query-complexity lower bound.
pub fn adversary_bound_check(
    plan: &QueryPlan,
    trials: usize,
) -> Result<AdversaryCheck, QueryTestError> {
    plan.validate()?;
    if trials == 0 {
        return Err(QueryTestError::InvalidPlan(
            "trials must be positive".into(),
        ));
    }
    let r = plan.cells_per_axis();
    if r < 2 {
        return Err(QueryTestError::GridTooCoarse(r));
    }
    let total_cells = r
        .checked_pow(plan.p as u32)
        .ok_or_else(|| QueryTestError::InvalidPlan("cell grid overflows".into()))?;
    let bump = BumpModel::new(plan, total_cells - 1)?;
    let master = derive_seed(plan.rng_seed, CH_ADVERSARY);
    let detections: usize = (0..trials)
        .into_par_iter()
        .filter(|&t| {
            let mut rng = rng_from_seed(derive_seed(master, t as u64));
            (0..plan.n).any(|_| bump.cell_contains(&plan.draw_query(&mut rng)))
        })
        .count();
    let detection_rate = detections as f64 / trials as f64;
    let bound = (plan.n as f64 / total_cells as f64).min(1.0);
    let margin = 4.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
    Ok(AdversaryCheck {
        detection_rate,
        bound,
        margin,
        passed: detection_rate <= bound + margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plan(
        delta: f64,
        p: usize,
        n: usize,
        tau: f64,
        epsilon: f64,
        lipschitz: f64,
        seed: u64,
    ) -> QueryPlan {
        QueryPlan {
            delta,
            p,
            n,
            tau,
            epsilon,
            lipschitz,
            rng_seed: seed,
        }
    }

    #[test]
    fn zero_model_never_rejects_without_randomization() {
        let p = plan(1.0, 1, 5, 0.0, 0.25, 1.0, 1);
        for seed in 0..100u64 {
            let q = QueryPlan {
                rng_seed: seed,
                ..p
            };
            assert!(!run_query_test(&q, &|_| 0.0).unwrap());
        }
    }

    #[test]
    fn positive_model_always_rejects() {
        for tau in [0.0, 0.4, 1.0] {
            let p = plan(1.0, 2, 3, tau, 0.25, 1.0, 9);
            assert!(run_query_test(&p, &|_| 1.0).unwrap());
        }
    }

    #[test]
    fn zero_model_rejection_rate_is_tau() {
        let p = plan(1.0, 1, 2, 0.3, 0.25, 1.0, 5);
        let trials = 100_000;
        let (spec_hat, _) = empirical_rates(&p, trials).unwrap();
        assert!(
            (1.0 - spec_hat - 0.3).abs() < 0.005,
            "rate {}",
            1.0 - spec_hat
        );
    }

    #[test]
    fn theoretical_rate_examples() {
        let (spec, sens) = theoretical_rates(&plan(1.0, 1, 1, 0.0, 0.25, 1.0, 0)).unwrap();
        assert_eq!(spec, 1.0);
        assert_eq!(sens, 0.5);

        // The headline preset: p = 10, L = 1, δ = 0.05, ε = 0.01, n = 21960.
        let (spec, sens) = theoretical_rates(&plan(0.05, 10, 21_960, 0.0, 0.01, 1.0, 0)).unwrap();
        assert_eq!(spec, 1.0);
        assert!(sens >= 0.9, "sens {sens}");

        // Sensitivity grows monotonically to 1 in the budget.
        let mut last = 0.0;
        for n in [1usize, 10, 100, 1000, 10_000] {
            let (_, s) = theoretical_rates(&plan(1.0, 2, n, 0.0, 0.1, 1.0, 0)).unwrap();
            assert!(s >= last, "sens decreased: {s} < {last}");
            last = s;
        }
        assert!((last - 1.0).abs() < 1e-9);
    }

    #[test]
    fn empirical_sens_matches_formula_on_unit_plan() {
        let p = plan(1.0, 1, 1, 0.0, 0.25, 1.0, 17);
        let trials = 100_000;
        let (_, sens_hat) = empirical_rates(&p, trials).unwrap();
        assert!((sens_hat - 0.5).abs() < 0.006, "sens_hat {sens_hat}");
    }

    #[test]
    fn tau_one_always_rejects() {
        let p = plan(1.0, 2, 3, 1.0, 0.25, 1.0, 4);
        let (spec_hat, sens_hat) = empirical_rates(&p, 2_000).unwrap();
        assert_eq!(spec_hat, 0.0);
        assert_eq!(sens_hat, 1.0);
    }

    #[test]
    fn invalid_plans_are_rejected() {
        assert!(plan(1.0, 1, 1, 0.0, 0.6, 1.0, 0).validate().is_err()); // 2ε > Lδ
        assert!(plan(1.0, 0, 1, 0.0, 0.2, 1.0, 0).validate().is_err());
        assert!(plan(1.0, 1, 1, 1.5, 0.2, 1.0, 0).validate().is_err());
    }

    #[test]
    fn bump_geometry() {
        let p = plan(1.0, 2, 1, 0.0, 0.1, 1.0, 0);
        assert_eq!(p.cells_per_axis(), 5);
        let bump = BumpModel::new(&p, 24).unwrap();
        let side = p.cell_side();
        let center = [4.5 * side, 4.5 * side];
        assert_eq!(bump.value(&center), 0.1);
        // Zero outside the cell, Lipschitz slope inside.
        assert_eq!(bump.value(&[0.1, 0.1]), 0.0);
        let off = [center[0] + 0.05, center[1]];
        assert!((bump.value(&off) - (0.1 - 0.05)).abs() < 1e-12);
    }

    #[test]
    fn adversary_union_bound_example() {
        // p = 2, r = 5, n = 3: detection ≤ 3/25 + margin.
        let p = plan(1.0, 2, 3, 0.0, 0.1, 1.0, 23);
        let check = adversary_bound_check(&p, 100_000).unwrap();
        assert!(
            check.passed,
            "rate {} bound {}",
            check.detection_rate, check.bound
        );
        assert!((check.bound - 3.0 / 25.0).abs() < 1e-12);
    }

    /// The union bound holds for a bump placed in any single cell, with the
    /// exact per-query cell probability (2ε/(Lδ))^p.
    #[test]
    fn union_bound_holds_for_arbitrary_cells() {
        let p = plan(1.0, 2, 3, 0.0, 0.1, 1.0, 77);
        let trials = 30_000;
        let bound = p.n as f64 * p.hit_probability();
        let margin = 4.0 * (bound * (1.0 - bound) / trials as f64).sqrt();
        for cell in [0usize, 12, 24] {
            let bump = BumpModel::new(&p, cell).unwrap();
            let master = crate::seed::derive_seed(p.rng_seed, cell as u64);
            let detections = (0..trials)
                .filter(|&t| {
                    let mut rng = rng_from_seed(crate::seed::derive_seed(master, t as u64));
                    (0..p.n).any(|_| bump.cell_contains(&p.draw_query(&mut rng)))
                })
                .count();
            let rate = detections as f64 / trials as f64;
            assert!(
                rate <= bound + margin,
                "cell {cell}: rate {rate} > {bound} + {margin}"
            );
        }
    }

    #[test]
    fn adversary_zero_budget_detects_nothing() {
        let p = plan(1.0, 2, 0, 0.0, 0.1, 1.0, 23);
        let check = adversary_bound_check(&p, 1_000).unwrap();
        assert_eq!(check.detection_rate, 0.0);
    }

    #[test]
    fn adversary_needs_at_least_two_cells() {
        // r = floor(1/(2·0.5)) = 1.
        let p = plan(1.0, 2, 3, 0.0, 0.5, 1.0, 0);
        assert!(matches!(
            adversary_bound_check(&p, 10),
            Err(QueryTestError::GridTooCoarse(1))
        ));
    }

    #[test]
    fn spec_is_one_minus_tau_on_a_grid() {
        for i in 0..=20 {
            let tau = i as f64 / 20.0;
            let (spec, _) = theoretical_rates(&plan(1.0, 1, 3, tau, 0.25, 1.0, 0)).unwrap();
            assert_eq!(spec, 1.0 - tau);
        }
    }

    #[test]
    fn sens_monotonicity_over_parameter_grid() {
        // Non-decreasing in n and ε, non-increasing in L and δ.
        let base = plan(1.0, 2, 10, 0.1, 0.1, 1.0, 0);
        let sens = |p: &QueryPlan| theoretical_rates(p).unwrap().1;
        for (a, b) in [(5usize, 10usize), (10, 50)] {
            assert!(sens(&QueryPlan { n: a, ..base }) <= sens(&QueryPlan { n: b, ..base }));
        }
        for (a, b) in [(0.05, 0.1), (0.1, 0.2)] {
            assert!(
                sens(&QueryPlan { epsilon: a, ..base }) <= sens(&QueryPlan { epsilon: b, ..base })
            );
        }
        for (a, b) in [(1.0, 2.0), (2.0, 4.0)] {
            assert!(
                sens(&QueryPlan {
                    lipschitz: a,
                    ..base
                }) >= sens(&QueryPlan {
                    lipschitz: b,
                    ..base
                })
            );
            assert!(sens(&QueryPlan { delta: a, ..base }) >= sens(&QueryPlan { delta: b, ..base }));
        }
    }

    #[test]
    fn empirical_rates_are_deterministic() {
        let p = plan(1.0, 2, 4, 0.2, 0.2, 1.0, 31);
        let a = empirical_rates(&p, 5_000).unwrap();
        let b = empirical_rates(&p, 5_000).unwrap();
        assert_eq!(a, b);
    }
}
