//! Randomized invariant batteries: completeness and linearity of the
//! complete-and-linear methods, forge correctness, ROC behaviour on forged
//! pairs, query-test rate exactness, and the random-polynomial sign
//! experiment. Each battery prints one line per check and reports an overall
//! pass flag; the CLI `verify` subcommand and the acceptance suite both run
//! these with their tolerances pinned here.

use rand::Rng;

use crate::attribution::{
    gradient_method, integrated_gradients, shap_exact, verify_completeness, verify_linearity,
    MethodSettings, MethodTag,
};
use crate::baseline::{std_normal_cdf, Baseline};
use crate::forge::{forge_counterexample, forge_pair, random_polynomial_mc, LocalBehaviour};
use crate::hyptest::{scenario_spec_sens, threshold_grid, TestKind, ThresholdTest};
use crate::model::{
    AdditiveModel, Component1D, MlpLayer, MlpModel, Model, PiecewiseLinear1D, Polynomial1D,
};
use crate::querytest::{adversary_bound_check, empirical_rates, theoretical_rates, QueryPlan};
use crate::seed::{derive_seed, rng_from_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Completeness,
    Linearity,
    Forge,
    Roc,
    Query,
    Prop4,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "completeness" => Ok(Suite::Completeness),
            "linearity" => Ok(Suite::Linearity),
            "forge" => Ok(Suite::Forge),
            "roc" => Ok(Suite::Roc),
            "query" => Ok(Suite::Query),
            "prop4" => Ok(Suite::Prop4),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub lines: Vec<String>,
}

impl SuiteReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            passed: true,
            lines: Vec::new(),
        }
    }

    fn check(&mut self, ok: bool, message: String) {
        self.passed &= ok;
        self.lines
            .push(format!("[{}] {message}", if ok { "PASS" } else { "FAIL" }));
    }
}

fn random_pwl(rng: &mut impl Rng) -> PiecewiseLinear1D {
    let k = rng.gen_range(1..4);
    let mut bps: Vec<f64> = (0..k).map(|_| rng.gen_range(-1.2..1.2)).collect();
    bps.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bps.dedup_by(|a, b| (*a - *b).abs() < 0.05);
    let values = bps.iter().map(|_| rng.gen_range(-1.0..1.0)).collect();
    PiecewiseLinear1D::new(
        bps,
        values,
        rng.gen_range(-2.0..2.0),
        rng.gen_range(-2.0..2.0),
    )
    .unwrap()
}

/// Cubic with a small leading coefficient so 200-step midpoint quadrature
/// stays well inside the 1e-4 completeness budget.
fn random_smooth_poly(rng: &mut impl Rng) -> Polynomial1D {
    Polynomial1D::new(vec![
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-1.0..1.0),
        rng.gen_range(-0.1..0.1),
    ])
    .unwrap()
}

fn random_atom_baseline(rng: &mut impl Rng, p: usize) -> Baseline {
    if rng.gen::<bool>() {
        Baseline::Pointmass {
            point: (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        }
    } else {
        let n = rng.gen_range(2..8);
        Baseline::Empirical {
            samples: (0..n)
                .map(|_| (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect())
                .collect(),
        }
    }
}

fn random_mlp(rng: &mut impl Rng, p: usize) -> MlpModel {
    let hidden = rng.gen_range(2..6);
    let dims = [p, hidden, 1];
    MlpModel {
        layers: dims
            .windows(2)
            .map(|w| MlpLayer {
                weights: (0..w[1])
                    .map(|_| (0..w[0]).map(|_| rng.gen_range(-1.0..1.0)).collect())
                    .collect(),
                bias: (0..w[1]).map(|_| rng.gen_range(-0.5..0.5)).collect(),
            })
            .collect(),
    }
}

/// Completeness on 200 randomized cases with p ≤ 6: exact SHAP at
/// 1e-9 on mixed additive/MLP models, integrated gradients at 1e-4 with 200
/// quadrature steps on smooth additive models.
pub fn completeness_battery(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("completeness");
    let mut rng = rng_from_seed(derive_seed(seed, 0xC0));
    let settings = MethodSettings {
        ig_steps: 200,
        ..MethodSettings::default()
    };
    let mut shap_failures = 0usize;
    let mut ig_failures = 0usize;
    for case in 0..200 {
        let p = rng.gen_range(1..=6);
        let baseline = random_atom_baseline(&mut rng, p);
        let x: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let shap_model = match case % 3 {
            0 => Model::mlp(random_mlp(&mut rng, p)),
            1 => Model::additive(
                AdditiveModel::new(
                    (0..p)
                        .map(|_| Component1D::Pwl(random_pwl(&mut rng)))
                        .collect(),
                )
                .unwrap(),
            ),
            _ => Model::additive(
                AdditiveModel::new(
                    (0..p)
                        .map(|_| {
                            if rng.gen::<bool>() {
                                Component1D::Pwl(random_pwl(&mut rng))
                            } else {
                                Component1D::Poly(random_smooth_poly(&mut rng))
                            }
                        })
                        .collect(),
                )
                .unwrap(),
            ),
        };
        let ok = verify_completeness(
            MethodTag::ShapExact,
            &shap_model,
            &baseline,
            &x,
            1e-9,
            &settings,
        )
        .unwrap_or(false);
        shap_failures += !ok as usize;

        let smooth = Model::additive(
            AdditiveModel::new(
                (0..p)
                    .map(|_| Component1D::Poly(random_smooth_poly(&mut rng)))
                    .collect(),
            )
            .unwrap(),
        );
        let ok = verify_completeness(
            MethodTag::IntegratedGradients,
            &smooth,
            &baseline,
            &x,
            1e-4,
            &settings,
        )
        .unwrap_or(false);
        ig_failures += !ok as usize;
    }
    report.check(
        shap_failures == 0,
        format!("shap_exact complete on 200 random cases at 1e-9 ({shap_failures} failures)"),
    );
    report.check(
        ig_failures == 0,
        format!("integrated_gradients complete on 200 smooth cases at 1e-4, 200 steps ({ig_failures} failures)"),
    );
    report
}

/// Linearity on 100 random additive models: SHAP at 1e-9, IG at 1e-4.
pub fn linearity_battery(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("linearity");
    let mut rng = rng_from_seed(derive_seed(seed, 0xC1));
    let settings = MethodSettings {
        ig_steps: 200,
        ..MethodSettings::default()
    };
    let mut shap_failures = 0usize;
    let mut ig_failures = 0usize;
    for _ in 0..100 {
        let p = rng.gen_range(1..=6);
        let components: Vec<Component1D> = (0..p)
            .map(|_| {
                if rng.gen::<bool>() {
                    Component1D::Pwl(random_pwl(&mut rng))
                } else {
                    Component1D::Poly(random_smooth_poly(&mut rng))
                }
            })
            .collect();
        let baseline = random_atom_baseline(&mut rng, p);
        let x: Vec<f64> = (0..p).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let ok = verify_linearity(
            MethodTag::ShapExact,
            &components,
            &baseline,
            &x,
            1e-9,
            &settings,
        )
        .unwrap_or(false);
        shap_failures += !ok as usize;
        let ok = verify_linearity(
            MethodTag::IntegratedGradients,
            &components,
            &baseline,
            &x,
            1e-4,
            &settings,
        )
        .unwrap_or(false);
        ig_failures += !ok as usize;
    }
    report.check(
        shap_failures == 0,
        format!(
            "shap_exact linear on 100 random additive models at 1e-9 ({shap_failures} failures)"
        ),
    );
    report.check(
        ig_failures == 0,
        format!("integrated_gradients linear on 100 random additive models at 1e-4 ({ig_failures} failures)"),
    );
    report
}

/// Exact SHAP of a one-active-component additive model under a 1-D uniform
/// baseline, via trapezoidal integration of the component. Independent of
/// the forge's moment equation.
fn shap_active_component_uniform(model: &Model, j: usize, lo: f64, hi: f64, x_j: f64) -> f64 {
    let comp = match &model.kind {
        crate::model::ModelKind::Additive(a) => match &a.components[j] {
            Component1D::Pwl(p) => p,
            _ => unreachable!("forged components are piecewise linear"),
        },
        _ => unreachable!("forged models are additive"),
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
    comp.evaluate(x_j) - integral / (hi - lo)
}

/// Forge correctness on 100 random configurations, local fidelity, one-sided
/// slopes, and pair indistinguishability.
pub fn forge_battery(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("forge");
    let mut rng = rng_from_seed(derive_seed(seed, 0xC2));
    let mut attribution_failures = 0usize;
    let mut fidelity_failures = 0usize;
    let mut slope_failures = 0usize;
    let mut ig_failures = 0usize;
    for case in 0..100usize {
        let x_j: f64 = rng.gen_range(-0.4..0.4);
        let delta: f64 = rng.gen_range(0.05..0.3);
        let g = random_pwl(&mut rng);
        let behaviour = LocalBehaviour::new(g, vec![x_j], 0, delta).unwrap();
        let phi: f64 = rng.gen_range(-2.0..2.0);
        let domain = [(-1.5, 1.5)];
        let uniform = case % 2 == 0;
        let baseline = if uniform {
            Baseline::UniformBox {
                lo: vec![-1.5],
                hi: vec![1.5],
            }
        } else {
            Baseline::Empirical {
                samples: Baseline::UniformBox {
                    lo: vec![-1.5],
                    hi: vec![1.5],
                }
                .sample(derive_seed(seed, 7000 + case as u64), 150),
            }
        };
        let forged = match forge_counterexample(&behaviour, &baseline, &domain, phi) {
            Ok(f) => f,
            Err(_) => {
                attribution_failures += 1;
                continue;
            }
        };
        let score = if uniform {
            shap_active_component_uniform(&forged.model, 0, -1.5, 1.5, x_j)
        } else {
            shap_exact(&forged.model, &baseline, &[x_j])
                .unwrap()
                .score(0, 0)
        };
        attribution_failures += ((score - phi).abs() > 1e-6) as usize;
        slope_failures += !((forged.beta_left() == 0.0) ^ (forged.beta_right() == 0.0)) as usize;
        let (nb_lo, nb_hi) = (x_j - delta, x_j + delta);
        for i in 0..50 {
            // Clamp so float drift cannot push a probe 1 ulp outside the
            // closed neighbourhood.
            let t = (nb_lo + (nb_hi - nb_lo) * i as f64 / 49.0).clamp(nb_lo, nb_hi);
            if forged.model.evaluate_scalar(&[t]).unwrap() != behaviour.g().evaluate(t) {
                fidelity_failures += 1;
                break;
            }
        }
        if case % 5 == 0 {
            // Quadrature IG against a pointmass baseline.
            let point = if x_j > 0.0 { -1.2 } else { 1.2 };
            let pm = Baseline::Pointmass { point: vec![point] };
            if let Ok(f) = forge_counterexample(&behaviour, &pm, &domain, phi) {
                let settings = MethodSettings {
                    ig_steps: 20_000,
                    ..MethodSettings::default()
                };
                let ig = integrated_gradients(&f.model, &pm, &[x_j], &settings).unwrap();
                ig_failures += ((ig.score(0, 0) - phi).abs() > 1e-3) as usize;
            } else {
                ig_failures += 1;
            }
        }
    }
    report.check(
        attribution_failures == 0,
        format!("forged attribution equals target within 1e-6 on 100 configs ({attribution_failures} failures)"),
    );
    report.check(
        fidelity_failures == 0,
        format!("forged model equals g bitwise at 50 neighbourhood points ({fidelity_failures} failures)"),
    );
    report.check(
        slope_failures == 0,
        format!("exactly one outer slope is zero in every forge ({slope_failures} failures)"),
    );
    report.check(
        ig_failures == 0,
        format!(
            "quadrature IG (pointmass baseline) within 1e-3 of target ({ig_failures} failures)"
        ),
    );

    // Pair indistinguishability under exact SHAP.
    let baseline = Baseline::Empirical {
        samples: Baseline::UniformBox {
            lo: vec![-1.0],
            hi: vec![1.0],
        }
        .sample(derive_seed(seed, 0xC3), 500),
    };
    let mut pair_failures = 0usize;
    for i in 0..20 {
        let x_j = -0.3 + 0.03 * i as f64;
        let slope = 0.5 + 0.1 * i as f64;
        let b0 = LocalBehaviour::new(
            PiecewiseLinear1D::linear(slope, -slope * x_j),
            vec![x_j],
            0,
            0.2,
        )
        .unwrap();
        let b1 = LocalBehaviour::new(
            PiecewiseLinear1D::linear(-slope, slope * x_j),
            vec![x_j],
            0,
            0.2,
        )
        .unwrap();
        let (f0, f1) = forge_pair(&b0, &b1, &baseline, &[(-1.0, 1.0)], 0.0).unwrap();
        let s0 = shap_exact(&f0.model, &baseline, &[x_j])
            .unwrap()
            .score(0, 0);
        let s1 = shap_exact(&f1.model, &baseline, &[x_j])
            .unwrap()
            .score(0, 0);
        pair_failures += ((s0 - s1).abs() > 2e-6) as usize;
    }
    report.check(
        pair_failures == 0,
        format!("forged pairs share exact-SHAP attribution within 2e-6 ({pair_failures} failures)"),
    );
    report
}

/// Forged-pair ROC exactness and the gradient-separation contrast.
pub fn roc_battery(seed: u64) -> SuiteReport {
    let mut report = SuiteReport::new("roc");
    let baseline = Baseline::Empirical {
        samples: Baseline::UniformBox {
            lo: vec![-1.0],
            hi: vec![1.0],
        }
        .sample(derive_seed(seed, 0xC4), 1000),
    };
    let x = vec![0.1];
    let domain = [(-1.0, 1.0)];
    let b0 = LocalBehaviour::new(PiecewiseLinear1D::linear(1.0, -0.1), x.clone(), 0, 0.2).unwrap();
    let b1 = LocalBehaviour::new(PiecewiseLinear1D::linear(-1.0, 0.1), x.clone(), 0, 0.2).unwrap();
    let (f0, f1) = forge_pair(&b0, &b1, &baseline, &domain, 0.0).unwrap();
    let s0 = shap_exact(&f0.model, &baseline, &x).unwrap().score(0, 0);
    let s1 = shap_exact(&f1.model, &baseline, &x).unwrap().score(0, 0);
    report.check(
        (s0 - s1).abs() <= 2e-6,
        format!(
            "pair SHAP scores within 2e-6 (|Δ| = {:.3e})",
            (s0 - s1).abs()
        ),
    );

    let thresholds = threshold_grid(&[s0, s1], 40, TestKind::RecourseSign);
    let tie_lo = s0.min(s1);
    let tie_hi = s0.max(s1);
    let mut outcome_mismatches = 0usize;
    let mut bound_failures = 0usize;
    let set0 = vec![f1.model.clone()];
    let set1 = vec![f0.model.clone()];
    for &alpha in &thresholds {
        if alpha >= tie_lo - 1e-9 && alpha <= tie_hi + 1e-9 {
            continue;
        }
        let test = ThresholdTest::new(TestKind::RecourseSign, alpha);
        outcome_mismatches += (test.run(s0) != test.run(s1)) as usize;
        let result = scenario_spec_sens(
            &set0,
            &set1,
            |m| Ok(shap_exact(m, &baseline, &x)?.score(0, 0)),
            &test,
        )
        .unwrap();
        bound_failures += (result.spec + result.sens > 1.0 + 1e-9) as usize;
    }
    report.check(
        outcome_mismatches == 0,
        format!("identical test outcomes across the grid outside the tie band ({outcome_mismatches} mismatches)"),
    );
    report.check(
        bound_failures == 0,
        format!("spec + sens ≤ 1 + 1e-9 under SHAP for every grid threshold ({bound_failures} failures)"),
    );

    let grad_result = scenario_spec_sens(
        &set0,
        &set1,
        |m| Ok(gradient_method(m, &x)?.score(0, 0)),
        &ThresholdTest::new(TestKind::RecourseSign, 0.0),
    )
    .unwrap();
    report.check(
        grad_result.spec == 1.0 && grad_result.sens == 1.0,
        format!(
            "gradient separates the pair (spec {}, sens {})",
            grad_result.spec, grad_result.sens
        ),
    );
    report
}

/// The 20-plan battery of criterion 5 plus the headline preset.
pub fn query_battery(seed: u64, battery_trials: usize, preset_trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("query");
    // spec = 1 − τ exactly on a 21-point τ grid.
    let mut spec_failures = 0usize;
    for i in 0..=20 {
        let tau = i as f64 / 20.0;
        let plan = QueryPlan {
            delta: 1.0,
            p: 1,
            n: 3,
            tau,
            epsilon: 0.25,
            lipschitz: 1.0,
            rng_seed: 0,
        };
        let (spec, _) = theoretical_rates(&plan).unwrap();
        spec_failures += (spec != 1.0 - tau) as usize;
    }
    report.check(
        spec_failures == 0,
        "theoretical spec equals 1 − τ on the 21-point grid".into(),
    );

    // 20 plans; empirical rates within four binomial standard errors.
    let mut plans = Vec::new();
    for i in 0..20usize {
        let p = 1 + i % 3;
        let tau = [0.0, 0.1, 0.25, 0.5][i % 4];
        let epsilon = [0.25, 0.2, 0.35][i % 3];
        let n = 1 + (i * 7) % 12;
        plans.push(QueryPlan {
            delta: 1.0,
            p,
            n,
            tau,
            epsilon,
            lipschitz: 1.0,
            rng_seed: derive_seed(seed, 0xD0 + i as u64),
        });
    }
    let mut rate_failures = 0usize;
    for plan in &plans {
        let (spec, sens) = theoretical_rates(plan).unwrap();
        let (spec_hat, sens_hat) = empirical_rates(plan, battery_trials).unwrap();
        let spec_se = (spec * (1.0 - spec) / battery_trials as f64).sqrt();
        let sens_se = (sens * (1.0 - sens) / battery_trials as f64).sqrt();
        if (spec_hat - spec).abs() > 4.0 * spec_se || (sens_hat - sens).abs() > 4.0 * sens_se {
            rate_failures += 1;
        }
    }
    report.check(
        rate_failures == 0,
        format!("empirical rates within 4 SE of the closed forms on 20 plans × {battery_trials} trials ({rate_failures} failures)"),
    );

    // Headline preset: p = 10, L = 1, δ = 0.05, ε = 0.01, n = 21,960.
    let preset = QueryPlan {
        delta: 0.05,
        p: 10,
        n: 21_960,
        tau: 0.0,
        epsilon: 0.01,
        lipschitz: 1.0,
        rng_seed: derive_seed(seed, 0xD5),
    };
    let (_, sens) = theoretical_rates(&preset).unwrap();
    report.check(
        sens >= 0.9,
        format!("preset theoretical sensitivity {sens:.5} ≥ 0.9"),
    );
    let (spec_hat, sens_hat) = empirical_rates(&preset, preset_trials).unwrap();
    report.check(
        spec_hat == 1.0 && sens_hat >= 0.88,
        format!("preset empirical rates over {preset_trials} trials: spec {spec_hat}, sens {sens_hat} (need 1 and ≥ 0.88)"),
    );

    // Monotonicity of sensitivity over a parameter grid.
    let base = QueryPlan {
        delta: 1.0,
        p: 2,
        n: 10,
        tau: 0.1,
        epsilon: 0.1,
        lipschitz: 1.0,
        rng_seed: 0,
    };
    let sens_of = |plan: &QueryPlan| theoretical_rates(plan).unwrap().1;
    let mono = sens_of(&QueryPlan { n: 5, ..base }) <= sens_of(&QueryPlan { n: 10, ..base })
        && sens_of(&QueryPlan {
            epsilon: 0.05,
            ..base
        }) <= sens_of(&QueryPlan {
            epsilon: 0.1,
            ..base
        })
        && sens_of(&QueryPlan {
            lipschitz: 1.0,
            ..base
        }) >= sens_of(&QueryPlan {
            lipschitz: 2.0,
            ..base
        })
        && sens_of(&QueryPlan { delta: 1.0, ..base }) >= sens_of(&QueryPlan { delta: 2.0, ..base });
    report.check(
        mono,
        "sensitivity monotone in n and ε, antitone in L and δ".into(),
    );
    report
}

/// The adversarial union-bound grid of criterion 6: r ∈ {2..6}, p ∈ {1,2,3}.
pub fn adversary_battery(seed: u64, trials: usize) -> SuiteReport {
    let mut report = SuiteReport::new("adversary");
    let grid: [(usize, usize); 10] = [
        (1, 2),
        (1, 3),
        (1, 4),
        (1, 5),
        (1, 6),
        (2, 2),
        (2, 4),
        (2, 6),
        (3, 3),
        (3, 5),
    ];
    let mut failures = 0usize;
    for (i, &(p, r)) in grid.iter().enumerate() {
        let plan = QueryPlan {
            delta: 1.0,
            p,
            n: 3,
            tau: 0.0,
            epsilon: 1.0 / (2.0 * r as f64),
            lipschitz: 1.0,
            rng_seed: derive_seed(seed, 0xD8 + i as u64),
        };
        debug_assert_eq!(plan.cells_per_axis(), r);
        let check = adversary_bound_check(&plan, trials).unwrap();
        failures += !check.passed as usize;
    }
    report.check(
        failures == 0,
        format!("detection ≤ n·r^(−p) + 4 SE on the 10-plan grid × {trials} trials ({failures} failures)"),
    );
    report
}

/// The random-polynomial sign experiment at the reference setting.
pub fn prop4_battery(seed: u64, mc_samples: usize) -> SuiteReport {
    let mut report = SuiteReport::new("prop4");
    let baseline = Baseline::UniformBox {
        lo: vec![-1.5],
        hi: vec![1.5],
    };
    let estimate = random_polynomial_mc(2, &baseline, mc_samples, derive_seed(seed, 0xE0)).unwrap();
    let reference = std_normal_cdf(4.0) - std_normal_cdf(0.5);
    let se = (reference * (1.0 - reference) / mc_samples as f64).sqrt();
    report.check(
        estimate > 0.25 && estimate < 0.5,
        format!("estimate {estimate:.4} lies in (0.25, 0.5)"),
    );
    report.check(
        (estimate - reference).abs() <= 0.005,
        format!("estimate within ±0.005 of the Gaussian-CDF value {reference:.4}"),
    );
    report.check(
        estimate > 0.2858 - 3.0 * se,
        format!(
            "estimate exceeds the 0.2858 lower bound minus 3 SE ({:.4})",
            0.2858 - 3.0 * se
        ),
    );
    report
}

/// Runs the requested suite(s) with batch sizes suitable for the CLI.
pub fn run_suite(suite: Suite, seed: u64) -> Vec<SuiteReport> {
    match suite {
        Suite::Completeness => vec![completeness_battery(seed)],
        Suite::Linearity => vec![linearity_battery(seed)],
        Suite::Forge => vec![forge_battery(seed)],
        Suite::Roc => vec![roc_battery(seed)],
        Suite::Query => vec![
            query_battery(seed, 100_000, 1000),
            adversary_battery(seed, 20_000),
        ],
        Suite::Prop4 => vec![prop4_battery(seed, 1_000_000)],
        Suite::All => {
            let mut reports = Vec::new();
            for s in [
                Suite::Completeness,
                Suite::Linearity,
                Suite::Forge,
                Suite::Roc,
                Suite::Query,
                Suite::Prop4,
            ] {
                reports.extend(run_suite(s, seed));
            }
            reports
        }
    }
}
