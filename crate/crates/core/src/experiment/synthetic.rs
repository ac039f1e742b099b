//! Bundled synthetic dataset generators: an additive ground-truth regression
//! (first component is 2·x₁, so its recourse direction is known), a spurious
//! construction with a planted irrelevant feature, and a linearly separable
//! two-class problem.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{Dataset, Targets};
use crate::seed::{derive_seed, rng_from_seed};

fn normal(rng: &mut impl Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// Regression targets from an additive ground truth plus Gaussian noise:
/// y = 2·x₁ + Σ_{j≥2} (a_j x_j + b_j x_j²) + 0.1·ε.
pub fn additive_synthetic(seed: u64, n: usize, p: usize) -> Dataset {
    assert!(p >= 1 && n >= 4);
    let mut rng = rng_from_seed(derive_seed(seed, 0xADD));
    let coeffs: Vec<(f64, f64)> = (0..p)
        .map(|j| {
            if j == 0 {
                (2.0, 0.0)
            } else {
                (rng.gen_range(-1.0..1.0), rng.gen_range(-0.7..0.7))
            }
        })
        .collect();
    let mut rows = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..p).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y: f64 = x
            .iter()
            .zip(&coeffs)
            .map(|(&t, &(a, b))| a * t + b * t * t)
            .sum::<f64>()
            + 0.1 * normal(&mut rng);
        rows.push(x);
        targets.push(vec![y]);
    }
    Dataset::from_raw(
        "synthetic_additive",
        rows,
        Targets::Regression(targets),
        (0..p).map(|j| format!("x{j}")).collect(),
        vec![false; p],
    )
    .expect("generator produces a valid dataset")
}

/// Four features, the last one planted irrelevant: y depends only on the
/// first three, the fourth is independent noise.
pub fn spurious_synthetic(seed: u64, n: usize) -> Dataset {
    let mut rng = rng_from_seed(derive_seed(seed, 0x59C));
    let mut rows = Vec::with_capacity(n);
    let mut targets = Vec::with_capacity(n);
    for _ in 0..n {
        let x: Vec<f64> = (0..4).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let y = 1.5 * x[0] - 0.8 * x[1] + 0.6 * x[2] * x[2] + 0.05 * normal(&mut rng);
        rows.push(x);
        targets.push(vec![y]);
    }
    Dataset::from_raw(
        "synthetic_spurious",
        rows,
        Targets::Regression(targets),
        vec![
            "x0".into(),
            "x1".into(),
            "x2".into(),
            "planted_noise".into(),
        ],
        vec![false; 4],
    )
    .expect("generator produces a valid dataset")
}

/// Linearly separable two-class data with a margin of 0.3 around a random
/// separating hyperplane.
pub fn two_class_synthetic(seed: u64, n: usize, p: usize) -> Dataset {
    assert!(p >= 1 && n >= 4);
    let mut rng = rng_from_seed(derive_seed(seed, 0x2C1));
    let direction: Vec<f64> = {
        let raw: Vec<f64> = (0..p).map(|_| normal(&mut rng)).collect();
        let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-9);
        raw.into_iter().map(|v| v / norm).collect()
    };
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    while rows.len() < n {
        let x: Vec<f64> = (0..p).map(|_| normal(&mut rng)).collect();
        let margin: f64 = x.iter().zip(&direction).map(|(a, b)| a * b).sum();
        if margin.abs() < 0.3 {
            continue;
        }
        labels.push((margin > 0.0) as usize);
        rows.push(x);
    }
    Dataset::from_raw(
        "synthetic_two_class",
        rows,
        Targets::Classes {
            labels,
            n_classes: 2,
            class_names: vec!["neg".into(), "pos".into()],
        },
        (0..p).map(|j| format!("x{j}")).collect(),
        vec![false; p],
    )
    .expect("generator produces a valid dataset")
}
