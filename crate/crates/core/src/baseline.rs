//! Baseline distributions over examples: the distribution μ consumed by the
//! attribution methods and the building blocks the forge needs — exact
//! interval masses, exact truncated first moments, and raw moments.
//!
//! Sampling takes an explicit seed and is reproducible; every other operation
//! is a pure closed form. The Gaussian variant evaluates its CDF through
//! `libm::erf` (the Sun/MUSL rational approximation, absolute error well
//! below 1e-12), so Gaussian masses are reproducible across platforms only to
//! that tolerance, not bit-for-bit.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed::rng_from_seed;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("invalid baseline: {0}")]
    Invalid(String),
    #[error("feature index {index} out of range for dimension {dim}")]
    FeatureOutOfRange { index: usize, dim: usize },
    #[error("baseline has marginal mass {outside:.3e} outside the declared domain for feature {feature}")]
    MassOutsideDomain { feature: usize, outside: f64 },
}

/// A 1-D interval with explicit open/closed endpoint flags. Endpoints may be
/// infinite, in which case the corresponding flag is irrelevant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl Interval {
    pub fn open(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: true,
            hi_open: true,
        }
    }

    pub fn closed(lo: f64, hi: f64) -> Self {
        Self {
            lo,
            hi,
            lo_open: false,
            hi_open: false,
        }
    }

    pub fn all() -> Self {
        Self::open(f64::NEG_INFINITY, f64::INFINITY)
    }

    pub fn is_empty(&self) -> bool {
        self.lo > self.hi || (self.lo == self.hi && (self.lo_open || self.hi_open))
    }

    pub fn contains(&self, t: f64) -> bool {
        let above = if self.lo_open {
            t > self.lo
        } else {
            t >= self.lo
        };
        let below = if self.hi_open {
            t < self.hi
        } else {
            t <= self.hi
        };
        above && below
    }

    /// Length of the overlap with `[lo, hi]`; endpoint flags carry no mass
    /// against a continuous measure.
    fn overlap_length(&self, lo: f64, hi: f64) -> (f64, f64) {
        let a = self.lo.max(lo);
        let b = self.hi.min(hi);
        if a >= b {
            (0.0, 0.0)
        } else {
            (a, b)
        }
    }
}

/// Standard normal CDF via `libm::erf`.
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

fn std_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Witness returned by the Assumption-1 check: the interval `(lo, hi)` used
/// and whether positive baseline mass exists outside the δ-neighbourhood.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Assumption1Check {
    pub holds: bool,
    pub witness: (f64, f64),
    pub outer_mass: f64,
}

/// Probability distribution over examples with exact marginal moments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum Baseline {
    Pointmass { point: Vec<f64> },
    Empirical { samples: Vec<Vec<f64>> },
    UniformBox { lo: Vec<f64>, hi: Vec<f64> },
    GaussianIso { center: Vec<f64>, sigma: f64 },
}

impl Baseline {
    pub fn validate(&self) -> Result<(), BaselineError> {
        match self {
            Baseline::Pointmass { point } => {
                if point.is_empty() {
                    return Err(BaselineError::Invalid(
                        "pointmass needs a nonempty point".into(),
                    ));
                }
            }
            Baseline::Empirical { samples } => {
                if samples.is_empty() {
                    return Err(BaselineError::Invalid(
                        "empirical baseline needs samples".into(),
                    ));
                }
                let dim = samples[0].len();
                if dim == 0 || samples.iter().any(|s| s.len() != dim) {
                    return Err(BaselineError::Invalid(
                        "empirical samples must share a nonzero dimension".into(),
                    ));
                }
            }
            Baseline::UniformBox { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return Err(BaselineError::Invalid(
                        "uniform box needs matching lo/hi".into(),
                    ));
                }
                if lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
                    return Err(BaselineError::Invalid(
                        "uniform box needs lo < hi componentwise".into(),
                    ));
                }
            }
            Baseline::GaussianIso { center, sigma } => {
                if center.is_empty() {
                    return Err(BaselineError::Invalid(
                        "gaussian baseline needs a center".into(),
                    ));
                }
                if !(*sigma > 0.0) {
                    return Err(BaselineError::Invalid(
                        "gaussian sigma must be positive".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match self {
            Baseline::Pointmass { point } => point.len(),
            Baseline::Empirical { samples } => samples[0].len(),
            Baseline::UniformBox { lo, .. } => lo.len(),
            Baseline::GaussianIso { center, .. } => center.len(),
        }
    }

    fn check_feature(&self, j: usize) -> Result<(), BaselineError> {
        if j >= self.dim() {
            return Err(BaselineError::FeatureOutOfRange {
                index: j,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// When the outer expectation of an attribution method can be computed as
    /// an exact finite average, returns the weighted atoms.
    pub fn atoms(&self) -> Option<Vec<&[f64]>> {
        match self {
            Baseline::Pointmass { point } => Some(vec![point.as_slice()]),
            Baseline::Empirical { samples } => Some(samples.iter().map(|s| s.as_slice()).collect()),
            _ => None,
        }
    }

    /// Draws `count` examples; deterministic for a given seed.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Vec<f64>> {
        let mut rng = rng_from_seed(seed);
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(match self {
                Baseline::Pointmass { point } => point.clone(),
                Baseline::Empirical { samples } => samples[rng.gen_range(0..samples.len())].clone(),
                Baseline::UniformBox { lo, hi } => lo
                    .iter()
                    .zip(hi)
                    .map(|(&a, &b)| rng.gen_range(a..b))
                    .collect(),
                Baseline::GaussianIso { center, sigma } => center
                    .iter()
                    .map(|&c| {
                        c + sigma
                            * <StandardNormal as Distribution<f64>>::sample(
                                &StandardNormal,
                                &mut rng,
                            )
                    })
                    .collect(),
            });
        }
        out
    }

    /// Exact marginal mass `μ_j(interval)`.
    pub fn interval_mass(&self, j: usize, interval: &Interval) -> Result<f64, BaselineError> {
        self.check_feature(j)?;
        if interval.is_empty() {
            return Ok(0.0);
        }
        Ok(match self {
            Baseline::Pointmass { point } => {
                if interval.contains(point[j]) {
                    1.0
                } else {
                    0.0
                }
            }
            Baseline::Empirical { samples } => {
                let hits = samples.iter().filter(|s| interval.contains(s[j])).count();
                hits as f64 / samples.len() as f64
            }
            Baseline::UniformBox { lo, hi } => {
                let (a, b) = interval.overlap_length(lo[j], hi[j]);
                (b - a) / (hi[j] - lo[j])
            }
            Baseline::GaussianIso { center, sigma } => {
                let alpha = (interval.lo - center[j]) / sigma;
                let beta = (interval.hi - center[j]) / sigma;
                (std_normal_cdf(beta) - std_normal_cdf(alpha)).clamp(0.0, 1.0)
            }
        })
    }

    /// Exact truncated first moment `E[X_j · 1{X_j ∈ interval}]`.
    pub fn truncated_first_moment(
        &self,
        j: usize,
        interval: &Interval,
    ) -> Result<f64, BaselineError> {
        self.check_feature(j)?;
        if interval.is_empty() {
            return Ok(0.0);
        }
        Ok(match self {
            Baseline::Pointmass { point } => {
                if interval.contains(point[j]) {
                    point[j]
                } else {
                    0.0
                }
            }
            Baseline::Empirical { samples } => {
                let total: f64 = samples
                    .iter()
                    .filter(|s| interval.contains(s[j]))
                    .map(|s| s[j])
                    .sum();
                total / samples.len() as f64
            }
            Baseline::UniformBox { lo, hi } => {
                let (a, b) = interval.overlap_length(lo[j], hi[j]);
                (b * b - a * a) / (2.0 * (hi[j] - lo[j]))
            }
            Baseline::GaussianIso { center, sigma } => {
                let alpha = (interval.lo - center[j]) / sigma;
                let beta = (interval.hi - center[j]) / sigma;
                let mass = std_normal_cdf(beta) - std_normal_cdf(alpha);
                center[j] * mass + sigma * (std_normal_pdf(alpha) - std_normal_pdf(beta))
            }
        })
    }

    /// Exact raw moment `E[X_j^n]`.
    pub fn raw_moment(&self, j: usize, n: u32) -> Result<f64, BaselineError> {
        self.check_feature(j)?;
        Ok(match self {
            Baseline::Pointmass { point } => point[j].powi(n as i32),
            Baseline::Empirical { samples } => {
                samples.iter().map(|s| s[j].powi(n as i32)).sum::<f64>() / samples.len() as f64
            }
            Baseline::UniformBox { lo, hi } => {
                let k = n as i32 + 1;
                (hi[j].powi(k) - lo[j].powi(k)) / (k as f64 * (hi[j] - lo[j]))
            }
            Baseline::GaussianIso { center, sigma } => {
                // M_k = c·M_{k-1} + (k-1)·σ²·M_{k-2}
                let c = center[j];
                let s2 = sigma * sigma;
                let mut prev = 1.0; // M_0
                let mut cur = c; // M_1
                if n == 0 {
                    return Ok(1.0);
                }
                for k in 2..=n as u64 {
                    let next = c * cur + (k - 1) as f64 * s2 * prev;
                    prev = cur;
                    cur = next;
                }
                cur
            }
        })
    }

    /// Marginal distribution of feature `j` as a 1-D baseline.
    pub fn marginal(&self, j: usize) -> Result<Baseline, BaselineError> {
        self.check_feature(j)?;
        Ok(match self {
            Baseline::Pointmass { point } => Baseline::Pointmass {
                point: vec![point[j]],
            },
            Baseline::Empirical { samples } => Baseline::Empirical {
                samples: samples.iter().map(|s| vec![s[j]]).collect(),
            },
            Baseline::UniformBox { lo, hi } => Baseline::UniformBox {
                lo: vec![lo[j]],
                hi: vec![hi[j]],
            },
            Baseline::GaussianIso { center, sigma } => Baseline::GaussianIso {
                center: vec![center[j]],
                sigma: *sigma,
            },
        })
    }

    /// Marginal mass lying outside `[lo, hi]`; used to flag baselines that
    /// are inconsistent with a declared domain box.
    pub fn mass_outside(&self, j: usize, lo: f64, hi: f64) -> Result<f64, BaselineError> {
        let inside = self.interval_mass(j, &Interval::closed(lo, hi))?;
        Ok((1.0 - inside).max(0.0))
    }

    /// Checks Assumption 1 for `(x, j, delta)` against this baseline, using
    /// the full domain extent of feature `j` as the witness interval.
    ///
    /// Returns an error if the baseline itself carries marginal mass outside
    /// the declared domain (a configuration error, not an assumption failure).
    pub fn check_assumption1(
        &self,
        x: &[f64],
        j: usize,
        delta: f64,
        domain: &[(f64, f64)],
    ) -> Result<Assumption1Check, BaselineError> {
        self.check_feature(j)?;
        if !(delta > 0.0) {
            return Err(BaselineError::Invalid("delta must be positive".into()));
        }
        if domain.len() != self.dim() || x.len() != self.dim() {
            return Err(BaselineError::Invalid(
                "domain/example dimension mismatch".into(),
            ));
        }
        let (dom_lo, dom_hi) = domain[j];
        if dom_lo.is_finite() && dom_hi.is_finite() {
            let outside = self.mass_outside(j, dom_lo, dom_hi)?;
            if outside > 1e-12 {
                return Err(BaselineError::MassOutsideDomain {
                    feature: j,
                    outside,
                });
            }
        }
        let witness = (dom_lo, dom_hi);
        let inner_lo = x[j] - delta;
        let inner_hi = x[j] + delta;
        // The neighbourhood must sit strictly inside the open witness interval.
        if !(dom_lo < inner_lo && inner_hi < dom_hi) {
            return Ok(Assumption1Check {
                holds: false,
                witness,
                outer_mass: 0.0,
            });
        }
        let left = self.interval_mass(j, &Interval::open(dom_lo, inner_lo))?;
        let right = self.interval_mass(j, &Interval::open(inner_hi, dom_hi))?;
        let outer_mass = left + right;
        Ok(Assumption1Check {
            holds: outer_mass > 0.0,
            witness,
            outer_mass,
        })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("baseline serialization cannot fail")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self, BaselineError> {
        let b: Baseline = serde_json::from_value(value.clone())
            .map_err(|e| BaselineError::Invalid(format!("baseline JSON: {e}")))?;
        b.validate()?;
        Ok(b)
    }
}
