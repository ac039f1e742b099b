//! Feature-attribution auditing toolkit.
//!
//! The crate provides:
//!
//! - [`model`]: piecewise-linear, additive, polynomial, and small ReLU models
//!   with analytic gradients and Lipschitz bounds;
//! - [`baseline`]: baseline distributions with exact interval masses and
//!   truncated moments;
//! - [`attribution`]: SHAP (exact and sampled), integrated gradients,
//!   gradient, SmoothGrad, and LIME, plus completeness/linearity checkers;
//! - [`forge`]: constructions of models with prescribed attribution and
//!   arbitrary local behaviour, and the random-polynomial sign experiment;
//! - [`hyptest`]: end-task ground truths, threshold tests, worst-case
//!   specificity/sensitivity, and ROC curves;
//! - [`querytest`]: brute-force query testing with exact rate formulas and
//!   their empirical verification;
//! - [`experiment`]: CSV ingestion, seeded MLP training, and the
//!   models × examples × thresholds ROC sweep;
//! - [`verify`]: the randomized invariant batteries behind `attraudit verify`.

// Validation uses `!(x > 0.0)` rather than `x <= 0.0`: the negated form also
// rejects NaN. Index loops over small dense matrices stay as loops.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod attribution;
pub mod baseline;
pub mod experiment;
pub mod forge;
pub mod hyptest;
pub mod model;
pub mod querytest;
pub mod seed;
pub mod verify;

pub use attribution::{Attribution, MethodSettings, MethodTag};
pub use baseline::{Baseline, Interval};
pub use model::{AdditiveModel, Component1D, MlpModel, Model, PiecewiseLinear1D, Polynomial1D};
