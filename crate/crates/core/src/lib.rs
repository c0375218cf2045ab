//! Transductive graph learning with data-dependent risk bounds.
//!
//! The toolkit operates in the transductive setting: all `m + u` points of a
//! dataset are known up front, a uniformly random `m`-subset carries labels,
//! and the goal is to label the remaining `u` points. Three spectral
//! classifiers over a cosine-similarity k-NN graph are provided (the
//! consistency method, the spectral graph transducer, and Tikhonov-regularized
//! Laplacian least squares), each exposed as a factored model `h = U·α` whose
//! matrix `U` depends only on the unlabeled point cloud.
//!
//! On top of the classifiers sit complexity and risk calculators:
//!
//! * [`rademacher`] — transductive Rademacher complexity of the model's
//!   hypothesis class: closed-form Frobenius/trace bounds, a Monte-Carlo
//!   estimator with Hoeffding confidence bands, and an exact brute-force
//!   oracle for tiny instances;
//! * [`concentration`] — tail bounds for sampling without replacement and an
//!   empirical simulator that validates them;
//! * [`riskbounds`] — assembled margin-based risk bounds, including a
//!   PAC-Bayesian bound for mixtures of base models;
//! * [`harness`] — dataset ingestion, the truncated-spectrum bound-comparison
//!   experiment, and CSV/metadata emission used by the `transrad` CLI.

// Validation guards are written as `!(x >= 0.0)` rather than `x < 0.0` so
// that NaN inputs are rejected instead of slipping through; the clippy
// rewrite would invert that behavior.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod concentration;
pub mod error;
pub mod graph;
pub mod harness;
pub mod rademacher;
pub mod riskbounds;
pub mod sample;
pub mod spectral;
pub mod util;

pub use error::{Error, Result};
