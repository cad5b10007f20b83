//! Reciprocal LASSO regression toolkit.
//!
//! The reciprocal LASSO penalizes a linear model by the sum of *reciprocal*
//! coefficient magnitudes, `RSS(beta) + lambda * sum_j 1/|beta_j|` over the
//! nonzero coefficients, so that small-but-nonzero coefficients are punished
//! harder than large ones. This crate provides:
//!
//! - the frequentist estimator: per-support inner solver, exhaustive search
//!   and a shotgun-style stochastic search ([`freq`]);
//! - two data-augmented Gibbs samplers for the Bayesian formulation, built on
//!   scale-mixture representations of the inverse double exponential prior
//!   ([`sampler`], [`dist`]);
//! - three hyperparameter-selection strategies: apriori overlap bound,
//!   Monte Carlo EM, and a conjugate Gamma hyperprior ([`hyper`]);
//! - prior extensions: reciprocal bridge, adaptive penalty, least-squares
//!   approximation for general likelihoods, and numerical verification of the
//!   underlying mixture identities ([`ext`]);
//! - a benchmark harness: synthetic scenario generation, balanced accuracy,
//!   k-fold cross-validation and a scenario runner ([`bench`]).

pub mod bench;
pub mod dist;
pub mod ext;
pub mod freq;
pub mod hyper;
pub mod model;
pub mod sampler;
