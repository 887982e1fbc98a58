//! Bimodal beta (BBeta) distribution and regression toolkit.
//!
//! The BBeta distribution extends the classic beta distribution on the unit
//! interval with a quadratic factor ρ + (1 − δx)², renormalized. Depending on
//! (α, β, ρ, δ) the density is unimodal or bimodal, which makes the family
//! useful for proportions that cluster around two centers.
//!
//! The crate is organized as:
//!
//! - [`specfun`]: log-gamma, beta, incomplete beta, digamma, normal CDF and
//!   quantile — the numerical kernel everything else builds on
//! - [`quad`]: adaptive Gauss–Kronrod quadrature with endpoint-singularity
//!   handling
//! - [`dist`]: the distribution itself — density, CDF, quantile, sampling,
//!   moments, entropies and mode analysis
//! - [`optim`]: a small BFGS minimizer with numerical gradients
//! - [`regression`]: maximum-likelihood BBeta regression with log links on
//!   both shape parameters
//! - [`diagnostics`]: quantile residuals, Kolmogorov–Smirnov checks,
//!   information criteria and simulated half-normal envelopes
//! - [`simulation`]: a Monte Carlo harness for bias/RMSE studies of the
//!   regression estimators

pub mod diagnostics;
pub mod dist;
pub mod error;
pub mod optim;
pub mod quad;
pub mod regression;
pub mod rng;
pub mod simulation;
pub mod specfun;

pub(crate) mod linalg;
pub(crate) mod parallel;

pub use error::{Error, Result};

pub use dist::{BBetaParams, MixtureWeights, Modality, ModeAnalysis, ShannonMethod};
pub use regression::{Coefficients, FitOptions, FitResult, RegressionModel};
