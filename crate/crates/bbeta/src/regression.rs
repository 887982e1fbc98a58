//! Maximum-likelihood BBeta regression.
//!
//! Each response Xᵢ ~ BBeta(αᵢ, βᵢ, ρ, δ) with log links
//! log αᵢ = wᵢᵀγ and log βᵢ = zᵢᵀζ; (ρ, δ) are shared across observations.
//! Estimation maximizes the log-likelihood over (γ, ζ, log ρ, δ) — ρ is
//! optimized on the log scale so ρ ≥ 0 holds by construction — and standard
//! errors come from the observed information (numerical Hessian of −ℓ at the
//! optimum) in the original (γ, ζ, ρ, δ) coordinates.

use crate::dist::normalizer_value;
use crate::error::{Error, Result};
use crate::linalg::{invert, Matrix};
use crate::optim::{minimize, MinimizeOptions, MinimizeResult};
use crate::specfun::{ln_beta_unchecked, std_normal_quantile};
use serde::{Deserialize, Serialize};

/// Link function connecting a linear predictor to a shape parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum Link {
    #[default]
    Log,
}

impl Link {
    pub fn inverse(&self, eta: f64) -> f64 {
        match self {
            Link::Log => eta.exp(),
        }
    }

    pub fn apply(&self, value: f64) -> f64 {
        match self {
            Link::Log => value.ln(),
        }
    }
}

/// Design matrices for the two shape parameters.
#[derive(Debug, Clone)]
pub struct RegressionModel {
    w: Matrix,
    z: Matrix,
    link_alpha: Link,
    link_beta: Link,
}

impl RegressionModel {
    /// Build a model from per-observation covariate rows (intercept columns
    /// included by the caller). Both matrices must be full column rank and
    /// leave p + q < n.
    pub fn new(w_rows: &[Vec<f64>], z_rows: &[Vec<f64>]) -> Result<Self> {
        if w_rows.len() != z_rows.len() {
            return Err(Error::DimensionMismatch(format!(
                "covariate row counts differ: {} vs {}",
                w_rows.len(),
                z_rows.len()
            )));
        }
        let w = Matrix::from_rows(w_rows);
        let z = Matrix::from_rows(z_rows);
        let n = w.rows;
        if w.cols == 0 || z.cols == 0 || n == 0 {
            return Err(Error::DimensionMismatch(
                "empty design matrix".to_string(),
            ));
        }
        if w.cols + z.cols >= n {
            return Err(Error::DimensionMismatch(format!(
                "need p + q < n, got p = {}, q = {}, n = {n}",
                w.cols, z.cols
            )));
        }
        if w.rank(1e-10) < w.cols {
            return Err(Error::DimensionMismatch(
                "alpha design matrix is rank deficient".to_string(),
            ));
        }
        if z.rank(1e-10) < z.cols {
            return Err(Error::DimensionMismatch(
                "beta design matrix is rank deficient".to_string(),
            ));
        }
        Ok(Self {
            w,
            z,
            link_alpha: Link::Log,
            link_beta: Link::Log,
        })
    }

    /// Intercept-only model with n observations.
    pub fn intercept_only(n: usize) -> Result<Self> {
        let ones = vec![vec![1.0]; n];
        Self::new(&ones, &ones)
    }

    pub fn n(&self) -> usize {
        self.w.rows
    }

    pub fn p(&self) -> usize {
        self.w.cols
    }

    pub fn q(&self) -> usize {
        self.z.cols
    }

    /// Per-observation (αᵢ, βᵢ) induced by the coefficients.
    pub fn shapes(&self, coef: &Coefficients) -> Result<Vec<(f64, f64)>> {
        self.check_dims(coef)?;
        Ok((0..self.n())
            .map(|i| {
                let eta1: f64 = self
                    .w
                    .row(i)
                    .iter()
                    .zip(&coef.gamma)
                    .map(|(x, g)| x * g)
                    .sum();
                let eta2: f64 = self
                    .z
                    .row(i)
                    .iter()
                    .zip(&coef.zeta)
                    .map(|(x, g)| x * g)
                    .sum();
                (self.link_alpha.inverse(eta1), self.link_beta.inverse(eta2))
            })
            .collect())
    }

    fn check_dims(&self, coef: &Coefficients) -> Result<()> {
        if coef.gamma.len() != self.p() || coef.zeta.len() != self.q() {
            return Err(Error::DimensionMismatch(format!(
                "coefficient lengths ({}, {}) do not match design ({}, {})",
                coef.gamma.len(),
                coef.zeta.len(),
                self.p(),
                self.q()
            )));
        }
        Ok(())
    }
}

/// Regression coefficients: γ for α, ζ for β, plus shared (ρ, δ).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub gamma: Vec<f64>,
    pub zeta: Vec<f64>,
    pub rho: f64,
    pub delta: f64,
}

impl Coefficients {
    pub fn new(gamma: Vec<f64>, zeta: Vec<f64>, rho: f64, delta: f64) -> Result<Self> {
        if rho < 0.0 || !rho.is_finite() || !delta.is_finite() {
            return Err(Error::domain(
                "Coefficients::new",
                format!("need rho ≥ 0 and finite delta, got rho = {rho}, delta = {delta}"),
            ));
        }
        if gamma.iter().chain(&zeta).any(|v| !v.is_finite()) {
            return Err(Error::domain(
                "Coefficients::new",
                "coefficients must be finite".to_string(),
            ));
        }
        Ok(Self {
            gamma,
            zeta,
            rho,
            delta,
        })
    }

    /// Report-friendly parameter labels, in estimation order.
    pub fn parameter_names(p: usize, q: usize) -> Vec<String> {
        let mut names: Vec<String> = (0..p).map(|i| format!("gamma_{i}")).collect();
        names.extend((0..q).map(|i| format!("zeta_{i}")));
        names.push("rho".to_string());
        names.push("delta".to_string());
        names
    }
}

/// Log-likelihood of the responses under the regression structure, with the
/// normalizing constant recomputed per observation.
pub fn loglik(data: &[f64], model: &RegressionModel, coef: &Coefficients) -> Result<f64> {
    if data.len() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {} design rows",
            data.len(),
            model.n()
        )));
    }
    let bad: Vec<usize> = data
        .iter()
        .enumerate()
        .filter(|(_, &x)| !(x > 0.0 && x < 1.0))
        .map(|(i, _)| i)
        .collect();
    if !bad.is_empty() {
        return Err(Error::InvalidResponse { rows: bad });
    }
    let shapes = model.shapes(coef)?;
    let mut total = 0.0;
    for (&x, &(alpha, beta)) in data.iter().zip(&shapes) {
        let z = normalizer_value(alpha, beta, coef.rho, coef.delta);
        if !z.is_finite() || z <= 0.0 {
            return Err(Error::Degenerate(format!(
                "per-observation normalizer {z:.3e} at (α, β) = ({alpha}, {beta})"
            )));
        }
        let quad_factor = coef.rho + (1.0 - coef.delta * x).powi(2);
        total += -z.ln() - ln_beta_unchecked(alpha, beta) + quad_factor.ln()
            + (alpha - 1.0) * x.ln()
            + (beta - 1.0) * (-x).ln_1p();
    }
    Ok(total)
}

/// Fitting controls. `fixed_rho`/`fixed_delta` pin those parameters instead
/// of estimating them (the nested beta regression is `fixed_delta = 0`).
#[derive(Debug, Clone, Serialize)]
pub struct FitOptions {
    pub max_iter: usize,
    pub grad_tol: f64,
    #[serde(skip)]
    pub start: Option<Coefficients>,
    pub ci_level: f64,
    /// Clamp boundary responses into [1e-6, 1 − 1e-6] instead of rejecting.
    pub nudge_boundary: bool,
    pub fixed_rho: Option<f64>,
    pub fixed_delta: Option<f64>,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iter: 500,
            grad_tol: 1e-6,
            start: None,
            ci_level: 0.95,
            nudge_boundary: false,
            fixed_rho: None,
            fixed_delta: None,
        }
    }
}

const BOUNDARY_EPS: f64 = 1e-6;

/// Fit outcome: estimates, observed information, Wald intervals and
/// goodness-of-fit scalars. `std_errors` is `None` when the information
/// matrix could not be inverted.
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    pub estimates: Coefficients,
    pub loglik: f64,
    /// Observed information (−Hessian of ℓ) over the free parameters, in
    /// (γ, ζ, ρ, δ) order with fixed parameters omitted.
    pub observed_info: Vec<Vec<f64>>,
    pub std_errors: Option<Vec<f64>>,
    pub ci_lower: Option<Vec<f64>>,
    pub ci_upper: Option<Vec<f64>>,
    pub ci_level: f64,
    pub aic: f64,
    pub bic: f64,
    pub converged: bool,
    pub iterations: usize,
    /// Number of freely estimated parameters (the k in AIC/BIC).
    pub n_free_params: usize,
    /// Names of the free parameters, aligned with `std_errors` and the CIs.
    pub parameter_names: Vec<String>,
    /// Optimizer settings used, echoed for reproducibility.
    pub grad_tol: f64,
    pub max_iter: usize,
}

// Packs the free parameters into a flat optimizer vector. ρ travels as ln ρ.
struct Packing {
    p: usize,
    q: usize,
    fixed_rho: Option<f64>,
    fixed_delta: Option<f64>,
}

impl Packing {
    fn n_free(&self) -> usize {
        self.p
            + self.q
            + usize::from(self.fixed_rho.is_none())
            + usize::from(self.fixed_delta.is_none())
    }

    fn pack(&self, coef: &Coefficients) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_free());
        v.extend_from_slice(&coef.gamma);
        v.extend_from_slice(&coef.zeta);
        if self.fixed_rho.is_none() {
            v.push(coef.rho.max(1e-12).ln());
        }
        if self.fixed_delta.is_none() {
            v.push(coef.delta);
        }
        v
    }

    fn unpack(&self, v: &[f64]) -> Coefficients {
        let gamma = v[..self.p].to_vec();
        let zeta = v[self.p..self.p + self.q].to_vec();
        let mut idx = self.p + self.q;
        let rho = match self.fixed_rho {
            Some(r) => r,
            None => {
                let r = v[idx].exp();
                idx += 1;
                r
            }
        };
        let delta = self.fixed_delta.unwrap_or_else(|| v[idx]);
        Coefficients {
            gamma,
            zeta,
            rho,
            delta,
        }
    }

    /// Free-parameter values in natural coordinates (ρ itself, not ln ρ).
    fn natural(&self, coef: &Coefficients) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.n_free());
        v.extend_from_slice(&coef.gamma);
        v.extend_from_slice(&coef.zeta);
        if self.fixed_rho.is_none() {
            v.push(coef.rho);
        }
        if self.fixed_delta.is_none() {
            v.push(coef.delta);
        }
        v
    }

    fn coefficients_from_natural(&self, v: &[f64], template: &Coefficients) -> Coefficients {
        let mut coef = template.clone();
        coef.gamma = v[..self.p].to_vec();
        coef.zeta = v[self.p..self.p + self.q].to_vec();
        let mut idx = self.p + self.q;
        if self.fixed_rho.is_none() {
            coef.rho = v[idx];
            idx += 1;
        }
        if self.fixed_delta.is_none() {
            coef.delta = v[idx];
        }
        coef
    }

    fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = (0..self.p).map(|i| format!("gamma_{i}")).collect();
        names.extend((0..self.q).map(|i| format!("zeta_{i}")));
        if self.fixed_rho.is_none() {
            names.push("rho".to_string());
        }
        if self.fixed_delta.is_none() {
            names.push("delta".to_string());
        }
        names
    }
}

/// Maximize the log-likelihood. Non-convergence is reported through the
/// `converged` flag with the best iterate retained.
pub fn fit(data: &[f64], model: &RegressionModel, options: &FitOptions) -> Result<FitResult> {
    if data.len() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {} design rows",
            data.len(),
            model.n()
        )));
    }
    let n = model.n();
    let (p, q) = (model.p(), model.q());
    if n <= p + q + 2 {
        return Err(Error::DimensionMismatch(format!(
            "need n > p + q + 2, got n = {n}, p = {p}, q = {q}"
        )));
    }

    // Response validation, with the optional documented nudge.
    let bad: Vec<usize> = data
        .iter()
        .enumerate()
        .filter(|(_, &x)| !(x > 0.0 && x < 1.0))
        .map(|(i, _)| i)
        .collect();
    let data: Vec<f64> = if bad.is_empty() {
        data.to_vec()
    } else if options.nudge_boundary {
        data.iter()
            .map(|&x| x.clamp(BOUNDARY_EPS, 1.0 - BOUNDARY_EPS))
            .collect()
    } else {
        return Err(Error::InvalidResponse { rows: bad });
    };

    let packing = Packing {
        p,
        q,
        fixed_rho: options.fixed_rho,
        fixed_delta: options.fixed_delta,
    };

    let start = match &options.start {
        Some(provided) => provided.clone(),
        None => starting_values(&data, p, q, &packing),
    };
    let mut x0 = packing.pack(&start);

    let objective = |v: &[f64]| {
        let coef = packing.unpack(v);
        match loglik(&data, model, &coef) {
            Ok(ll) if ll.is_finite() => -ll,
            _ => f64::INFINITY,
        }
    };

    // The likelihood is exactly flat in ρ on the δ = 0 hyperplane, so a
    // δ = 0 start leaves the first δ step to gradient noise and can drop
    // the iterate into the wrong basin. Short pilot runs from a fixed δ
    // grid let the intercepts adapt toward each basin; the full budget then
    // goes to one continuous run from the winning pilot's starting point,
    // which keeps the curvature model intact through the early iterations.
    if options.start.is_none() && options.fixed_delta.is_none() {
        let delta_slot = packing.n_free() - 1;
        let pilot = MinimizeOptions {
            max_iter: 40,
            grad_tol: options.grad_tol,
        };
        let mut best: Option<(f64, Vec<f64>)> = None;
        for &delta0 in &[0.0, -2.4, -1.2, 1.2, 2.4] {
            let mut candidate = x0.clone();
            candidate[delta_slot] = delta0;
            let probe = minimize(objective, &candidate, &pilot);
            if best.as_ref().is_none_or(|(v, _)| probe.value < *v) {
                best = Some((probe.value, candidate));
            }
        }
        if let Some((_, x)) = best {
            x0 = x;
        }
    }

    let mut opt = minimize(
        objective,
        &x0,
        &MinimizeOptions {
            max_iter: options.max_iter,
            grad_tol: options.grad_tol,
        },
    );
    if opt.stalled && !opt.converged && opt.iterations < options.max_iter {
        // Fresh curvature sometimes recovers the last digits after a stall.
        let budget = options.max_iter - opt.iterations;
        let retry = minimize(
            objective,
            &opt.x,
            &MinimizeOptions {
                max_iter: budget,
                grad_tol: options.grad_tol,
            },
        );
        opt = MinimizeResult {
            iterations: opt.iterations + retry.iterations,
            ..retry
        };
    }

    let estimates = packing.unpack(&opt.x);
    let maximized = loglik(&data, model, &estimates)?;
    let k = packing.n_free();

    // Observed information in natural coordinates at the optimum.
    let theta_hat = packing.natural(&estimates);
    let neg_ll_natural = |v: &[f64]| {
        let coef = packing.coefficients_from_natural(v, &estimates);
        if coef.rho < 0.0 {
            return f64::NAN;
        }
        match loglik(&data, model, &coef) {
            Ok(ll) => -ll,
            Err(_) => f64::NAN,
        }
    };
    let observed_info = numerical_hessian(&neg_ll_natural, &theta_hat);

    let inverse = invert(
        &Matrix::from_rows(&observed_info),
        1e-300,
    );
    let (std_errors, ci_lower, ci_upper) = match inverse {
        Some(cov) => {
            let diag: Vec<f64> = (0..k).map(|i| cov.get(i, i)).collect();
            if diag.iter().all(|&v| v.is_finite() && v > 0.0) {
                let se: Vec<f64> = diag.iter().map(|v| v.sqrt()).collect();
                let z = std_normal_quantile(1.0 - (1.0 - options.ci_level) / 2.0)?;
                let lower: Vec<f64> = theta_hat
                    .iter()
                    .zip(&se)
                    .map(|(t, s)| t - z * s)
                    .collect();
                let upper: Vec<f64> = theta_hat
                    .iter()
                    .zip(&se)
                    .map(|(t, s)| t + z * s)
                    .collect();
                (Some(se), Some(lower), Some(upper))
            } else {
                (None, None, None)
            }
        }
        None => (None, None, None),
    };

    Ok(FitResult {
        estimates,
        loglik: maximized,
        observed_info,
        std_errors,
        ci_lower,
        ci_upper,
        ci_level: options.ci_level,
        aic: -2.0 * maximized + 2.0 * k as f64,
        bic: -2.0 * maximized + k as f64 * (n as f64).ln(),
        converged: opt.converged,
        iterations: opt.iterations,
        n_free_params: k,
        parameter_names: packing.names(),
        grad_tol: options.grad_tol,
        max_iter: options.max_iter,
    })
}

// Method-of-moments beta fit on the pooled responses seeds the intercepts;
// every other coefficient starts at zero, ρ at 0.1 and δ at 0 so the initial
// model is a plain beta regression.
fn starting_values(data: &[f64], p: usize, q: usize, packing: &Packing) -> Coefficients {
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let var = data.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    let (a0, b0) = if var > 1e-12 && mean * (1.0 - mean) > var {
        let common = mean * (1.0 - mean) / var - 1.0;
        (
            (mean * common).clamp(1e-2, 1e4),
            ((1.0 - mean) * common).clamp(1e-2, 1e4),
        )
    } else {
        (1.0, 1.0)
    };
    let mut gamma = vec![0.0; p];
    gamma[0] = a0.ln();
    let mut zeta = vec![0.0; q];
    zeta[0] = b0.ln();
    Coefficients {
        gamma,
        zeta,
        rho: packing.fixed_rho.unwrap_or(0.1),
        delta: packing.fixed_delta.unwrap_or(0.0),
    }
}

// Central-difference Hessian with steps h = ε^{1/4}·max(1, |θ|), symmetrized.
fn numerical_hessian<F: Fn(&[f64]) -> f64>(f: &F, x: &[f64]) -> Vec<Vec<f64>> {
    let k = x.len();
    let h0 = f64::EPSILON.powf(0.25);
    let steps: Vec<f64> = x.iter().map(|v| h0 * v.abs().max(1.0)).collect();
    let f0 = f(x);
    let mut h = vec![vec![0.0; k]; k];

    let eval = |offsets: &[(usize, f64)]| {
        let mut xp = x.to_vec();
        for &(i, d) in offsets {
            xp[i] += d;
        }
        f(&xp)
    };

    for i in 0..k {
        let hi = steps[i];
        let fpp = eval(&[(i, hi)]);
        let fmm = eval(&[(i, -hi)]);
        h[i][i] = (fpp - 2.0 * f0 + fmm) / (hi * hi);
        for j in (i + 1)..k {
            let hj = steps[j];
            let fpq = eval(&[(i, hi), (j, hj)]);
            let fpm = eval(&[(i, hi), (j, -hj)]);
            let fmq = eval(&[(i, -hi), (j, hj)]);
            let fmm = eval(&[(i, -hi), (j, -hj)]);
            let value = (fpq - fpm - fmq + fmm) / (4.0 * hi * hj);
            h[i][j] = value;
            h[j][i] = value;
        }
    }
    h
}

/// Per-row inverse-link shapes and the implied response mean.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Prediction {
    pub alpha: f64,
    pub beta: f64,
    pub mean: f64,
}

/// Evaluate the fitted model on new covariate rows.
pub fn predict(
    model: &RegressionModel,
    coef: &Coefficients,
    new_w: &[Vec<f64>],
    new_z: &[Vec<f64>],
) -> Result<Vec<Prediction>> {
    if new_w.len() != new_z.len() {
        return Err(Error::DimensionMismatch(format!(
            "covariate row counts differ: {} vs {}",
            new_w.len(),
            new_z.len()
        )));
    }
    if new_w.iter().any(|r| r.len() != model.p()) || new_z.iter().any(|r| r.len() != model.q()) {
        return Err(Error::DimensionMismatch(
            "prediction rows do not match design dimensions".to_string(),
        ));
    }
    new_w
        .iter()
        .zip(new_z)
        .map(|(wr, zr)| {
            let eta1: f64 = wr.iter().zip(&coef.gamma).map(|(x, g)| x * g).sum();
            let eta2: f64 = zr.iter().zip(&coef.zeta).map(|(x, g)| x * g).sum();
            let alpha = model.link_alpha.inverse(eta1);
            let beta = model.link_beta.inverse(eta2);
            let params = crate::dist::BBetaParams::new(alpha, beta, coef.rho, coef.delta)?;
            Ok(Prediction {
                alpha,
                beta,
                mean: params.raw_moment_int(1),
            })
        })
        .collect()
}
