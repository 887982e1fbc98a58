//! Model adequacy tooling: quantile residuals, Kolmogorov–Smirnov checks,
//! information criteria and simulated half-normal envelopes.
//!
//! The response is continuous, so the "randomized" quantile residual needs no
//! randomization here: rᵢ = Φ⁻¹(F(xᵢ; θ̂)) is the deterministic probability
//! integral transform pushed through the normal quantile. Under a correct
//! model the rᵢ are standard normal.

use crate::dist::BBetaParams;
use crate::error::{Error, Result};
use crate::parallel;
use crate::regression::{fit, Coefficients, FitOptions, FitResult, RegressionModel};
use crate::rng;
use crate::specfun::std_normal_quantile;
use serde::Serialize;

// PIT values this close to 0 or 1 get clamped before Φ⁻¹ and counted.
const PIT_CLAMP: f64 = 1e-15;

/// Quantile residuals with their summary statistics.
#[derive(Debug, Clone, Serialize)]
pub struct ResidualReport {
    pub residuals: Vec<f64>,
    pub mean: f64,
    pub std_dev: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    /// Number of PIT values clamped away from {0, 1} to keep Φ⁻¹ finite.
    pub clamped: usize,
}

/// One-sample Kolmogorov–Smirnov outcome against Uniform(0, 1).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct KsTest {
    pub statistic: f64,
    pub p_value: f64,
}

/// AIC/BIC pair.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct InformationCriteria {
    pub aic: f64,
    pub bic: f64,
}

/// Simulated acceptance bands for the sorted absolute residuals.
#[derive(Debug, Clone, Serialize)]
pub struct EnvelopeBands {
    pub sorted_abs_residuals: Vec<f64>,
    pub lower: Vec<f64>,
    pub median: Vec<f64>,
    pub upper: Vec<f64>,
    pub n_sim: usize,
}

/// Probability integral transforms F(xᵢ; αᵢ, βᵢ, ρ, δ), clamped into
/// (0, 1); the second return is how many needed clamping.
pub fn pit_values(
    data: &[f64],
    model: &RegressionModel,
    coef: &Coefficients,
) -> Result<(Vec<f64>, usize)> {
    if data.len() != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "{} responses for {} design rows",
            data.len(),
            model.n()
        )));
    }
    let shapes = model.shapes(coef)?;
    let mut clamped = 0;
    let pits = data
        .iter()
        .zip(&shapes)
        .map(|(&x, &(alpha, beta))| {
            let params = BBetaParams::new(alpha, beta, coef.rho, coef.delta)?;
            let pit = params.cdf(x);
            if !(PIT_CLAMP..=1.0 - PIT_CLAMP).contains(&pit) {
                clamped += 1;
            }
            Ok(pit.clamp(PIT_CLAMP, 1.0 - PIT_CLAMP))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok((pits, clamped))
}

/// Quantile residuals rᵢ = Φ⁻¹(F(xᵢ; θ̂)) with summary statistics.
pub fn quantile_residuals(
    data: &[f64],
    model: &RegressionModel,
    coef: &Coefficients,
) -> Result<ResidualReport> {
    let (pits, clamped) = pit_values(data, model, coef)?;
    let residuals = pits
        .iter()
        .map(|&p| std_normal_quantile(p))
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std_dev, skewness, kurtosis) = sample_moments(&residuals);
    Ok(ResidualReport {
        residuals,
        mean,
        std_dev,
        skewness,
        kurtosis,
        clamped,
    })
}

/// Mean, (n−1) standard deviation, and standardized third/fourth moments.
pub fn sample_moments(values: &[f64]) -> (f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mut m2 = 0.0;
    let mut m3 = 0.0;
    let mut m4 = 0.0;
    for &v in values {
        let d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let var = m2 / (n - 1.0).max(1.0);
    let sd = var.sqrt();
    let skew = (m3 / n) / sd.powi(3);
    let kurt = (m4 / n) / (var * var);
    (mean, sd, skew, kurt)
}

/// One-sample KS distance of the values against Uniform(0, 1), with the
/// asymptotic Kolmogorov p-value at z = √n·D.
pub fn ks_statistic(pit_values: &[f64]) -> Result<KsTest> {
    if pit_values.is_empty() {
        return Err(Error::domain("ks_statistic", "empty sample"));
    }
    let mut sorted = pit_values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &u) in sorted.iter().enumerate() {
        let hi = (i as f64 + 1.0) / n - u;
        let lo = u - i as f64 / n;
        d = d.max(hi).max(lo);
    }
    Ok(KsTest {
        statistic: d,
        p_value: kolmogorov_sf(n.sqrt() * d),
    })
}

// Survival function of the Kolmogorov distribution. The alternating series
// converges fast for large z; the Jacobi-theta inversion covers small z.
fn kolmogorov_sf(z: f64) -> f64 {
    if z <= 0.0 {
        return 1.0;
    }
    if z < 1.18 {
        let v = std::f64::consts::PI * std::f64::consts::PI / (8.0 * z * z);
        let sum = (-v).exp() + (-9.0 * v).exp() + (-25.0 * v).exp() + (-49.0 * v).exp();
        let cdf = (2.0 * std::f64::consts::PI).sqrt() / z * sum;
        (1.0 - cdf).clamp(0.0, 1.0)
    } else {
        let mut sum = 0.0;
        for k in 1..=25_i32 {
            let term = (-2.0 * (k as f64 * z).powi(2)).exp();
            let signed = if k % 2 == 1 { term } else { -term };
            sum += signed;
            if term < 1e-16 {
                break;
            }
        }
        (2.0 * sum).clamp(0.0, 1.0)
    }
}

/// AIC = −2ℓ + 2k and BIC = −2ℓ + k·log n.
pub fn information_criteria(loglik: f64, k: usize, n: usize) -> InformationCriteria {
    InformationCriteria {
        aic: -2.0 * loglik + 2.0 * k as f64,
        bic: -2.0 * loglik + k as f64 * (n as f64).ln(),
    }
}

/// Half-normal envelope with coefficients held at θ̂ (no per-replicate
/// refit).
pub fn halfnormal_envelope(
    data: &[f64],
    model: &RegressionModel,
    fit_result: &FitResult,
    n_sim: usize,
    seed: u64,
) -> Result<EnvelopeBands> {
    halfnormal_envelope_with(data, model, fit_result, n_sim, seed, false)
}

/// Envelope simulation with an optional refit per simulated dataset.
pub fn halfnormal_envelope_with(
    data: &[f64],
    model: &RegressionModel,
    fit_result: &FitResult,
    n_sim: usize,
    seed: u64,
    refit: bool,
) -> Result<EnvelopeBands> {
    if n_sim < 19 {
        return Err(Error::domain(
            "halfnormal_envelope",
            format!("need n_sim ≥ 19 for a 95% band, got {n_sim}"),
        ));
    }
    let coef = &fit_result.estimates;
    let shapes = model.shapes(coef)?;
    let n = data.len();
    if n != model.n() {
        return Err(Error::DimensionMismatch(format!(
            "{n} responses for {} design rows",
            model.n()
        )));
    }
    let per_obs: Vec<BBetaParams> = shapes
        .iter()
        .map(|&(a, b)| BBetaParams::new(a, b, coef.rho, coef.delta))
        .collect::<Result<_>>()?;

    // Each replicate draws from its own stream, so the bands do not depend
    // on the parallel schedule.
    let sims: Vec<Result<Vec<f64>>> = parallel::map_indexed(n_sim, |s| {
        let mut stream = rng::derive_stream(seed, s as u64 + 1);
        let mut responses = Vec::with_capacity(n);
        for params in &per_obs {
            responses.push(params.sample_one(&mut stream)?);
        }
        let rep_coef = if refit {
            let options = FitOptions {
                start: Some(coef.clone()),
                ..FitOptions::default()
            };
            fit(&responses, model, &options)?.estimates
        } else {
            coef.clone()
        };
        let report = quantile_residuals(&responses, model, &rep_coef)?;
        let mut abs: Vec<f64> = report.residuals.iter().map(|r| r.abs()).collect();
        abs.sort_by(f64::total_cmp);
        Ok(abs)
    });
    let sims = sims.into_iter().collect::<Result<Vec<Vec<f64>>>>()?;

    let mut observed: Vec<f64> = data
        .iter()
        .zip(&per_obs)
        .map(|(&x, params)| {
            let pit = params.cdf(x).clamp(PIT_CLAMP, 1.0 - PIT_CLAMP);
            std_normal_quantile(pit).map(f64::abs)
        })
        .collect::<Result<_>>()?;
    observed.sort_by(f64::total_cmp);

    let mut lower = Vec::with_capacity(n);
    let mut median = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    let mut column = vec![0.0; n_sim];
    for j in 0..n {
        for (s, sim) in sims.iter().enumerate() {
            column[s] = sim[j];
        }
        column.sort_by(f64::total_cmp);
        lower.push(percentile(&column, 0.025));
        median.push(percentile(&column, 0.5));
        upper.push(percentile(&column, 0.975));
    }

    Ok(EnvelopeBands {
        sorted_abs_residuals: observed,
        lower,
        median,
        upper,
        n_sim,
    })
}

// Linear-interpolation percentile on sorted data.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = p * (n - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let w = pos - lo as f64;
    sorted[lo] * (1.0 - w) + sorted[hi] * w
}
