//! wasm-bindgen surface for the interactive BBeta explorer page.
//!
//! Three operations back the demo: [`curve_data`] evaluates pdf/cdf/hazard
//! on a grid for plotting, [`distribution_summary`] returns mode analysis
//! and moments as JSON, and [`sample_histogram`] bins seeded draws.
//!
//! The `*_impl` functions hold the logic and are testable on any target;
//! the exported wrappers only translate errors into `JsValue`.

use bbeta::dist::{BBetaParams, ShannonMethod};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn params(alpha: f64, beta: f64, rho: f64, delta: f64) -> Result<BBetaParams, String> {
    BBetaParams::new(alpha, beta, rho, delta).map_err(|e| e.to_string())
}

pub fn curve_data_impl(
    alpha: f64,
    beta: f64,
    rho: f64,
    delta: f64,
    n_points: usize,
) -> Result<Vec<f64>, String> {
    if n_points < 2 {
        return Err("need at least 2 grid points".to_string());
    }
    let p = params(alpha, beta, rho, delta)?;
    let denom = n_points as f64 + 1.0;
    let mut out = Vec::with_capacity(4 * n_points);
    let xs: Vec<f64> = (0..n_points).map(|i| (i as f64 + 1.0) / denom).collect();
    out.extend(&xs);
    out.extend(xs.iter().map(|&x| p.pdf(x)));
    out.extend(xs.iter().map(|&x| p.cdf(x)));
    out.extend(xs.iter().map(|&x| p.hazard(x).unwrap_or(f64::INFINITY)));
    Ok(out)
}

pub fn distribution_summary_impl(
    alpha: f64,
    beta: f64,
    rho: f64,
    delta: f64,
) -> Result<String, String> {
    let p = params(alpha, beta, rho, delta)?;
    let analysis = p.mode_analysis();
    let stats = p.summary_stats();
    let weights = p.mixture_weights();
    let conditions = p.check_bimodality_conditions();
    let summary = json!({
        "normalizer": p.normalizer(),
        "mean": stats.mean,
        "variance": stats.variance,
        "skewness": stats.skewness,
        "kurtosis": stats.kurtosis,
        "mixture_weights": weights,
        "bimodality_conditions": conditions,
        "mode_analysis": analysis,
        "shannon_entropy": p.shannon_entropy(ShannonMethod::Quadrature).ok(),
        "quadratic_entropy": p.quadratic_entropy().ok(),
    });
    Ok(summary.to_string())
}

pub fn sample_histogram_impl(
    alpha: f64,
    beta: f64,
    rho: f64,
    delta: f64,
    n: usize,
    seed: u64,
    bins: usize,
) -> Result<Vec<u32>, String> {
    if bins == 0 || n == 0 {
        return Err("need n ≥ 1 and bins ≥ 1".to_string());
    }
    let p = params(alpha, beta, rho, delta)?;
    let draws = p.sample(n, seed).map_err(|e| e.to_string())?;
    let mut counts = vec![0u32; bins];
    for x in draws {
        let idx = ((x * bins as f64) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts)
}

/// Flattened plot data: n grid points followed by n pdf values, n cdf
/// values and n hazard values (length 4n).
#[wasm_bindgen]
pub fn curve_data(
    alpha: f64,
    beta: f64,
    rho: f64,
    delta: f64,
    n_points: usize,
) -> Result<Vec<f64>, JsValue> {
    curve_data_impl(alpha, beta, rho, delta, n_points).map_err(|e| JsValue::from_str(&e))
}

/// JSON summary: normalizer, moments, mixture weights, bimodality
/// conditions, critical points and entropies.
#[wasm_bindgen]
pub fn distribution_summary(
    alpha: f64,
    beta: f64,
    rho: f64,
    delta: f64,
) -> Result<String, JsValue> {
    distribution_summary_impl(alpha, beta, rho, delta).map_err(|e| JsValue::from_str(&e))
}

/// Histogram of `n` seeded draws over `bins` equal-width cells on [0, 1].
#[wasm_bindgen]
pub fn sample_histogram(
    alpha: f64,
    beta: f64,
    rho: f64,
    delta: f64,
    n: usize,
    seed: u64,
    bins: usize,
) -> Result<Vec<u32>, JsValue> {
    sample_histogram_impl(alpha, beta, rho, delta, n, seed, bins).map_err(|e| JsValue::from_str(&e))
}
