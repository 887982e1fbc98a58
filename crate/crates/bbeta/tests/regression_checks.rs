//! Estimation-level contracts: gradient accuracy, reparameterization
//! invariance, nested-model behavior and envelope coverage.

mod common;

use bbeta::diagnostics::halfnormal_envelope;
use bbeta::dist::BBetaParams;
use bbeta::optim::{minimize, numerical_gradient, MinimizeOptions};
use bbeta::regression::{fit, loglik, Coefficients, FitOptions, RegressionModel};
use bbeta::rng::derive_stream;
use bbeta::simulation::{run_mc_study, McConfig};
use rand::Rng;

fn uniform_design(n: usize, seed: u64) -> (RegressionModel, Vec<Vec<f64>>) {
    let mut stream = derive_stream(seed, 0);
    let rows: Vec<Vec<f64>> = (0..n).map(|_| vec![1.0, stream.random::<f64>()]).collect();
    (RegressionModel::new(&rows, &rows).unwrap(), rows)
}

fn simulate(model: &RegressionModel, truth: &Coefficients, seed: u64) -> Vec<f64> {
    let mut stream = derive_stream(seed, 1);
    model
        .shapes(truth)
        .unwrap()
        .into_iter()
        .map(|(a, b)| {
            let params = BBetaParams::new(a, b, truth.rho, truth.delta).unwrap();
            loop {
                let x = params.sample_one(&mut stream).unwrap();
                if x > 0.0 && x < 1.0 {
                    return x;
                }
            }
        })
        .collect()
}

#[test]
fn loglik_gradient_matches_four_point_stencil() {
    let (model, _) = uniform_design(80, 21);
    let truth = Coefficients::new(vec![-0.5, 1.2], vec![0.8, -0.6], 0.3, 1.0).unwrap();
    let data = simulate(&model, &truth, 21);

    let objective = |v: &[f64]| {
        let coef = Coefficients {
            gamma: vec![v[0], v[1]],
            zeta: vec![v[2], v[3]],
            rho: v[4].exp(),
            delta: v[5],
        };
        -loglik(&data, &model, &coef).unwrap_or(f64::NEG_INFINITY)
    };

    let mut stream = derive_stream(99, 0);
    for point in 0..20 {
        let theta: Vec<f64> = (0..6)
            .map(|i| {
                let center = [-0.5, 1.2, 0.8, -0.6, (0.3f64).ln(), 1.0][i];
                center + 0.4 * (stream.random::<f64>() - 0.5)
            })
            .collect();
        let grad = numerical_gradient(&objective, &theta);
        for i in 0..6 {
            let h = 1e-4 * theta[i].abs().max(1.0);
            let probe = |offset: f64| {
                let mut t = theta.clone();
                t[i] += offset;
                objective(&t)
            };
            let four_point = (probe(-2.0 * h) - 8.0 * probe(-h) + 8.0 * probe(h)
                - probe(2.0 * h))
                / (12.0 * h);
            assert!(
                (grad[i] - four_point).abs() <= 1e-4 * four_point.abs().max(1.0),
                "point {point}, coordinate {i}: {} vs {four_point}",
                grad[i]
            );
        }
    }
}

#[test]
fn reparameterization_invariance_for_rho() {
    let truth = Coefficients::new(vec![1.8, 0.4], vec![1.6, -0.3], 0.1, 2.0).unwrap();
    let (model, _) = uniform_design(250, 4);
    let data = simulate(&model, &truth, 4);

    let log_scale = fit(&data, &model, &FitOptions::default()).unwrap();

    // Box-constrained alternative: optimize ρ directly with a hard wall at
    // zero, started at the log-scale optimum.
    let est = &log_scale.estimates;
    let boxed = |v: &[f64]| {
        if v[4] < 0.0 {
            return f64::INFINITY;
        }
        let coef = Coefficients {
            gamma: vec![v[0], v[1]],
            zeta: vec![v[2], v[3]],
            rho: v[4],
            delta: v[5],
        };
        match loglik(&data, &model, &coef) {
            Ok(ll) if ll.is_finite() => -ll,
            _ => f64::INFINITY,
        }
    };
    let start = [
        est.gamma[0],
        est.gamma[1],
        est.zeta[0],
        est.zeta[1],
        est.rho,
        est.delta,
    ];
    let result = minimize(boxed, &start, &MinimizeOptions::default());

    assert!(
        (log_scale.loglik - (-result.value)).abs() <= 1e-8 * log_scale.loglik.abs().max(1.0),
        "log-scale {} vs box-constrained {}",
        log_scale.loglik,
        -result.value
    );
}

#[test]
fn nested_beta_model_check() {
    // Data generated from a δ = 0 beta regression: the BBeta fit's δ̂ stays
    // near zero and its likelihood dominates the nested beta fit's.
    let truth = Coefficients::new(vec![0.8, 0.9], vec![1.4, -0.7], 0.1, 0.0).unwrap();
    let (model, _) = uniform_design(400, 8);
    let data = simulate(&model, &truth, 8);

    let full = fit(&data, &model, &FitOptions::default()).unwrap();
    let beta_only = fit(
        &data,
        &model,
        &FitOptions {
            fixed_delta: Some(0.0),
            fixed_rho: Some(0.1),
            ..FitOptions::default()
        },
    )
    .unwrap();

    assert!(
        full.loglik >= beta_only.loglik - 1e-6,
        "nested model outscored the full model: {} vs {}",
        full.loglik,
        beta_only.loglik
    );
    assert_eq!(beta_only.n_free_params, 4);
    assert_eq!(full.n_free_params, 6);
    // Near δ = 0 the pair (ρ, δ) is weakly identified (ρ drops out exactly
    // at δ = 0), so Wald intervals for δ̂ are unreliable there; "δ̂ near
    // zero" is asserted through the likelihood ratio instead: the two extra
    // parameters must not buy more than the χ²₂ 1% quantile.
    let lr = 2.0 * (full.loglik - beta_only.loglik);
    assert!(lr <= 9.21, "likelihood ratio {lr} rejects the true δ = 0 model");
}

#[test]
fn loglik_intercept_only_repeated_response() {
    // All responses equal: the log-likelihood is n times one density term.
    let n = 24;
    let model = RegressionModel::intercept_only(n).unwrap();
    let coef = Coefficients::new(vec![0.7], vec![0.4], 0.2, 0.9).unwrap();
    let data = vec![0.37; n];
    let ll = loglik(&data, &model, &coef).unwrap();
    let single = BBetaParams::new(0.7f64.exp(), 0.4f64.exp(), 0.2, 0.9)
        .unwrap()
        .ln_pdf(0.37);
    assert!(
        (ll - n as f64 * single).abs() <= 1e-10 * ll.abs(),
        "{ll} vs {}",
        n as f64 * single
    );
}

#[test]
fn mc_study_delta_zero_centers_on_zero() {
    let config = McConfig {
        true_coef: Coefficients::new(vec![0.8, 0.9], vec![1.4, -0.7], 0.1, 0.0).unwrap(),
        sample_sizes: vec![120],
        n_reps: 40,
        seed: 31,
        covariate_law: Default::default(),
        fixed_design: false,
    };
    let report = run_mc_study(&config).unwrap();
    let delta = report.sizes[0]
        .parameters
        .iter()
        .find(|p| p.parameter == "delta")
        .unwrap();
    let se_of_mean = delta.rmse / (config.n_reps as f64).sqrt();
    assert!(
        delta.bias.abs() <= 3.0 * se_of_mean + 1e-9,
        "bias {} vs 3·SE {}",
        delta.bias,
        3.0 * se_of_mean
    );
}

#[test]
fn envelope_covers_well_specified_data() {
    let truth = Coefficients::new(vec![1.8, 0.2], vec![1.8, -0.4], 0.1, 2.0).unwrap();
    let (model, _) = uniform_design(100, 14);
    let data = simulate(&model, &truth, 14);
    let fit_result = fit(&data, &model, &FitOptions::default()).unwrap();
    let bands = halfnormal_envelope(&data, &model, &fit_result, 100, 5).unwrap();

    let inside = bands
        .sorted_abs_residuals
        .iter()
        .zip(bands.lower.iter().zip(&bands.upper))
        .filter(|(obs, (lo, up))| **obs >= **lo - 1e-12 && **obs <= **up + 1e-12)
        .count();
    assert!(
        inside * 10 >= bands.sorted_abs_residuals.len() * 9,
        "only {inside}/{} order statistics inside the bands",
        bands.sorted_abs_residuals.len()
    );

    // Bands widen toward the largest order statistics.
    let n = bands.lower.len();
    let width = |j: usize| bands.upper[j] - bands.lower[j];
    let head: f64 = (0..n / 10).map(width).sum::<f64>() / (n / 10) as f64;
    let tail: f64 = (n - n / 10..n).map(width).sum::<f64>() / (n / 10) as f64;
    assert!(
        tail > head,
        "band width does not widen: head {head}, tail {tail}"
    );
}
