//! Shared oracle machinery for the integration suites.
#![allow(dead_code)]
//!
//! The quadrature here is adaptive Simpson — deliberately a different
//! algorithm from the Gauss–Kronrod rule inside the crate — so closed-form
//! results are checked against an independent evaluation path.

/// Adaptive Simpson integration on [a, b].
pub fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fb, fm, whole, tol, 60)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fm: f64,
    whole: f64,
    tol: f64,
    depth: usize,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        left + right + delta / 15.0
    } else {
        simpson_step(f, a, m, fa, fm, flm, left, 0.5 * tol, depth - 1)
            + simpson_step(f, m, b, fm, fb, frm, right, 0.5 * tol, depth - 1)
    }
}

/// Integrate over [0, 1] with power substitutions x = t^k near endpoints
/// where the integrand behaves like x^pow0 and (1−x)^pow1. The closure
/// receives (x, 1 − x) with the small coordinate exact.
pub fn simpson_unit<F: Fn(f64, f64) -> f64>(f: &F, pow0: f64, pow1: f64, tol: f64) -> f64 {
    assert!(pow0 > -1.0 && pow1 > -1.0, "integrable singularities only");
    let half = 0.5 * tol;

    let left = if pow0 < 0.0 {
        let k = (2.0 / (1.0 + pow0)).ceil().max(2.0);
        let upper = 0.5f64.powf(1.0 / k);
        simpson(
            &|t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let x = t.powf(k);
                f(x, 1.0 - x) * k * t.powf(k - 1.0)
            },
            0.0,
            upper,
            half,
        )
    } else {
        simpson(&|x: f64| f(x, 1.0 - x), 0.0, 0.5, half)
    };

    let right = if pow1 < 0.0 {
        let k = (2.0 / (1.0 + pow1)).ceil().max(2.0);
        let upper = 0.5f64.powf(1.0 / k);
        simpson(
            &|t: f64| {
                if t <= 0.0 {
                    return 0.0;
                }
                let u = t.powf(k);
                f(1.0 - u, u) * k * t.powf(k - 1.0)
            },
            0.0,
            upper,
            half,
        )
    } else {
        simpson(&|u: f64| f(1.0 - u, u), 0.0, 0.5, half)
    };

    left + right
}

pub fn assert_close(got: f64, expect: f64, tol: f64, label: &str) {
    assert!(
        (got - expect).abs() <= tol,
        "{label}: got {got}, expected {expect} (|Δ| = {:.3e} > {tol:.3e})",
        (got - expect).abs()
    );
}

/// The parameter sets used for formula-vs-oracle sweeps: a spread over both
/// δ signs, ρ scales and shape regimes (≥ 20 sets).
pub fn oracle_parameter_sets() -> Vec<(f64, f64, f64, f64)> {
    vec![
        (6.0, 6.0, 0.1, 2.0),
        (2.0, 3.0, 0.0, -1.0),
        (2.0, 2.0, 0.0, 5.0),
        (1.0, 1.0, 0.0, 1.0),
        (3.0, 2.0, 0.5, 1.5),
        (5.0, 1.5, 1.0, -2.0),
        (2.5, 4.0, 0.2, 0.7),
        (8.0, 3.0, 0.05, 2.4),
        (4.0, 4.0, 1.0, -3.0),
        (2.0, 6.0, 5.0, 1.0),
        (7.0, 2.0, 0.3, -0.5),
        (3.5, 3.5, 0.0, -1.2),
        (2.2, 2.2, 0.15, 2.2),
        (10.0, 5.0, 0.8, 1.1),
        (6.0, 2.5, 2.0, -2.4),
        (2.8, 7.0, 0.4, 0.3),
        (9.0, 9.0, 0.1, 2.8),
        (3.0, 3.0, 0.0, 0.0),
        (4.5, 2.0, 1.5, 3.0),
        (2.0, 2.0, 0.9, -4.0),
        (5.5, 5.5, 0.25, 1.9),
        (3.3, 4.7, 0.6, -1.7),
    ]
}
