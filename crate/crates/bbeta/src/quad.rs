//! Adaptive Gauss–Kronrod quadrature.
//!
//! A (G7, K15) pair drives globally adaptive bisection: the segment with the
//! largest error estimate is split until the summed estimate meets the
//! tolerance. [`integrate_unit`] additionally applies power substitutions
//! near 0 and 1 so integrands with x^s or (1−x)^s endpoint singularities
//! (s > −1) become bounded before the rule sees them.

// Tabulated quadrature nodes and weights keep their canonical digits.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

// 15-point Kronrod abscissae (positive half) and weights, with the embedded
// 7-point Gauss weights. Standard QUADPACK constants.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_93,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_94,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);

    let fc = f(center);
    let mut result_gauss = WG[3] * fc;
    let mut result_kronrod = WGK[7] * fc;

    for (j, (&x, &wk)) in XGK.iter().zip(WGK.iter()).enumerate().take(7) {
        let dx = half * x;
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let sum = f1 + f2;
        result_kronrod += wk * sum;
        if j % 2 == 1 {
            result_gauss += WG[j / 2] * sum;
        }
    }

    let value = result_kronrod * half;
    // |K15 − G7| estimates the Gauss error and overstates the Kronrod error,
    // which keeps the subdivision conservative.
    let error = ((result_kronrod - result_gauss) * half).abs();
    (value, error)
}

/// Integrate `f` over `[a, b]` to absolute tolerance `abs_tol` or relative
/// tolerance `rel_tol`, whichever is looser.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> Result<f64> {
    const MAX_SEGMENTS: usize = 2048;
    if !(a.is_finite() && b.is_finite()) || a >= b {
        return Err(Error::domain("quad::integrate", "need finite a < b"));
    }

    let (value, error) = kronrod(&f, a, b);
    let mut segments = vec![Segment { a, b, value, error }];
    let mut total: f64 = value;
    let mut total_err: f64 = error;

    while total_err > abs_tol.max(rel_tol * total.abs()) && segments.len() < MAX_SEGMENTS {
        // Split the segment with the largest error estimate.
        let (worst, _) = segments
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .expect("non-empty segment list");
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.a + seg.b);
        if !(seg.a < mid && mid < seg.b) {
            // Interval no longer splittable in f64; keep its estimate.
            segments.push(seg);
            break;
        }
        let (lv, le) = kronrod(&f, seg.a, mid);
        let (rv, re) = kronrod(&f, mid, seg.b);
        segments.push(Segment {
            a: seg.a,
            b: mid,
            value: lv,
            error: le,
        });
        segments.push(Segment {
            a: mid,
            b: seg.b,
            value: rv,
            error: re,
        });
        total = segments.iter().map(|s| s.value).sum();
        total_err = segments.iter().map(|s| s.error).sum();
    }

    if !total.is_finite() {
        return Err(Error::domain(
            "quad::integrate",
            "integrand produced a non-finite value",
        ));
    }
    Ok(total)
}

/// Integrate over `[0, 1]` where the integrand behaves like x^`pow0` near 0
/// and (1−x)^`pow1` near 1 (both exponents > −1).
///
/// The closure receives `(x, 1−x)` with whichever coordinate is small passed
/// exactly, so tail factors such as (1−x)^{β−1} never lose precision to the
/// subtraction. A substitution x = t^k with k(1 + pow) ≥ 1.5 removes each
/// integrable singularity with margin to spare, so even an extra logarithmic
/// factor in the integrand stays bounded; the smooth middle is integrated
/// directly.
pub fn integrate_unit<F: Fn(f64, f64) -> f64>(
    f: F,
    pow0: f64,
    pow1: f64,
    abs_tol: f64,
) -> Result<f64> {
    if pow0 <= -1.0 || pow1 <= -1.0 {
        return Err(Error::domain(
            "quad::integrate_unit",
            "endpoint exponents must exceed −1 for an integrable singularity",
        ));
    }
    let rel_tol = 1e-12;
    let half_tol = 0.5 * abs_tol;

    let left = if pow0 < 0.0 {
        let k = (1.5 / (1.0 + pow0)).ceil().max(2.0);
        // ∫₀^{1/2} f(x) dx = ∫₀^{(1/2)^{1/k}} f(t^k) k t^{k−1} dt
        let upper = 0.5f64.powf(1.0 / k);
        integrate(
            |t| {
                let x = t.powf(k);
                f(x, 1.0 - x) * k * t.powf(k - 1.0)
            },
            0.0,
            upper,
            half_tol,
            rel_tol,
        )?
    } else {
        integrate(|x| f(x, 1.0 - x), 0.0, 0.5, half_tol, rel_tol)?
    };

    // Mirror coordinates: u = 1 − x stays exact near the right endpoint.
    let right = if pow1 < 0.0 {
        let k = (1.5 / (1.0 + pow1)).ceil().max(2.0);
        let upper = 0.5f64.powf(1.0 / k);
        integrate(
            |t| {
                let u = t.powf(k);
                f(1.0 - u, u) * k * t.powf(k - 1.0)
            },
            0.0,
            upper,
            half_tol,
            rel_tol,
        )?
    } else {
        integrate(|u| f(1.0 - u, u), 0.0, 0.5, half_tol, rel_tol)?
    };

    Ok(left + right)
}
