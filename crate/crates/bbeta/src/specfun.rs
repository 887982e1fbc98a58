//! Special-function kernel: log-gamma, beta, incomplete beta, digamma and
//! standard-normal CDF/quantile.
//!
//! Every routine is a pure function of its arguments and safe to call from
//! any number of threads. Accuracy targets:
//!
//! - `log_gamma`: absolute error ≤ 1e-12 wherever |ln Γ(x)| is of order one,
//!   relative error ≤ 1e-13 elsewhere on [1e-3, 1e6]
//! - `inc_beta_lower` / `reg_inc_beta`: relative error ≤ 1e-12
//! - `digamma`: absolute error ≤ 1e-10
//! - `std_normal_quantile`: absolute error ≤ 1e-9

// Published approximation constants keep their canonical printed digits
// even where f64 rounds the tail.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};

/// Tolerance and iteration budget for the iterative kernels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AccuracySpec {
    pub abs_tol: f64,
    pub max_iter: usize,
}

impl AccuracySpec {
    pub fn new(abs_tol: f64, max_iter: usize) -> Result<Self> {
        if !abs_tol.is_finite() || abs_tol <= 0.0 {
            return Err(Error::domain("AccuracySpec::new", "abs_tol must be > 0"));
        }
        if max_iter == 0 {
            return Err(Error::domain("AccuracySpec::new", "max_iter must be ≥ 1"));
        }
        Ok(Self { abs_tol, max_iter })
    }
}

impl Default for AccuracySpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            max_iter: 300,
        }
    }
}

// Lanczos approximation, g = 7, 9 coefficients. Gives close to full f64
// precision for real positive arguments.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

const LN_SQRT_TWO_PI: f64 = 0.918_938_533_204_672_74;
const LN_PI: f64 = 1.144_729_885_849_400_2;

/// Natural log of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(
            "log_gamma",
            format!("argument must be a positive finite real, got {x}"),
        ));
    }
    Ok(log_gamma_unchecked(x))
}

pub(crate) fn log_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Reflection: ln Γ(x) = ln π − ln sin(πx) − ln Γ(1 − x).
        LN_PI - (std::f64::consts::PI * x).sin().ln() - log_gamma_unchecked(1.0 - x)
    } else {
        let z = x - 1.0;
        let mut sum = LANCZOS_COEF[0];
        for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
            sum += c / (z + i as f64);
        }
        let base = z + LANCZOS_G + 0.5;
        LN_SQRT_TWO_PI + (z + 0.5) * base.ln() - base + sum.ln()
    }
}

/// Beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b) for `a, b > 0`.
pub fn beta_fn(a: f64, b: f64) -> Result<f64> {
    Ok(ln_beta(a, b)?.exp())
}

/// Natural log of the beta function.
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 || !b.is_finite() || b <= 0.0 {
        return Err(Error::domain(
            "ln_beta",
            format!("arguments must be positive finite reals, got ({a}, {b})"),
        ));
    }
    Ok(ln_beta_unchecked(a, b))
}

pub(crate) fn ln_beta_unchecked(a: f64, b: f64) -> f64 {
    log_gamma_unchecked(a) + log_gamma_unchecked(b) - log_gamma_unchecked(a + b)
}

/// Lower incomplete beta function B_x(a, b) = ∫₀ˣ t^{a−1}(1−t)^{b−1} dt.
pub fn inc_beta_lower(x: f64, a: f64, b: f64) -> Result<f64> {
    Ok(reg_inc_beta(x, a, b)? * ln_beta_unchecked(a, b).exp())
}

/// Regularized incomplete beta function I_x(a, b) = B_x(a, b) / B(a, b).
pub fn reg_inc_beta(x: f64, a: f64, b: f64) -> Result<f64> {
    reg_inc_beta_with(x, a, b, &AccuracySpec::default())
}

/// `reg_inc_beta` under an explicit accuracy budget.
pub fn reg_inc_beta_with(x: f64, a: f64, b: f64, spec: &AccuracySpec) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 || !b.is_finite() || b <= 0.0 {
        return Err(Error::domain(
            "reg_inc_beta",
            format!("shape parameters must be positive, got ({a}, {b})"),
        ));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(
            "reg_inc_beta",
            format!("x must lie in [0, 1], got {x}"),
        ));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }

    // Prefactor x^a (1−x)^b / B(a, b), evaluated in log space; ln(1−x) as
    // ln_1p(−x) to keep precision near x = 0.
    let ln_front = a * x.ln() + b * (-x).ln_1p() - ln_beta_unchecked(a, b);

    // The continued fraction converges fastest for x below the switch point;
    // otherwise use I_x(a,b) = 1 − I_{1−x}(b,a).
    let value = if x < (a + 1.0) / (a + b + 2.0) {
        ln_front.exp() * beta_cont_frac(x, a, b, spec)? / a
    } else {
        1.0 - ln_front.exp() * beta_cont_frac(1.0 - x, b, a, spec)? / b
    };
    Ok(value.clamp(0.0, 1.0))
}

// Modified Lentz evaluation of the incomplete-beta continued fraction.
fn beta_cont_frac(x: f64, a: f64, b: f64, spec: &AccuracySpec) -> Result<f64> {
    const TINY: f64 = 1e-300;
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;

    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < TINY {
        d = TINY;
    }
    d = 1.0 / d;
    let mut h = d;

    for m in 1..=spec.max_iter {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;

        let num = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        h *= d * c;

        let num = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + num * d;
        if d.abs() < TINY {
            d = TINY;
        }
        c = 1.0 + num / c;
        if c.abs() < TINY {
            c = TINY;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;

        if (del - 1.0).abs() < spec.abs_tol.max(f64::EPSILON) {
            return Ok(h);
        }
    }
    Err(Error::NonConvergence {
        function: "reg_inc_beta",
        max_iter: spec.max_iter,
    })
}

/// Digamma function ψ(x) = Γ′(x)/Γ(x) for `x > 0`.
pub fn digamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::domain(
            "digamma",
            format!("argument must be a positive finite real, got {x}"),
        ));
    }
    Ok(digamma_unchecked(x))
}

pub(crate) fn digamma_unchecked(x: f64) -> f64 {
    // Shift upward with ψ(x) = ψ(x+1) − 1/x until the asymptotic series
    // applies, then expand in inverse powers of x.
    let mut result = 0.0;
    let mut z = x;
    while z < 10.0 {
        result -= 1.0 / z;
        z += 1.0;
    }
    let inv = 1.0 / z;
    let inv2 = inv * inv;
    // Bernoulli-number coefficients B_{2n}/(2n) for the tail.
    let tail = inv2
        * (1.0 / 12.0
            - inv2
                * (1.0 / 120.0
                    - inv2
                        * (1.0 / 252.0
                            - inv2 * (1.0 / 240.0 - inv2 * (1.0 / 132.0 - inv2 * 691.0 / 32760.0)))));
    result + z.ln() - 0.5 * inv - tail
}

/// Standard normal CDF Φ(z).
pub fn std_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

// Complementary error function after W. J. Cody's rational Chebyshev
// approximations (netlib SPECFUN "calerf"). Relative error stays below
// ~1e-16 on each fitted interval.
fn erfc(x: f64) -> f64 {
    let ax = x.abs();
    let value = if ax <= 0.46875 {
        return 1.0 - erf_small(x);
    } else if ax <= 4.0 {
        erfc_mid(ax)
    } else {
        erfc_large(ax)
    };
    if x < 0.0 {
        2.0 - value
    } else {
        value
    }
}

fn erf_small(x: f64) -> f64 {
    // |x| ≤ 0.46875
    const A: [f64; 5] = [
        3.161_123_743_870_565_6,
        1.138_641_541_510_501_6e2,
        3.774_852_376_853_020_2e2,
        3.209_377_589_138_469_5e3,
        1.857_777_061_846_031_5e-1,
    ];
    const B: [f64; 4] = [
        2.360_129_095_234_412_1e1,
        2.440_246_379_344_441_7e2,
        1.282_616_526_077_372_3e3,
        2.844_236_833_439_170_6e3,
    ];
    let z = x * x;
    let mut num = A[4] * z;
    let mut den = z;
    for i in 0..3 {
        num = (num + A[i]) * z;
        den = (den + B[i]) * z;
    }
    x * (num + A[3]) / (den + B[3])
}

fn erfc_mid(x: f64) -> f64 {
    // 0.46875 < x ≤ 4
    const C: [f64; 9] = [
        5.641_884_969_886_700_9e-1,
        8.883_149_794_388_375_9,
        6.611_919_063_714_163e1,
        2.986_351_381_974_001_3e2,
        8.819_522_212_417_690_9e2,
        1.712_047_612_634_070_6e3,
        2.051_078_377_826_071_5e3,
        1.230_339_354_797_997_2e3,
        2.153_115_354_744_038_5e-8,
    ];
    const D: [f64; 8] = [
        1.574_492_611_070_983_5e1,
        1.176_939_508_913_125e2,
        5.371_811_018_620_098_6e2,
        1.621_389_574_566_690_2e3,
        3.290_799_235_733_459_7e3,
        4.362_619_090_143_247e3,
        3.439_367_674_143_721_6e3,
        1.230_339_354_803_749_4e3,
    ];
    let mut num = C[8] * x;
    let mut den = x;
    for i in 0..7 {
        num = (num + C[i]) * x;
        den = (den + D[i]) * x;
    }
    let ratio = (num + C[7]) / (den + D[7]);
    let z = (x * 16.0).trunc() / 16.0;
    let del = (x - z) * (x + z);
    (-z * z).exp() * (-del).exp() * ratio
}

fn erfc_large(x: f64) -> f64 {
    // x > 4
    const P: [f64; 6] = [
        3.053_266_349_612_323_4e-1,
        3.603_448_999_498_044_4e-1,
        1.257_817_261_112_292_5e-1,
        1.608_378_514_874_227_7e-2,
        6.587_491_615_298_378e-4,
        1.631_538_713_730_209_8e-2,
    ];
    const Q: [f64; 5] = [
        2.568_520_192_289_822_4,
        1.872_952_849_923_460_4,
        5.279_051_029_514_284_1e-1,
        6.051_834_131_244_131_9e-2,
        2.335_204_976_268_691_8e-3,
    ];
    const SQRT_PI_INV: f64 = 5.641_895_835_477_562_9e-1;
    if x > 26.5 {
        return 0.0;
    }
    let z = 1.0 / (x * x);
    let mut num = P[5] * z;
    let mut den = z;
    for i in 0..4 {
        num = (num + P[i]) * z;
        den = (den + Q[i]) * z;
    }
    let ratio = z * (num + P[4]) / (den + Q[4]);
    let tail = (SQRT_PI_INV - ratio) / x;
    let zt = (x * 16.0).trunc() / 16.0;
    let del = (x - zt) * (x + zt);
    (-zt * zt).exp() * (-del).exp() * tail
}

/// Standard normal quantile Φ⁻¹(p) for `p ∈ (0, 1)`.
///
/// Wichura's PPND16 rational approximations; absolute error well below the
/// 1e-9 contract, odd symmetry Φ⁻¹(1−p) = −Φ⁻¹(p) by construction.
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(
            "std_normal_quantile",
            format!("p must lie strictly inside (0, 1), got {p}"),
        ));
    }

    const A: [f64; 8] = [
        3.387_132_872_796_366_5,
        1.331_416_678_917_843_8e2,
        1.971_590_950_306_551_3e3,
        1.373_169_376_550_946_1e4,
        4.592_195_393_154_987e4,
        6.726_577_092_700_87e4,
        3.343_057_558_358_813e4,
        2.509_080_928_730_122_7e3,
    ];
    const B: [f64; 8] = [
        1.0,
        4.231_333_070_160_091e1,
        6.871_870_074_920_579e2,
        5.394_196_021_424_751e3,
        2.121_379_430_158_659_7e4,
        3.930_789_580_009_271e4,
        2.872_908_573_572_194_3e4,
        5.226_495_278_852_545_4e3,
    ];
    const C: [f64; 8] = [
        1.423_437_110_749_683_5,
        4.630_337_846_156_546,
        5.769_497_221_460_691,
        3.647_848_324_763_204_5,
        1.270_458_252_452_368_4,
        2.417_807_251_774_506e-1,
        2.272_384_498_926_918_4e-2,
        7.745_450_142_783_414e-4,
    ];
    const D: [f64; 8] = [
        1.0,
        2.053_191_626_637_759,
        1.676_384_830_183_803_8,
        6.897_673_349_851e-1,
        1.481_039_764_274_800_8e-1,
        1.519_866_656_361_645_7e-2,
        5.475_938_084_995_345e-4,
        1.050_750_071_644_416_9e-9,
    ];
    const E: [f64; 8] = [
        6.657_904_643_501_103,
        5.463_784_911_164_114,
        1.784_826_539_917_291_3,
        2.965_605_718_285_048_7e-1,
        2.653_218_952_657_612_4e-2,
        1.242_660_947_388_078_4e-3,
        2.711_555_568_743_487_6e-5,
        2.010_334_399_292_288_1e-7,
    ];
    const F: [f64; 8] = [
        1.0,
        5.998_322_065_558_88e-1,
        1.369_298_809_227_358e-1,
        1.487_536_129_085_061_5e-2,
        7.868_691_311_456_133e-4,
        1.846_318_317_510_054_8e-5,
        1.421_511_758_316_446e-7,
        2.044_263_103_389_939_7e-15,
    ];

    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180_625 - q * q;
        return Ok(q * poly(&A, r) / poly(&B, r));
    }

    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let value = if r <= 5.0 {
        r -= 1.6;
        poly(&C, r) / poly(&D, r)
    } else {
        r -= 5.0;
        poly(&E, r) / poly(&F, r)
    };
    Ok(if q < 0.0 { -value } else { value })
}

fn poly(coef: &[f64; 8], x: f64) -> f64 {
    coef.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}
