//! Special functions used throughout the crate.
//!
//! `erf` delegates to `libm` and the regularized incomplete beta/gamma
//! functions to `statrs`; this module owns their domain checks. `log_gamma` is a Lanczos
//! approximation and `bessel_k` integrates the representation
//! `K_nu(z) = ∫_0^∞ exp(-z cosh t) cosh(nu t) dt`.

use crate::error::{Error, Result};
use crate::quad::{integrate_pieces, Tolerance};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Natural logarithm of the gamma function for `x > 0`.
pub fn log_gamma(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("log_gamma", format!("x = {x} must be positive")));
    }
    Ok(ln_gamma_unchecked(x))
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // Γ(x) = Γ(x+1) / x keeps the series argument in its accurate range
        return ln_gamma_unchecked(x + 1.0) - x.ln();
    }
    let z = x - 1.0;
    let mut series = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        series += c / (z + i as f64);
    }
    let t = z + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (z + 0.5) * t.ln() - t + series.ln()
}

/// Ratio Γ(a) / Γ(b) evaluated in log space.
pub(crate) fn gamma_ratio(a: f64, b: f64) -> f64 {
    (ln_gamma_unchecked(a) - ln_gamma_unchecked(b)).exp()
}

pub fn erf(x: f64) -> f64 {
    if x < 0.0 {
        -libm::erf(-x)
    } else {
        libm::erf(x)
    }
}

/// Regularized incomplete beta function `I_x(a, b)`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::domain("reg_inc_beta", format!("a = {a}, b = {b}")));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain("reg_inc_beta", format!("x = {x} outside [0, 1]")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    Ok(statrs::function::beta::beta_reg(a, b, x).clamp(0.0, 1.0))
}

/// Lower regularized incomplete gamma function `P(a, x)`.
pub fn reg_inc_gamma(a: f64, x: f64) -> Result<f64> {
    if !(a > 0.0) || !(x >= 0.0) {
        return Err(Error::domain("reg_inc_gamma", format!("a = {a}, x = {x}")));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x.is_infinite() {
        return Ok(1.0);
    }
    Ok(statrs::function::gamma::gamma_lr(a, x).clamp(0.0, 1.0))
}

/// Modified Bessel function of the second kind, real order `nu`, `z > 0`.
pub fn bessel_k(nu: f64, z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::domain("bessel_k", format!("z = {z} must be positive")));
    }
    if !nu.is_finite() {
        return Err(Error::domain("bessel_k", format!("order {nu}")));
    }
    let nu = nu.abs();
    let phase = |t: f64| -z * t.cosh() + nu * t;
    // the integrand peaks where sinh t = nu / z
    let peak = (nu / z).asinh();
    let top = phase(peak);
    // walk out until the integrand is e^-60 below its peak
    let mut end = peak + 1.0;
    while phase(end) - top > -60.0 {
        end = end * 1.5 + 1.0;
    }
    let f = |t: f64| {
        let mut v = (phase(t) - top).exp();
        if nu > 0.0 {
            v *= 0.5 * (1.0 + (-2.0 * nu * t).exp());
        }
        v
    };
    let mut points = vec![0.0];
    if peak > 0.0 {
        points.push(peak);
    }
    points.push(end);
    let scaled = integrate_pieces(f, &points, Tolerance::new(1e-15, 1e-12))?;
    Ok(scaled * top.exp())
}
