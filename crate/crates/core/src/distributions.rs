//! Parametric univariate input laws.
//!
//! A [`Distribution`] is an immutable value. JSON literals use a `kind` tag:
//!
//! ```json
//! {"kind":"uniform","a":-1,"b":3}
//! {"kind":"gamma","shape":8,"rate":1}
//! {"kind":"beta","alpha":2,"beta":2}
//! {"kind":"genbeta","alpha":2,"beta":5,"a":-0.5,"b":0.5}
//! {"kind":"gaussian","mu":0,"sigma":1}
//! {"kind":"point","value":0.3}
//! ```

use std::fmt;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad;
use crate::specfun::{self, gamma_ratio, ln_gamma_unchecked};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Literal {
    Uniform { a: f64, b: f64 },
    Gamma { shape: f64, rate: f64 },
    Beta { alpha: f64, beta: f64 },
    #[serde(rename = "genbeta")]
    GenBeta { alpha: f64, beta: f64, a: f64, b: f64 },
    Gaussian { mu: f64, sigma: f64 },
    Point { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Literal", into = "Literal")]
pub enum Distribution {
    Uniform { a: f64, b: f64 },
    Gamma { shape: f64, rate: f64 },
    Beta { alpha: f64, beta: f64 },
    /// Beta(alpha, beta) stretched onto `[a, b]`.
    GenBeta { alpha: f64, beta: f64, a: f64, b: f64 },
    Gaussian { mu: f64, sigma: f64 },
    /// Dirac mass; used for degenerate inputs.
    Point { value: f64 },
}

impl TryFrom<Literal> for Distribution {
    type Error = Error;

    fn try_from(lit: Literal) -> Result<Self> {
        let d = match lit {
            Literal::Uniform { a, b } => Distribution::Uniform { a, b },
            Literal::Gamma { shape, rate } => Distribution::Gamma { shape, rate },
            Literal::Beta { alpha, beta } => Distribution::Beta { alpha, beta },
            Literal::GenBeta { alpha, beta, a, b } => Distribution::GenBeta { alpha, beta, a, b },
            Literal::Gaussian { mu, sigma } => Distribution::Gaussian { mu, sigma },
            Literal::Point { value } => Distribution::Point { value },
        };
        d.validate()?;
        Ok(d)
    }
}

impl From<Distribution> for Literal {
    fn from(d: Distribution) -> Self {
        match d {
            Distribution::Uniform { a, b } => Literal::Uniform { a, b },
            Distribution::Gamma { shape, rate } => Literal::Gamma { shape, rate },
            Distribution::Beta { alpha, beta } => Literal::Beta { alpha, beta },
            Distribution::GenBeta { alpha, beta, a, b } => Literal::GenBeta { alpha, beta, a, b },
            Distribution::Gaussian { mu, sigma } => Literal::Gaussian { mu, sigma },
            Distribution::Point { value } => Literal::Point { value },
        }
    }
}

impl fmt::Display for Distribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Distribution::Uniform { a, b } => write!(f, "U({a}, {b})"),
            Distribution::Gamma { shape, rate } => write!(f, "Gamma({shape}, {rate})"),
            Distribution::Beta { alpha, beta } => write!(f, "Beta({alpha}, {beta})"),
            Distribution::GenBeta { alpha, beta, a, b } => {
                write!(f, "genBeta[{a}, {b}]({alpha}, {beta})")
            }
            Distribution::Gaussian { mu, sigma } => write!(f, "N({mu}, {sigma}^2)"),
            Distribution::Point { value } => write!(f, "δ({value})"),
        }
    }
}

fn binomial(n: u32, k: u32) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

/// `(k-1)!!` for even `k`, i.e. E[Z^k] of a standard normal.
pub(crate) fn normal_even_moment(k: u32) -> f64 {
    (1..k).step_by(2).map(|j| j as f64).product()
}

impl Distribution {
    pub fn uniform(a: f64, b: f64) -> Result<Self> {
        Self::checked(Distribution::Uniform { a, b })
    }

    pub fn gamma(shape: f64, rate: f64) -> Result<Self> {
        Self::checked(Distribution::Gamma { shape, rate })
    }

    pub fn beta(alpha: f64, beta: f64) -> Result<Self> {
        Self::checked(Distribution::Beta { alpha, beta })
    }

    pub fn gen_beta(alpha: f64, beta: f64, a: f64, b: f64) -> Result<Self> {
        Self::checked(Distribution::GenBeta { alpha, beta, a, b })
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        Self::checked(Distribution::Gaussian { mu, sigma })
    }

    pub fn point(value: f64) -> Result<Self> {
        Self::checked(Distribution::Point { value })
    }

    fn checked(d: Self) -> Result<Self> {
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distribution::Uniform { a, b } => a.is_finite() && b.is_finite() && a < b,
            Distribution::Gamma { shape, rate } => {
                shape > 0.0 && rate > 0.0 && shape.is_finite() && rate.is_finite()
            }
            Distribution::Beta { alpha, beta } => {
                alpha > 0.0 && beta > 0.0 && alpha.is_finite() && beta.is_finite()
            }
            Distribution::GenBeta { alpha, beta, a, b } => {
                alpha > 0.0
                    && beta > 0.0
                    && alpha.is_finite()
                    && beta.is_finite()
                    && a.is_finite()
                    && b.is_finite()
                    && a < b
            }
            Distribution::Gaussian { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
            Distribution::Point { value } => value.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::domain("distribution", format!("invalid parameters {self}")))
        }
    }

    /// Closed support `[lo, hi]`; `hi` may be infinite.
    pub fn support(&self) -> (f64, f64) {
        match *self {
            Distribution::Uniform { a, b } | Distribution::GenBeta { a, b, .. } => (a, b),
            Distribution::Gamma { .. } => (0.0, f64::INFINITY),
            Distribution::Beta { .. } => (0.0, 1.0),
            Distribution::Gaussian { .. } => (f64::NEG_INFINITY, f64::INFINITY),
            Distribution::Point { value } => (value, value),
        }
    }

    /// True when the law puts no mass on negative values.
    pub fn is_nonnegative(&self) -> bool {
        self.support().0 >= 0.0
    }

    pub fn pdf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => {
                if (a..=b).contains(&x) {
                    1.0 / (b - a)
                } else {
                    0.0
                }
            }
            Distribution::Gamma { shape, rate } => {
                if x < 0.0 {
                    0.0
                } else if x == 0.0 {
                    match shape.partial_cmp(&1.0) {
                        Some(std::cmp::Ordering::Less) => f64::INFINITY,
                        Some(std::cmp::Ordering::Equal) => rate,
                        _ => 0.0,
                    }
                } else {
                    (shape * rate.ln() + (shape - 1.0) * x.ln() - rate * x - ln_gamma_unchecked(shape))
                        .exp()
                }
            }
            Distribution::Beta { alpha, beta } => beta_pdf(alpha, beta, x),
            Distribution::GenBeta { alpha, beta, a, b } => {
                beta_pdf(alpha, beta, (x - a) / (b - a)) / (b - a)
            }
            Distribution::Gaussian { mu, sigma } => {
                let z = (x - mu) / sigma;
                (-0.5 * z * z).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
            }
            Distribution::Point { .. } => 0.0,
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => ((x - a) / (b - a)).clamp(0.0, 1.0),
            Distribution::Gamma { shape, rate } => {
                if x <= 0.0 {
                    0.0
                } else {
                    specfun::reg_inc_gamma(shape, rate * x).unwrap_or(1.0)
                }
            }
            Distribution::Beta { alpha, beta } => {
                specfun::reg_inc_beta(alpha, beta, x.clamp(0.0, 1.0)).unwrap_or(f64::NAN)
            }
            Distribution::GenBeta { alpha, beta, a, b } => {
                specfun::reg_inc_beta(alpha, beta, ((x - a) / (b - a)).clamp(0.0, 1.0))
                    .unwrap_or(f64::NAN)
            }
            Distribution::Gaussian { mu, sigma } => {
                0.5 * (1.0 + specfun::erf((x - mu) / (sigma * std::f64::consts::SQRT_2)))
            }
            Distribution::Point { value } => {
                if x >= value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Inverse CDF for `p` in (0, 1). Closed form for uniform and point
    /// laws, bisection on the CDF otherwise.
    pub fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain("quantile", format!("p = {p} outside (0, 1)")));
        }
        let (mut lo, mut hi) = match *self {
            Distribution::Uniform { a, b } => return Ok(a + p * (b - a)),
            Distribution::Point { value } => return Ok(value),
            Distribution::Gaussian { mu, sigma } => (mu - 40.0 * sigma, mu + 40.0 * sigma),
            Distribution::Gamma { .. } => {
                let mut hi = self.mean() + 10.0 * self.variance().sqrt();
                while self.cdf(hi) < p {
                    hi *= 2.0;
                }
                (0.0, hi)
            }
            Distribution::Beta { .. } | Distribution::GenBeta { .. } => self.support(),
        };
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.cdf(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi - lo <= 1e-12 * mid.abs().max(1e-3) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// E[X^n] in closed form.
    pub fn raw_moment(&self, n: u32) -> f64 {
        if n == 0 {
            return 1.0;
        }
        let nf = n as f64;
        match *self {
            Distribution::Uniform { a, b } => {
                (b.powi(n as i32 + 1) - a.powi(n as i32 + 1)) / ((nf + 1.0) * (b - a))
            }
            Distribution::Gamma { shape, rate } => {
                (0..n).map(|j| (shape + j as f64) / rate).product()
            }
            Distribution::Beta { alpha, beta } => beta_moment(alpha, beta, n),
            Distribution::GenBeta { alpha, beta, a, b } => (0..=n)
                .map(|k| {
                    binomial(n, k)
                        * a.powi((n - k) as i32)
                        * (b - a).powi(k as i32)
                        * beta_moment(alpha, beta, k)
                })
                .sum(),
            Distribution::Gaussian { mu, sigma } => (0..=n)
                .step_by(2)
                .map(|k| {
                    binomial(n, k) * mu.powi((n - k) as i32) * sigma.powi(k as i32) * normal_even_moment(k)
                })
                .sum(),
            Distribution::Point { value } => value.powi(n as i32),
        }
    }

    /// E[X^m] for any integer order, including negative orders of a.s.
    /// positive laws.
    pub fn signed_moment(&self, m: i64) -> Result<f64> {
        if m >= 0 {
            return Ok(self.raw_moment(m as u32));
        }
        let mf = m as f64;
        let missing = |detail: String| Error::Existence { order: m, detail };
        match *self {
            Distribution::Gamma { shape, rate } => {
                if shape + mf <= 0.0 {
                    return Err(missing(format!("E[X^{m}] diverges for {self}")));
                }
                Ok(gamma_ratio(shape + mf, shape) * rate.powf(-mf))
            }
            Distribution::Beta { alpha, beta } => {
                if alpha + mf <= 0.0 {
                    return Err(missing(format!("E[X^{m}] diverges for {self}")));
                }
                Ok(gamma_ratio(alpha + mf, alpha) / gamma_ratio(alpha + beta + mf, alpha + beta))
            }
            Distribution::Uniform { a, b } => {
                if a < 0.0 {
                    return Err(self.sign_indefinite("signed_moment"));
                }
                if a == 0.0 {
                    return Err(missing(format!("E[X^{m}] diverges for {self}")));
                }
                if m == -1 {
                    Ok((b / a).ln() / (b - a))
                } else {
                    Ok((b.powf(mf + 1.0) - a.powf(mf + 1.0)) / ((mf + 1.0) * (b - a)))
                }
            }
            Distribution::GenBeta { alpha, beta, a, b } => {
                if a < 0.0 {
                    return Err(self.sign_indefinite("signed_moment"));
                }
                if a == 0.0 {
                    let inner = Distribution::Beta { alpha, beta }.signed_moment(m)?;
                    return Ok(b.powf(mf) * inner);
                }
                quad::integrate(|x| self.pdf(x) * x.powf(mf), a, b)
            }
            Distribution::Point { value } => {
                if value > 0.0 {
                    Ok(value.powf(mf))
                } else {
                    Err(missing(format!("E[X^{m}] of point mass at {value}")))
                }
            }
            Distribution::Gaussian { .. } => Err(self.sign_indefinite("signed_moment")),
        }
    }

    fn sign_indefinite(&self, op: &'static str) -> Error {
        Error::Unsupported {
            op,
            detail: format!("{self} is not almost surely positive; decompose by sign first"),
        }
    }

    /// Mellin transform `E[X^(s-1)]` at integer `s >= 1`.
    pub fn mellin(&self, s: i64) -> Result<f64> {
        if s < 1 {
            return Err(Error::domain("mellin", format!("s = {s} must be >= 1")));
        }
        let positive = match *self {
            Distribution::Point { value } => value > 0.0,
            Distribution::Gaussian { .. } => false,
            _ => self.is_nonnegative(),
        };
        if !positive {
            return Err(self.sign_indefinite("mellin"));
        }
        Ok(self.raw_moment((s - 1) as u32))
    }

    pub fn mean(&self) -> f64 {
        self.raw_moment(1)
    }

    pub fn variance(&self) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => (b - a).powi(2) / 12.0,
            Distribution::Gamma { shape, rate } => shape / (rate * rate),
            Distribution::Beta { alpha, beta } => beta_variance(alpha, beta),
            Distribution::GenBeta { alpha, beta, a, b } => beta_variance(alpha, beta) * (b - a).powi(2),
            Distribution::Gaussian { sigma, .. } => sigma * sigma,
            Distribution::Point { .. } => 0.0,
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            Distribution::Uniform { a, b } => a + (b - a) * rng.random::<f64>(),
            Distribution::Gamma { shape, rate } => sample_gamma(rng, shape) / rate,
            Distribution::Beta { alpha, beta } => sample_beta(rng, alpha, beta),
            Distribution::GenBeta { alpha, beta, a, b } => a + (b - a) * sample_beta(rng, alpha, beta),
            Distribution::Gaussian { mu, sigma } => {
                let z: f64 = rng.sample(StandardNormal);
                mu + sigma * z
            }
            Distribution::Point { value } => value,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, n: usize) -> Vec<f64> {
        (0..n).map(|_| self.sample_one(rng)).collect()
    }
}

fn beta_pdf(alpha: f64, beta: f64, u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    if (u == 0.0 && alpha < 1.0) || (u == 1.0 && beta < 1.0) {
        return f64::INFINITY;
    }
    if (u == 0.0 && alpha > 1.0) || (u == 1.0 && beta > 1.0) {
        return 0.0;
    }
    let ln_b = ln_gamma_unchecked(alpha) + ln_gamma_unchecked(beta) - ln_gamma_unchecked(alpha + beta);
    let la = if alpha == 1.0 { 0.0 } else { (alpha - 1.0) * u.ln() };
    let lb = if beta == 1.0 { 0.0 } else { (beta - 1.0) * (1.0 - u).ln() };
    (la + lb - ln_b).exp()
}

fn beta_moment(alpha: f64, beta: f64, n: u32) -> f64 {
    (0..n)
        .map(|j| (alpha + j as f64) / (alpha + beta + j as f64))
        .product()
}

fn beta_variance(alpha: f64, beta: f64) -> f64 {
    let s = alpha + beta;
    alpha * beta / (s * s * (s + 1.0))
}

/// Marsaglia–Tsang squeeze sampler for Gamma(shape, 1).
fn sample_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64) -> f64 {
    if shape < 1.0 {
        // boost: G(a) = G(a+1) U^(1/a)
        let u: f64 = rng.random();
        return sample_gamma(rng, shape + 1.0) * u.powf(1.0 / shape);
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let x: f64 = rng.sample(StandardNormal);
        let v = 1.0 + c * x;
        if v <= 0.0 {
            continue;
        }
        let v = v * v * v;
        let u: f64 = rng.random();
        let x2 = x * x;
        if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
            return d * v;
        }
    }
}

fn sample_beta<R: Rng + ?Sized>(rng: &mut R, alpha: f64, beta: f64) -> f64 {
    let x = sample_gamma(rng, alpha);
    let y = sample_gamma(rng, beta);
    x / (x + y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn all() -> Vec<Distribution> {
        vec![
            Distribution::uniform(-1.0, 3.0).unwrap(),
            Distribution::gamma(3.0, 1.0).unwrap(),
            Distribution::gamma(0.6, 2.0).unwrap(),
            Distribution::beta(2.0, 5.0).unwrap(),
            Distribution::beta(0.7, 0.8).unwrap(),
            Distribution::gen_beta(2.0, 5.0, -0.5, 0.5).unwrap(),
            Distribution::gaussian(0.3, 1.7).unwrap(),
        ]
    }

    #[test]
    fn pdf_values() {
        let u = Distribution::uniform(-1.0, 3.0).unwrap();
        assert_eq!(u.pdf(0.0), 0.25);
        assert_eq!(u.pdf(3.5), 0.0);
        let g = Distribution::gamma(3.0, 1.0).unwrap();
        assert_relative_eq!(g.pdf(1.0), (-1.0f64).exp() / 2.0, max_relative = 1e-13);
        let b = Distribution::beta(2.0, 2.0).unwrap();
        assert_relative_eq!(b.pdf(0.5), 1.5, max_relative = 1e-13);
    }

    #[test]
    fn cdf_and_quantile_values() {
        assert_relative_eq!(Distribution::uniform(0.0, 1.0).unwrap().cdf(0.3), 0.3);
        let g = Distribution::gamma(3.0, 1.0).unwrap();
        assert!((g.cdf(3.0) - 0.576_809_918_9).abs() < 1e-10);
        let b = Distribution::beta(2.0, 2.0).unwrap();
        assert!((b.quantile(0.5).unwrap() - 0.5).abs() < 1e-12);
        assert!(b.quantile(0.0).is_err());
        assert!(b.quantile(1.0).is_err());
    }

    #[test]
    fn pdf_integrates_to_one() {
        for d in all() {
            let (lo, hi) = d.support();
            let v = match d {
                Distribution::Gaussian { mu, sigma } => {
                    quad::integrate(|x| d.pdf(x), mu - 40.0 * sigma, mu + 40.0 * sigma).unwrap()
                }
                _ => quad::integrate(|x| d.pdf(x), lo, hi).unwrap(),
            };
            assert!((v - 1.0).abs() < 1e-8, "{d}: {v}");
        }
    }

    #[test]
    fn quantile_inverts_cdf() {
        for d in all() {
            for p in [0.01, 0.2, 0.5, 0.77, 0.99] {
                let x = d.quantile(p).unwrap();
                assert!((d.cdf(x) - p).abs() < 1e-9, "{d} p={p}");
                let x2 = d.quantile(d.cdf(x)).unwrap();
                assert!((x2 - x).abs() < 1e-8, "{d} x={x}");
            }
        }
    }

    #[test]
    fn raw_moments() {
        let u = Distribution::uniform(0.0, 1.0).unwrap();
        for n in 1..8 {
            assert_relative_eq!(u.raw_moment(n), 1.0 / (n as f64 + 1.0), max_relative = 1e-14);
        }
        assert_relative_eq!(Distribution::gamma(8.0, 1.0).unwrap().raw_moment(1), 8.0);
        let b = Distribution::beta(2.0, 5.0).unwrap();
        assert_relative_eq!(b.raw_moment(2), 3.0 / 28.0, max_relative = 1e-14);
        let q = quad::integrate(|x| x * x * b.pdf(x), 0.0, 1.0).unwrap();
        assert_relative_eq!(b.raw_moment(2), q, max_relative = 1e-10);
    }

    #[test]
    fn moments_match_quadrature() {
        for d in all() {
            let (lo, hi) = match d {
                Distribution::Gaussian { mu, sigma } => (mu - 40.0 * sigma, mu + 40.0 * sigma),
                _ => d.support(),
            };
            for n in 1..6 {
                let q = quad::integrate(|x| x.powi(n as i32) * d.pdf(x), lo, hi).unwrap();
                assert!((d.raw_moment(n) - q).abs() < 1e-8 * q.abs().max(1.0), "{d} n={n}");
            }
        }
    }

    #[test]
    fn mellin_values() {
        assert_relative_eq!(Distribution::uniform(0.0, 1.0).unwrap().mellin(3).unwrap(), 1.0 / 3.0);
        assert_relative_eq!(Distribution::gamma(3.0, 1.0).unwrap().mellin(2).unwrap(), 3.0);
        assert_relative_eq!(Distribution::beta(2.0, 2.0).unwrap().mellin(2).unwrap(), 0.5);
        assert!(Distribution::uniform(-1.0, 3.0).unwrap().mellin(2).is_err());
        assert!(Distribution::gaussian(5.0, 1.0).unwrap().mellin(2).is_err());
        assert!(Distribution::beta(2.0, 2.0).unwrap().mellin(0).is_err());
    }

    #[test]
    fn mellin_matches_shifted_moment() {
        let ds = [
            Distribution::uniform(0.0, 2.0).unwrap(),
            Distribution::gamma(2.5, 1.5).unwrap(),
            Distribution::beta(2.0, 5.0).unwrap(),
            Distribution::gen_beta(2.0, 3.0, 0.5, 1.5).unwrap(),
        ];
        for d in ds {
            for s in 1..=10 {
                let m = d.mellin(s).unwrap();
                let r = d.raw_moment((s - 1) as u32);
                assert!((m - r).abs() <= 1e-10 * r.abs());
            }
        }
    }

    #[test]
    fn negative_moments() {
        let g = Distribution::gamma(8.0, 1.0).unwrap();
        assert_relative_eq!(g.signed_moment(-1).unwrap(), 1.0 / 7.0, max_relative = 1e-13);
        assert!(g.signed_moment(-8).is_err());
        let gb = Distribution::gen_beta(2.0, 3.0, 0.5, 1.5).unwrap();
        let q = quad::integrate(|x| gb.pdf(x) / (x * x), 0.5, 1.5).unwrap();
        assert_relative_eq!(gb.signed_moment(-2).unwrap(), q, max_relative = 1e-10);
        let u = Distribution::uniform(1.0, 2.0).unwrap();
        assert_relative_eq!(u.signed_moment(-1).unwrap(), 2f64.ln(), max_relative = 1e-14);
    }

    #[test]
    fn genbeta_is_affine_pushforward() {
        let (a, b) = (-0.5, 0.5);
        let gb = Distribution::gen_beta(2.0, 5.0, a, b).unwrap();
        let base = Distribution::beta(2.0, 5.0).unwrap();
        for i in 1..50 {
            let u = i as f64 / 50.0;
            let x = a + (b - a) * u;
            assert!((gb.pdf(x) - base.pdf(u) / (b - a)).abs() < 1e-12);
        }
    }

    #[test]
    fn json_literals() {
        let g: Distribution = serde_json::from_str(r#"{"kind":"gamma","shape":8,"rate":1}"#).unwrap();
        assert_eq!(g, Distribution::gamma(8.0, 1.0).unwrap());
        let gb: Distribution =
            serde_json::from_str(r#"{"kind":"genbeta","alpha":2,"beta":5,"a":-0.5,"b":0.5}"#).unwrap();
        assert_eq!(gb, Distribution::gen_beta(2.0, 5.0, -0.5, 0.5).unwrap());
        let back: serde_json::Value = serde_json::to_value(gb).unwrap();
        assert_eq!(back["kind"], "genbeta");
        assert!(serde_json::from_str::<Distribution>(r#"{"kind":"uniform","a":2,"b":1}"#).is_err());
        assert!(serde_json::from_str::<Distribution>(r#"{"kind":"cauchy","x0":0}"#).is_err());
    }

    #[test]
    fn sample_means_within_clt_band() {
        let n = 1_000_000;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let cases = [
            (Distribution::uniform(0.0, 1.0).unwrap(), 0.5, (1.0f64 / 12.0).sqrt()),
            (Distribution::gamma(8.0, 1.0).unwrap(), 8.0, 8f64.sqrt()),
            (Distribution::beta(2.0, 5.0).unwrap(), 2.0 / 7.0, Distribution::beta(2.0, 5.0).unwrap().std_dev()),
        ];
        for (d, mean, sd) in cases {
            let xs = d.sample(&mut rng, n);
            let m = xs.iter().sum::<f64>() / n as f64;
            assert!((m - mean).abs() < 4.0 * sd / (n as f64).sqrt(), "{d}: {m}");
        }
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let d = Distribution::gamma(0.4, 1.0).unwrap();
        let a = d.sample(&mut ChaCha8Rng::seed_from_u64(3), 100);
        let b = d.sample(&mut ChaCha8Rng::seed_from_u64(3), 100);
        assert_eq!(a, b);
    }
}
