//! Mellin-transform algebra of independent random factors and product
//! densities by Mellin convolution.
//!
//! All transforms are evaluated at integer `s`, where `M(ξ)(s) = E[ξ^(s-1)]`.
//! For a factor `η = a ξ^k`:
//!
//! ```text
//! M(η)(s) = a^(s-1) E[ξ^(k(s-1))]
//! ```
//!
//! and the transform of a product of independent factors is the product of
//! their transforms.

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::pce::PowerPolynomial;
use crate::quad::{integrate_pieces, Tolerance};
use crate::specfun::{bessel_k, ln_gamma_unchecked};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorBase {
    Distribution(Distribution),
    /// A polynomial in a germ, `p(ξ)`, typically from [`crate::pce`].
    Pce(PowerPolynomial),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MellinFactor {
    pub base: FactorBase,
    #[serde(default = "one_i64")]
    pub exponent: i64,
    #[serde(default = "one_f64")]
    pub scale: f64,
}

fn one_i64() -> i64 {
    1
}

fn one_f64() -> f64 {
    1.0
}

impl MellinFactor {
    pub fn new(base: FactorBase, exponent: i64, scale: f64) -> Result<Self> {
        let f = Self {
            base,
            exponent,
            scale,
        };
        f.validate()?;
        Ok(f)
    }

    pub fn dist(d: Distribution) -> Self {
        Self {
            base: FactorBase::Distribution(d),
            exponent: 1,
            scale: 1.0,
        }
    }

    pub fn pce(p: PowerPolynomial) -> Self {
        Self {
            base: FactorBase::Pce(p),
            exponent: 1,
            scale: 1.0,
        }
    }

    pub fn inverse(mut self) -> Self {
        self.exponent = -self.exponent;
        self
    }

    pub fn pow(mut self, k: i64) -> Self {
        self.exponent *= k;
        self
    }

    pub fn scaled(mut self, a: f64) -> Self {
        self.scale *= a;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::domain("mellin factor", format!("scale {} must be positive", self.scale)));
        }
        if self.exponent == 0 {
            return Err(Error::domain("mellin factor", "exponent must be nonzero"));
        }
        match &self.base {
            FactorBase::Distribution(d) => {
                d.validate()?;
                if self.exponent != 1 && !almost_surely_positive(d) {
                    return Err(Error::Unsupported {
                        op: "mellin factor",
                        detail: format!("{d} raised to {} is not a.s. positive", self.exponent),
                    });
                }
            }
            FactorBase::Pce(p) => {
                p.germ.validate()?;
                if self.exponent < 0 {
                    return Err(Error::Unsupported {
                        op: "mellin factor",
                        detail: "negative powers of a polynomial expansion have no cumulated-coefficient form"
                            .into(),
                    });
                }
            }
        }
        Ok(())
    }

    /// `M(scale · base^exponent)(s)`.
    pub fn mellin(&self, s: i64) -> Result<f64> {
        if s < 1 {
            return Err(Error::domain("mellin_eval", format!("s = {s} must be >= 1")));
        }
        self.validate()?;
        let order = self.exponent * (s - 1);
        let moment = match &self.base {
            // exponent 1 uses plain raw moments, valid for signed laws too
            FactorBase::Distribution(d) if self.exponent == 1 => d.raw_moment((s - 1) as u32),
            FactorBase::Distribution(d) => d.signed_moment(order)?,
            FactorBase::Pce(p) => p.mellin(order + 1)?,
        };
        Ok(self.scale.powi((s - 1) as i32) * moment)
    }
}

fn almost_surely_positive(d: &Distribution) -> bool {
    match *d {
        Distribution::Gaussian { .. } => false,
        Distribution::Point { value } => value > 0.0,
        _ => d.is_nonnegative(),
    }
}

/// `global_sign · Π factor_i` with mutually independent factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductExpression {
    pub factors: Vec<MellinFactor>,
    #[serde(default = "one_f64")]
    pub global_sign: f64,
}

impl ProductExpression {
    pub fn new(factors: Vec<MellinFactor>, global_sign: f64) -> Result<Self> {
        let e = Self { factors, global_sign };
        e.validate()?;
        Ok(e)
    }

    pub fn validate(&self) -> Result<()> {
        if self.global_sign != 1.0 && self.global_sign != -1.0 {
            return Err(Error::domain("product expression", format!("global sign {}", self.global_sign)));
        }
        if self.factors.is_empty() {
            return Err(Error::domain("product expression", "no factors"));
        }
        self.factors.iter().try_for_each(MellinFactor::validate)
    }

    pub fn has_pce(&self) -> bool {
        self.factors.iter().any(|f| matches!(f.base, FactorBase::Pce(_)))
    }
}

/// `E[(global_sign Π scale_i ξ_i^k_i)^(s-1)]`.
pub fn mellin_eval(e: &ProductExpression, s: i64) -> Result<f64> {
    e.validate()?;
    let mut value = e.global_sign.powi((s - 1) as i32);
    for f in &e.factors {
        value *= f.mellin(s)?;
    }
    Ok(value)
}

/// Density tabulated on a strictly increasing grid, linear in between.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePdf {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
}

impl PiecewisePdf {
    pub fn new(grid: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if grid.len() != values.len() || grid.len() < 2 {
            return Err(Error::domain("piecewise pdf", "grid and values need equal length >= 2"));
        }
        if grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::domain("piecewise pdf", "grid must be strictly increasing"));
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::domain("piecewise pdf", "values must be finite and nonnegative"));
        }
        Ok(Self { grid, values })
    }

    pub fn support(&self) -> (f64, f64) {
        (self.grid[0], *self.grid.last().unwrap())
    }

    /// Trapezoid integral over the grid.
    pub fn mass(&self) -> f64 {
        *self.cumulative().last().unwrap()
    }

    fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(self.grid.len());
        out.push(0.0);
        for i in 1..self.grid.len() {
            acc += 0.5 * (self.values[i] + self.values[i - 1]) * (self.grid[i] - self.grid[i - 1]);
            out.push(acc);
        }
        out
    }

    /// Trapezoid CDF at the grid points, renormalized to end at one.
    pub fn cdf_values(&self) -> Vec<f64> {
        let mut c = self.cumulative();
        let total = *c.last().unwrap();
        if total > 0.0 {
            c.iter_mut().for_each(|v| *v /= total);
        }
        c
    }

    pub fn eval(&self, x: f64) -> f64 {
        interpolate(&self.grid, &self.values, x, 0.0, 0.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        interpolate(&self.grid, &self.cdf_values(), x, 0.0, 1.0)
    }

    pub fn to_csv(&self) -> String {
        two_columns("density", &self.grid, &self.values)
    }

    pub fn cdf_csv(&self) -> String {
        two_columns("cumulative", &self.grid, &self.cdf_values())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::File::create(path)?.write_all(self.to_csv().as_bytes())?;
        Ok(())
    }

    pub fn write_cdf_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::File::create(path)?.write_all(self.cdf_csv().as_bytes())?;
        Ok(())
    }
}

fn interpolate(xs: &[f64], ys: &[f64], x: f64, below: f64, above: f64) -> f64 {
    if x < xs[0] {
        return below;
    }
    if x > *xs.last().unwrap() {
        return above;
    }
    let i = xs.partition_point(|&g| g <= x).clamp(1, xs.len() - 1);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

pub(crate) fn two_columns(name: &str, xs: &[f64], ys: &[f64]) -> String {
    let mut out = format!("x,{name}\n");
    for (x, y) in xs.iter().zip(ys) {
        let _ = writeln!(out, "{x:.12e},{y:.12e}");
    }
    out
}

/// Density of `f · g` at `y` for independent `f`, `g` with `g > 0` a.s.
///
/// `ρ(y) = ∫ ρ_f(y/x) ρ_g(x) dx/x`. When `f` has a negative part the result
/// is `h₁(y) + h₂(y)`, where `h₁` collects `f > 0` (only `y > 0`) and `h₂`
/// collects `f < 0` (only `y < 0`). The integral is taken in `t = ln x`.
pub fn product_density(f: &Distribution, g: &Distribution, y: f64) -> Result<f64> {
    if !almost_surely_positive(g) {
        return Err(Error::Unsupported {
            op: "product_pdf_convolution",
            detail: format!("second factor {g} must be a.s. positive"),
        });
    }
    if let Distribution::Point { value } = *g {
        return Ok(f.pdf(y / value) / value);
    }
    if let Distribution::Point { .. } = *f {
        return Err(Error::Unsupported {
            op: "product_pdf_convolution",
            detail: "first factor must have a density".into(),
        });
    }
    if y == 0.0 {
        // limit from the side that carries mass; continuous for the laws here
        let eps = 1e-9 * f.std_dev().max(1e-300) * g.mean();
        let (lo, hi) = f.support();
        let side = if hi > 0.0 { eps } else { -eps };
        return product_density(f, g, if lo < 0.0 && hi <= 0.0 { -eps } else { side });
    }
    let (f_lo, f_hi) = f.support();
    // range of x with y/x inside supp f
    let (mut x_lo, mut x_hi) = if y > 0.0 {
        if f_hi <= 0.0 {
            return Ok(0.0);
        }
        (y / f_hi, if f_lo > 0.0 { y / f_lo } else { f64::INFINITY })
    } else {
        if f_lo >= 0.0 {
            return Ok(0.0);
        }
        (y / f_lo, if f_hi < 0.0 { y / f_hi } else { f64::INFINITY })
    };
    let (g_lo, g_hi) = g.support();
    x_lo = x_lo.max(g_lo).max(tail_cut(g, true)?);
    x_hi = x_hi.min(g_hi).min(tail_cut(g, false)?);
    if !(x_hi > x_lo) {
        return Ok(0.0);
    }
    let (t_lo, t_hi) = (x_lo.ln(), x_hi.ln());
    let integrand = |t: f64| {
        let x = t.exp();
        let v = f.pdf(y / x) * g.pdf(x);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut points = vec![t_lo];
    for x in [g.mean(), y / f.mean()] {
        if x > 0.0 {
            let t = x.ln();
            if t > t_lo && t < t_hi {
                points.push(t);
            }
        }
    }
    points.push(t_hi);
    points.sort_by(f64::total_cmp);
    integrate_pieces(integrand, &points, Tolerance::new(1e-13, 1e-10))
}

/// Finite cut-off for an unbounded side of `g`, leaving < 1e-13 of its mass.
fn tail_cut(g: &Distribution, lower: bool) -> Result<f64> {
    let (lo, hi) = g.support();
    if lower {
        if lo > 0.0 {
            return Ok(lo);
        }
        Ok(g.quantile(1e-13)?.max(f64::MIN_POSITIVE))
    } else if hi.is_finite() {
        Ok(hi)
    } else {
        g.quantile(1.0 - 1e-13)
    }
}

/// Tabulates [`product_density`] on `grid`.
pub fn product_pdf_convolution(f: &Distribution, g: &Distribution, grid: &[f64]) -> Result<PiecewisePdf> {
    let values = grid
        .par_iter()
        .map(|&y| product_density(f, g, y))
        .collect::<Result<Vec<_>>>()?;
    PiecewisePdf::new(grid.to_vec(), values)
}

pub const DEFAULT_GRID_POINTS: usize = 2048;

/// Uniform grid over the support of `f · g`.
///
/// Finite analytic bounds are used when available; unbounded sides are
/// clipped to the extreme of a 10⁴-sample pilot draw.
pub fn default_grid(f: &Distribution, g: &Distribution, n: usize, seed: u64) -> Vec<f64> {
    let (fl, fh) = f.support();
    let (gl, gh) = g.support();
    let corners = [fl * gl, fl * gh, fh * gl, fh * gh];
    let mut lo = corners.iter().copied().filter(|v| !v.is_nan()).fold(f64::INFINITY, f64::min);
    let mut hi = corners.iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max);
    if !lo.is_finite() || !hi.is_finite() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draws: Vec<f64> = (0..10_000).map(|_| f.sample_one(&mut rng) * g.sample_one(&mut rng)).collect();
        let min = draws.iter().copied().fold(f64::INFINITY, f64::min);
        let max = draws.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !lo.is_finite() {
            lo = min;
        }
        if !hi.is_finite() {
            hi = max;
        }
    }
    let n = n.max(2);
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

/// Exact law of `U(-1, 3) · Γ(3, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Example31;

impl Example31 {
    const C: f64 = 1.0 / 8.0; // 1 / (4 Γ(3))

    pub fn factors() -> (Distribution, Distribution) {
        (
            Distribution::Uniform { a: -1.0, b: 3.0 },
            Distribution::Gamma { shape: 3.0, rate: 1.0 },
        )
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x >= 0.0 {
            Self::C * (1.0 + x / 3.0) * (-x / 3.0).exp()
        } else {
            Self::C * (1.0 - x) * x.exp()
        }
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x == f64::INFINITY {
            return 1.0;
        }
        if x < 0.0 {
            Self::C * (2.0 - x) * x.exp()
        } else {
            Self::C * ((-6.0 - x) * (-x / 3.0).exp() + 8.0)
        }
    }
}

pub fn example31_closed_form() -> Example31 {
    Example31
}

/// Density of `Γ(α,1) · (Γ(β,1) + Γ(ε,1))` at `x > 0`.
pub fn gamma_gamma_pdf(alpha: f64, beta: f64, eps: f64, x: f64) -> Result<f64> {
    if !(alpha > 0.0 && beta > 0.0 && eps >= 0.0) {
        return Err(Error::domain(
            "gamma_gamma_pdf",
            format!("alpha = {alpha}, beta = {beta}, eps = {eps}"),
        ));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::domain("gamma_gamma_pdf", format!("x = {x} must be positive")));
    }
    let b = beta + eps;
    let k = bessel_k(b - alpha, 2.0 * x.sqrt())?;
    if k == 0.0 {
        return Ok(0.0);
    }
    let log = 2f64.ln() + 0.5 * (alpha + b - 2.0) * x.ln() + k.ln() - ln_gamma_unchecked(alpha) - ln_gamma_unchecked(b);
    Ok(log.exp())
}

/// `(ρ_h(x) - ρ_0(x)) / h`: first-order effect of the additive perturbation.
pub fn perturbation_sensitivity(alpha: f64, beta: f64, x: f64, eps_step: f64) -> Result<f64> {
    if !(eps_step > 0.0 && eps_step <= 0.1) {
        return Err(Error::domain("perturbation_sensitivity", format!("step {eps_step} outside (0, 0.1]")));
    }
    let base = gamma_gamma_pdf(alpha, beta, 0.0, x)?;
    let bumped = gamma_gamma_pdf(alpha, beta, eps_step, x)?;
    Ok((bumped - base) / eps_step)
}
