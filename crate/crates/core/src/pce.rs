//! One-dimensional polynomial chaos expansions and their Mellin transform.
//!
//! A scalar transform `g(r)` of an input `r` is expanded in the orthonormal
//! polynomials of a stochastic germ `ξ`, using the isoprobabilistic map
//! `r = F_r^{-1}(F_ξ(ξ))`. The expansion is then collected into power form
//! `Σ c_n ξ^n` ([`PowerPolynomial`]), whose `(s-1)`-th power has the
//! cumulated coefficients `ĉ_i(s)`. With those,
//!
//! ```text
//! E[p(ξ)^(s-1)] = Σ_i ĉ_i(s) E[ξ^i]
//! ```
//!
//! needs only the germ's own moments.

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::poly;
use crate::quad::{GaussRule, Recurrence};

pub const MAX_DEGREE: usize = 16;
/// Largest `N (s - 1)` accepted by [`PowerPolynomial::chat_coefficients`].
pub const MAX_POWER_DEGREE: usize = 48;
pub const MAX_MELLIN_ARG: i64 = 12;
pub const OVERFLOW_LIMIT: f64 = 1e15;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BasisKind {
    /// Germ U(-1, 1).
    Legendre,
    /// Germ U(0, 1), `P̃_n(x) = P_n(2x - 1)`.
    ShiftedLegendre,
    /// Germ Beta(alpha, beta) on (0, 1).
    Jacobi { alpha: f64, beta: f64 },
}

/// Orthonormal polynomial family of a germ, stored in power form. All
/// normalization constants are one: `E[P_m(ξ) P_n(ξ)] = δ_mn`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoBasis {
    kind: BasisKind,
    polys: Vec<Vec<f64>>,
}

impl OrthoBasis {
    pub fn new(kind: BasisKind, degree: usize) -> Result<Self> {
        if degree > MAX_DEGREE {
            return Err(Error::DegreeGuard {
                degree,
                max: MAX_DEGREE,
            });
        }
        let rec = kind.recurrence(degree + 1)?;
        let mut polys: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
        let mut monic: Vec<Vec<f64>> = Vec::with_capacity(degree + 1);
        let mut norm2 = 1.0;
        for k in 0..=degree {
            let p = match k {
                0 => vec![1.0],
                _ => {
                    let mut next = poly::mul(&monic[k - 1], &[-rec.a[k - 1], 1.0]);
                    if k >= 2 {
                        poly::add_scaled(&mut next, &monic[k - 2], -rec.b[k - 1]);
                    }
                    norm2 *= rec.b[k];
                    next
                }
            };
            let scale = norm2.sqrt().recip();
            polys.push(p.iter().map(|c| c * scale).collect());
            monic.push(p);
        }
        Ok(Self { kind, polys })
    }

    /// Basis matching a germ law: U(-1,1), U(0,1) or Beta(α,β).
    pub fn for_germ(germ: &Distribution, degree: usize) -> Result<Self> {
        let kind = match *germ {
            Distribution::Uniform { a, b } if a == -1.0 && b == 1.0 => BasisKind::Legendre,
            Distribution::Uniform { a, b } if a == 0.0 && b == 1.0 => BasisKind::ShiftedLegendre,
            Distribution::Beta { alpha, beta } => BasisKind::Jacobi { alpha, beta },
            _ => {
                return Err(Error::Unsupported {
                    op: "pce germ",
                    detail: format!("{germ} has no orthogonal family here; use U(-1,1), U(0,1) or Beta"),
                })
            }
        };
        Self::new(kind, degree)
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.polys.len() - 1
    }

    pub fn germ(&self) -> Distribution {
        self.kind.germ()
    }

    /// Power-form coefficients of the `n`-th orthonormal polynomial.
    pub fn poly(&self, n: usize) -> &[f64] {
        &self.polys[n]
    }

    pub fn eval(&self, n: usize, x: f64) -> f64 {
        poly::eval(&self.polys[n], x)
    }

    /// Normalization constant `h_n = E[P_n(ξ)^2]`.
    pub fn norm(&self, _n: usize) -> f64 {
        1.0
    }

    pub fn gauss_rule(&self, nodes: usize) -> Result<GaussRule> {
        Ok(GaussRule::from_recurrence(&self.kind.recurrence(nodes)?))
    }
}

impl BasisKind {
    fn recurrence(&self, n: usize) -> Result<Recurrence> {
        Ok(match *self {
            BasisKind::Legendre => Recurrence::legendre(n),
            BasisKind::ShiftedLegendre => Recurrence::shifted_legendre(n),
            BasisKind::Jacobi { alpha, beta } => {
                if !(alpha > 0.0 && beta > 0.0) {
                    return Err(Error::domain("jacobi basis", format!("alpha = {alpha}, beta = {beta}")));
                }
                Recurrence::beta(alpha, beta, n)
            }
        })
    }

    pub fn germ(&self) -> Distribution {
        match *self {
            BasisKind::Legendre => Distribution::Uniform { a: -1.0, b: 1.0 },
            BasisKind::ShiftedLegendre => Distribution::Uniform { a: 0.0, b: 1.0 },
            BasisKind::Jacobi { alpha, beta } => Distribution::Beta { alpha, beta },
        }
    }
}

/// Truncated expansion `Σ_n g̃_n P_n(ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Pce {
    pub coeffs: Vec<f64>,
    pub basis: OrthoBasis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectOptions {
    /// Truncation degree N.
    pub degree: usize,
    /// Gauss nodes used for the projection; `None` means `N + 1`.
    #[serde(default)]
    pub nodes: Option<usize>,
}

impl Default for ProjectOptions {
    fn default() -> Self {
        Self {
            degree: 2,
            nodes: None,
        }
    }
}

/// Projects `g(r)`, `r ~ input`, on the orthonormal basis of `germ`.
///
/// `g̃_n = E[g(F_in^{-1}(F_germ(ξ))) P_n(ξ)]` by Gauss quadrature of the germ
/// with `nodes` points (default `N + 1`, the classical quadrature PCE).
pub fn project<G: Fn(f64) -> f64>(
    g: G,
    input: &Distribution,
    germ: &Distribution,
    opts: ProjectOptions,
) -> Result<Pce> {
    let basis = OrthoBasis::for_germ(germ, opts.degree)?;
    let nodes = opts.nodes.unwrap_or(opts.degree + 1);
    if nodes == 0 {
        return Err(Error::domain("project", "quadrature needs at least one node"));
    }
    let rule = basis.gauss_rule(nodes)?;
    let mapped: Vec<f64> = rule
        .nodes
        .iter()
        .map(|&xi| iso_map(input, germ, xi))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = mapped.iter().map(|&r| g(r)).collect();
    if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
        return Err(Error::Quadrature(format!("transform returned {bad} at a quadrature node")));
    }
    let coeffs = (0..=opts.degree)
        .map(|n| {
            rule.nodes
                .iter()
                .zip(&rule.weights)
                .zip(&values)
                .map(|((&xi, &w), &v)| w * v * basis.eval(n, xi))
                .sum::<f64>()
                / basis.norm(n)
        })
        .collect();
    Ok(Pce { coeffs, basis })
}

fn iso_map(input: &Distribution, germ: &Distribution, xi: f64) -> Result<f64> {
    if input == germ {
        return Ok(xi);
    }
    if let (Distribution::Uniform { a, b }, Distribution::Uniform { a: ga, b: gb }) = (*input, *germ) {
        return Ok(a + (b - a) * (xi - ga) / (gb - ga));
    }
    let p = germ.cdf(xi);
    input.quantile(p).map_err(|_| Error::Domain {
        op: "project",
        detail: format!("cannot invert the CDF of {input} at p = {p}"),
    })
}

impl Pce {
    pub fn eval(&self, xi: f64) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| c * self.basis.eval(n, xi))
            .sum()
    }

    /// Collects the powers of the germ: `Σ g̃_n P_n(x) = Σ c_n x^n`.
    pub fn collect_powers(&self) -> PowerPolynomial {
        let mut coeffs = vec![0.0; self.coeffs.len()];
        for (n, &gn) in self.coeffs.iter().enumerate() {
            poly::add_scaled(&mut coeffs, self.basis.poly(n), gn);
        }
        PowerPolynomial {
            coeffs,
            germ: self.basis.germ(),
        }
    }
}

/// A PCE in power form `Σ_{n=0}^{N} c_n ξ^n` together with its germ.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerPolynomial {
    pub coeffs: Vec<f64>,
    pub germ: Distribution,
}

impl PowerPolynomial {
    pub fn new(coeffs: Vec<f64>, germ: Distribution) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::domain("power polynomial", "needs at least c_0"));
        }
        germ.validate()?;
        Ok(Self { coeffs, germ })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        poly::eval(&self.coeffs, x)
    }

    /// `ĉ_0(s) .. ĉ_{N(s-1)}(s)`: power coefficients of `p(x)^(s-1)`.
    pub fn chat_coefficients(&self, s: i64) -> Result<Vec<f64>> {
        if !(1..=MAX_MELLIN_ARG).contains(&s) {
            return Err(Error::domain(
                "chat_coefficients",
                format!("s = {s} outside 1..={MAX_MELLIN_ARG}"),
            ));
        }
        let power = (s - 1) as usize;
        let degree = self.degree() * power;
        if degree > MAX_POWER_DEGREE {
            return Err(Error::DegreeGuard {
                degree,
                max: MAX_POWER_DEGREE,
            });
        }
        let chat = poly::pow(&self.coeffs, power);
        let magnitude = chat.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if magnitude > OVERFLOW_LIMIT || !magnitude.is_finite() {
            return Err(Error::Overflow {
                magnitude,
                limit: OVERFLOW_LIMIT,
            });
        }
        Ok(chat)
    }

    /// `M(p(ξ))(s) = Σ_i ĉ_i(s) M(ξ)(i+1)`, i.e. `E[p(ξ)^(s-1)]`.
    ///
    /// Germ moments are taken as raw moments, so sign-indefinite germs
    /// (e.g. U(-1, 1)) and negative coefficients need no special handling.
    pub fn mellin(&self, s: i64) -> Result<f64> {
        let chat = self.chat_coefficients(s)?;
        Ok(chat
            .iter()
            .enumerate()
            .map(|(i, c)| c * self.germ.raw_moment(i as u32))
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn u01() -> Distribution {
        Distribution::uniform(0.0, 1.0).unwrap()
    }

    #[test]
    fn orthonormality_under_gauss_quadrature() {
        let kinds = [
            BasisKind::Legendre,
            BasisKind::ShiftedLegendre,
            BasisKind::Jacobi { alpha: 2.0, beta: 5.0 },
            BasisKind::Jacobi { alpha: 0.5, beta: 0.5 },
        ];
        for kind in kinds {
            let basis = OrthoBasis::new(kind, 12).unwrap();
            let rule = basis.gauss_rule(20).unwrap();
            for m in 0..=12 {
                for n in 0..=12 {
                    let ip = rule.expect(|x| basis.eval(m, x) * basis.eval(n, x));
                    let want = if m == n { basis.norm(n) } else { 0.0 };
                    // power-form evaluation cancels digits in proportion to the coefficient size
                    let size: f64 = [m, n].iter().map(|&k| basis.poly(k).iter().map(|c| c.abs()).sum::<f64>()).product();
                    assert!((ip - want).abs() < 1e-14 * size.max(1.0), "{kind:?} m={m} n={n} ip={ip}");
                }
            }
        }
    }

    #[test]
    fn shifted_legendre_matches_legendre_of_2x_minus_1() {
        let shifted = OrthoBasis::new(BasisKind::ShiftedLegendre, 4).unwrap();
        let plain = OrthoBasis::new(BasisKind::Legendre, 4).unwrap();
        for n in 0..=4 {
            for x in [0.0, 0.2, 0.77, 1.0] {
                assert_relative_eq!(shifted.eval(n, x), plain.eval(n, 2.0 * x - 1.0), epsilon = 1e-12);
            }
        }
        // UQLab normalization: P̃_1 = √3 (2x - 1)
        assert_relative_eq!(shifted.eval(1, 1.0), 3f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn lorenz_factor_coefficients() {
        let input = Distribution::beta(2.0, 2.0).unwrap();
        let pce = project(|r| r / (1.0 + r), &input, &u01(), ProjectOptions::default()).unwrap();
        let want = [0.3188, 0.1002, -0.0130];
        for (c, w) in pce.coeffs.iter().zip(want) {
            assert!((c - w).abs() < 2e-3, "{:?}", pce.coeffs);
        }
        let p = pce.collect_powers();
        for (c, w) in p.coeffs.iter().zip([0.1163, 0.5210, -0.1739]) {
            assert!((c - w).abs() < 5e-3, "{:?}", p.coeffs);
        }
    }

    #[test]
    fn identity_projection_is_exact() {
        let pce = project(|r| r, &u01(), &u01(), ProjectOptions { degree: 1, nodes: None }).unwrap();
        // E[x] = 1/2, E[x √3(2x-1)] = √3/6 = 1/(2√3)
        assert_relative_eq!(pce.coeffs[0], 0.5, epsilon = 1e-14);
        assert_relative_eq!(pce.coeffs[1], 1.0 / (2.0 * 3f64.sqrt()), epsilon = 1e-14);
    }

    #[test]
    fn constant_projection() {
        let input = Distribution::gamma(3.0, 2.0).unwrap();
        let pce = project(|_| 2.5, &input, &u01(), ProjectOptions { degree: 3, nodes: Some(8) }).unwrap();
        assert_relative_eq!(pce.coeffs[0], 2.5, epsilon = 1e-13);
        for c in &pce.coeffs[1..] {
            assert!(c.abs() < 1e-13);
        }
    }

    #[test]
    fn collect_powers_round_trip() {
        let input = Distribution::beta(2.0, 5.0).unwrap();
        for germ in [u01(), Distribution::uniform(-1.0, 1.0).unwrap(), Distribution::beta(2.0, 2.0).unwrap()] {
            let pce = project(|r| (1.0 + r).ln(), &input, &germ, ProjectOptions { degree: 4, nodes: Some(10) })
                .unwrap();
            let p = pce.collect_powers();
            let (lo, hi) = germ.support();
            let max = (0..=10)
                .map(|i| lo + (hi - lo) * i as f64 / 10.0)
                .map(|x| (pce.eval(x) - p.eval(x)).abs())
                .fold(0.0, f64::max);
            assert!(max <= 1e-12, "{germ}: {max}");
        }
        let c = Pce {
            coeffs: vec![0.7],
            basis: OrthoBasis::new(BasisKind::ShiftedLegendre, 0).unwrap(),
        };
        assert_eq!(c.collect_powers().coeffs, vec![0.7]);
    }

    #[test]
    fn chat_table_rows() {
        let p = PowerPolynomial::new(vec![0.1163, 0.5210, -0.1739], u01()).unwrap();
        let (c0, c1, c2) = (0.1163, 0.5210, -0.1739);
        assert_eq!(p.chat_coefficients(1).unwrap(), vec![1.0]);
        assert_eq!(p.chat_coefficients(2).unwrap(), vec![c0, c1, c2]);
        let s3 = p.chat_coefficients(3).unwrap();
        let want3 = [c0 * c0, 2.0 * c0 * c1, 2.0 * c0 * c2 + c1 * c1, 2.0 * c1 * c2, c2 * c2];
        for (a, b) in s3.iter().zip(want3) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
        let s4 = p.chat_coefficients(4).unwrap();
        assert_relative_eq!(s4[3], c1.powi(3) + 6.0 * c0 * c1 * c2, epsilon = 1e-15);
    }

    #[test]
    fn guards() {
        let p = PowerPolynomial::new(vec![0.0; 17], u01()).unwrap();
        assert!(matches!(p.chat_coefficients(5), Err(Error::DegreeGuard { .. })));
        let big = PowerPolynomial::new(vec![1e4, 1e4], u01()).unwrap();
        assert!(matches!(big.chat_coefficients(6), Err(Error::Overflow { .. })));
        assert!(big.chat_coefficients(13).is_err());
        assert!(OrthoBasis::new(BasisKind::Legendre, 17).is_err());
        assert!(OrthoBasis::for_germ(&Distribution::gamma(2.0, 1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn mellin_of_simple_polynomials() {
        let id = PowerPolynomial::new(vec![0.0, 1.0], u01()).unwrap();
        assert_relative_eq!(id.mellin(3).unwrap(), 1.0 / 3.0, max_relative = 1e-15);
        let c = PowerPolynomial::new(vec![1.7], Distribution::beta(2.0, 3.0).unwrap()).unwrap();
        for s in 1..6 {
            assert_relative_eq!(c.mellin(s).unwrap(), 1.7f64.powi(s as i32 - 1), max_relative = 1e-14);
        }
    }

    #[test]
    fn pce_json_shape() {
        let p = PowerPolynomial::new(vec![0.5, 1.0], u01()).unwrap();
        let v = serde_json::to_value(&p).unwrap();
        assert_eq!(v["coeffs"][1], 1.0);
        assert_eq!(v["germ"]["kind"], "uniform");
        let back: PowerPolynomial = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
