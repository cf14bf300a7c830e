//! Polynomial density approximants built directly from raw moments.
//!
//! Three constructions on a bounded support `[a, b]`:
//!
//! * Legendre: `Σ_k (2k+1)/(b-a) E[P_k(T)] P_k(T)` with `T` the image of `Y`
//!   on `[-1, 1]`;
//! * monic: `w(y) (c_w + Σ_{i>n_p} λ_i π_i(y))` with `π_i` monic orthogonal
//!   for the weight `w`;
//! * transformed moments: a piecewise-constant density on `N` cells of
//!   `(0, b)`.
//!
//! These are truncated series, not densities: they can go negative, and the
//! transformed-moment form only integrates to one in the limit. Negative
//! lobes are reported by [`Diagnostics`] and only removed on request.

use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::mellin::{two_columns, PiecewisePdf};
use crate::moments::MomentSequence;
use crate::poly;
use crate::quad::{integrate_pieces, Tolerance};
use crate::specfun::ln_gamma_unchecked;

/// Largest monic degree before the moment Gram matrix is refused.
pub const MAX_MONIC_DEGREE: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ApproxKind {
    Legendre,
    Monic,
    Transformed,
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// `weight(y) · p(y)` on `[a, b]`.
    Polynomial { coeffs: Vec<f64>, weight: Option<Distribution> },
    /// Value on each of the `N` cells `[jb/N, (j+1)b/N)`.
    Cells(Vec<f64>),
}

/// A moment-based density approximant on `[a, b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityApprox {
    pub kind: ApproxKind,
    pub support: (f64, f64),
    pub degree: usize,
    repr: Repr,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    /// `∫ρ` over the support.
    pub integral: f64,
    /// `∫|ρ|`; exceeds `integral` by twice the negative mass.
    pub abs_integral: f64,
    pub negative_mass: f64,
    pub min_value: f64,
}

impl DensityApprox {
    pub fn eval(&self, y: f64) -> f64 {
        let (a, b) = self.support;
        if !(y >= a && y <= b) {
            return 0.0;
        }
        match &self.repr {
            Repr::Polynomial { coeffs, weight } => {
                let w = weight.map_or(1.0, |w| w.pdf(y));
                w * poly::eval(coeffs, y)
            }
            Repr::Cells(cells) => {
                let n = cells.len();
                let j = ((n as f64 * (y - a) / (b - a)).floor() as usize).min(n - 1);
                cells[j]
            }
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (a, b) = self.support;
        let n = match &self.repr {
            Repr::Cells(c) => c.len(),
            Repr::Polynomial { .. } => 16,
        };
        (0..=n).map(|j| a + (b - a) * j as f64 / n as f64).collect()
    }

    pub fn diagnostics(&self) -> Result<Diagnostics> {
        let tol = Tolerance::new(1e-13, 1e-11);
        let pts = self.breakpoints();
        let (integral, abs_integral) = match &self.repr {
            Repr::Cells(cells) => {
                let h = (self.support.1 - self.support.0) / cells.len() as f64;
                (cells.iter().sum::<f64>() * h, cells.iter().map(|c| c.abs()).sum::<f64>() * h)
            }
            Repr::Polynomial { .. } => (
                integrate_pieces(|y| self.eval(y), &pts, tol)?,
                integrate_pieces(|y| self.eval(y).abs(), &pts, tol)?,
            ),
        };
        let (a, b) = self.support;
        let min_value = (0..=4000)
            .map(|i| self.eval(a + (b - a) * i as f64 / 4000.0))
            .fold(f64::INFINITY, f64::min);
        Ok(Diagnostics {
            integral,
            abs_integral,
            negative_mass: 0.5 * (abs_integral - integral),
            min_value,
        })
    }

    /// Raw values on `n` evenly spaced points of the support.
    pub fn tabulate(&self, n: usize) -> (Vec<f64>, Vec<f64>) {
        let (a, b) = self.support;
        let n = n.max(2);
        let xs: Vec<f64> = (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect();
        let ys = xs.iter().map(|&x| self.eval(x)).collect();
        (xs, ys)
    }

    /// Raw table as `x,density` CSV (negative values kept).
    pub fn to_csv(&self, n: usize) -> String {
        let (x, y) = self.tabulate(n);
        two_columns("density", &x, &y)
    }

    /// Negative values clipped to zero and the table renormalized.
    pub fn clipped(&self, n: usize) -> Result<PiecewisePdf> {
        let (x, y) = self.tabulate(n);
        let y: Vec<f64> = y.into_iter().map(|v| v.max(0.0)).collect();
        let pdf = PiecewisePdf::new(x, y)?;
        let mass = pdf.mass();
        if !(mass > 0.0) {
            return Err(Error::domain("clip", "approximant has no positive mass"));
        }
        let values = pdf.values.iter().map(|v| v / mass).collect();
        PiecewisePdf::new(pdf.grid, values)
    }

    /// Max abs deviation from `pdf` on `n` points of `[lo, hi]`.
    pub fn sup_error<F: Fn(f64) -> f64>(&self, pdf: F, lo: f64, hi: f64, n: usize) -> f64 {
        (0..=n)
            .map(|i| lo + (hi - lo) * i as f64 / n as f64)
            .map(|y| (self.eval(y) - pdf(y)).abs())
            .fold(0.0, f64::max)
    }
}

fn check_support(a: f64, b: f64) -> Result<()> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(Error::domain("reconstruct", format!("support [{a}, {b}] must be finite with a < b")));
    }
    Ok(())
}

fn check_degree(m: &MomentSequence, n: usize) -> Result<()> {
    if n > m.n_moms() {
        return Err(Error::domain(
            "reconstruct",
            format!("degree {n} needs {n} moments, only {} given", m.n_moms()),
        ));
    }
    Ok(())
}

/// Legendre polynomials `P_0..P_n` on `[-1, 1]` in power form.
fn legendre_polys(n: usize) -> Vec<Vec<f64>> {
    let mut out = vec![vec![1.0]];
    if n >= 1 {
        out.push(vec![0.0, 1.0]);
    }
    for k in 1..n {
        let kf = k as f64;
        let mut next = poly::mul(&out[k], &[0.0, (2.0 * kf + 1.0) / (kf + 1.0)]);
        poly::add_scaled(&mut next, &out[k - 1], -kf / (kf + 1.0));
        out.push(next);
    }
    out
}

/// `E[p(Y)]` from raw moments (`μ_0 = 1`).
fn expect(p: &[f64], m: &MomentSequence) -> f64 {
    p.iter().enumerate().map(|(j, c)| c * m.get(j)).sum()
}

pub fn legendre_pdf_approx(m: &MomentSequence, support: (f64, f64), n: usize) -> Result<DensityApprox> {
    let (a, b) = support;
    check_support(a, b)?;
    check_degree(m, n)?;
    let (scale, shift) = (2.0 / (b - a), -(a + b) / (b - a));
    let mut coeffs = vec![0.0];
    for (k, pk) in legendre_polys(n).iter().enumerate() {
        let in_y = poly::compose_affine(pk, scale, shift);
        let weight = (2 * k + 1) as f64 / (b - a) * expect(&in_y, m);
        poly::add_scaled(&mut coeffs, &in_y, weight);
    }
    Ok(DensityApprox {
        kind: ApproxKind::Legendre,
        support,
        degree: n,
        repr: Repr::Polynomial { coeffs, weight: None },
    })
}

/// Monic orthogonal polynomials `π_0..π_n` of `w`, by Gram–Schmidt on its
/// moments, with their squared norms.
fn monic_family(w: &Distribution, n: usize) -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
    if n > MAX_MONIC_DEGREE {
        return Err(Error::IllConditioned(n));
    }
    let wm: Vec<f64> = (0..=2 * n as u32).map(|j| w.raw_moment(j)).collect();
    let inner = |p: &[f64], q: &[f64]| -> f64 {
        let mut s = 0.0;
        for (i, pi) in p.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                s += pi * qj * wm[i + j];
            }
        }
        s
    };
    let mut family: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut norms: Vec<f64> = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let mut p = vec![0.0; i + 1];
        p[i] = 1.0;
        for (q, &nq) in family.iter().zip(&norms) {
            let c: f64 = inner(&p, q) / nq;
            poly::add_scaled(&mut p, q, -c);
        }
        let np = inner(&p, &p);
        if !(np > 0.0) || !np.is_finite() {
            return Err(Error::IllConditioned(i));
        }
        family.push(p);
        norms.push(np);
    }
    Ok((family, norms))
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonicOptions {
    /// Weight density on the support; `None` means uniform on `[a, b]`.
    pub weight: Option<Distribution>,
    /// Leading terms absorbed into `c_w` (`λ_1..λ_{n_p}` are dropped).
    pub n_p: usize,
    pub c_w: f64,
}

impl Default for MonicOptions {
    fn default() -> Self {
        Self {
            weight: None,
            n_p: 0,
            c_w: 1.0,
        }
    }
}

pub fn monic_pdf_approx(
    m: &MomentSequence,
    support: (f64, f64),
    n: usize,
    opts: &MonicOptions,
) -> Result<DensityApprox> {
    let (a, b) = support;
    check_support(a, b)?;
    check_degree(m, n)?;
    let w = match opts.weight {
        Some(w) => w,
        None => Distribution::uniform(a, b)?,
    };
    let (wl, wh) = w.support();
    if wl < a || wh > b {
        return Err(Error::domain("monic_pdf_approx", format!("weight {w} leaves [{a}, {b}]")));
    }
    let (family, norms) = monic_family(&w, n)?;
    let mut coeffs = vec![opts.c_w];
    for i in (opts.n_p + 1)..=n {
        let lambda = expect(&family[i], m) / norms[i];
        poly::add_scaled(&mut coeffs, &family[i], lambda);
    }
    Ok(DensityApprox {
        kind: ApproxKind::Monic,
        support,
        degree: n,
        repr: Repr::Polynomial { coeffs, weight: Some(w) },
    })
}

/// Transformed-moment approximant on `(0, b)` with `N` cells, using `μ_0..μ_N`.
pub fn transformed_moments_pdf_approx(m: &MomentSequence, b: f64, n: usize) -> Result<DensityApprox> {
    check_support(0.0, b)?;
    check_degree(m, n)?;
    if n == 0 {
        return Err(Error::domain("transformed_moments_pdf_approx", "N must be >= 1"));
    }
    let ln_fact = |k: usize| ln_gamma_unchecked(k as f64 + 1.0);
    let cells = (0..n)
        .map(|k| {
            let lead = ln_gamma_unchecked(n as f64 + 2.0) - ln_fact(k) - (k as f64 + 1.0) * b.ln();
            let sum: f64 = (0..=n - k)
                .map(|mm| {
                    let sign = if mm % 2 == 0 { 1.0 } else { -1.0 };
                    let mag = (lead - mm as f64 * b.ln() - ln_fact(mm) - ln_fact(n - k - mm)).exp();
                    sign * mag * m.get(mm + k)
                })
                .sum();
            sum
        })
        .collect();
    Ok(DensityApprox {
        kind: ApproxKind::Transformed,
        support: (0.0, b),
        degree: n,
        repr: Repr::Cells(cells),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::Provenance;

    fn moments_of(d: &Distribution, n: usize) -> MomentSequence {
        MomentSequence::new((1..=n as u32).map(|j| d.raw_moment(j)).collect(), Provenance::MellinExact)
    }

    fn beta32() -> Distribution {
        Distribution::beta(3.0, 2.0).unwrap()
    }

    #[test]
    fn legendre_polys_match_recurrence_values() {
        let p = legendre_polys(4);
        // P_4(x) = (35x^4 - 30x^2 + 3)/8
        assert_eq!(p[4], vec![3.0 / 8.0, 0.0, -30.0 / 8.0, 0.0, 35.0 / 8.0]);
        for pk in &p {
            assert!((poly::eval(pk, 1.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn legendre_beta32() {
        let m = moments_of(&beta32(), 10);
        let approx = legendre_pdf_approx(&m, (0.0, 1.0), 10).unwrap();
        let err = approx.sup_error(|y| beta32().pdf(y), 0.05, 0.95, 900);
        assert!(err <= 0.05, "{err}");
        let d = approx.diagnostics().unwrap();
        assert!((d.integral - 1.0).abs() < 1e-6);
    }

    #[test]
    fn legendre_uniform_is_constant() {
        let u = Distribution::uniform(2.0, 6.0).unwrap();
        let m = moments_of(&u, 6);
        let zero = legendre_pdf_approx(&m, (2.0, 6.0), 0).unwrap();
        assert_eq!(zero.eval(3.3), 0.25);
        for n in 1..=6 {
            let approx = legendre_pdf_approx(&m, (2.0, 6.0), n).unwrap();
            assert!(approx.sup_error(|_| 0.25, 2.0, 6.0, 200) < 1e-10, "n = {n}");
        }
    }

    #[test]
    fn monic_behaviour() {
        let m = moments_of(&beta32(), 10);
        let four = monic_pdf_approx(&m, (0.0, 1.0), 4, &MonicOptions::default()).unwrap();
        let ten = monic_pdf_approx(&m, (0.0, 1.0), 10, &MonicOptions::default()).unwrap();
        let e4 = four.sup_error(|y| beta32().pdf(y), 0.0, 1.0, 1000);
        let e10 = ten.sup_error(|y| beta32().pdf(y), 0.0, 1.0, 1000);
        assert!(e4 <= 0.1, "{e4}");
        assert!(e10 > e4, "n=10 {e10} vs n=4 {e4}");
        assert!((four.diagnostics().unwrap().integral - 1.0).abs() < 1e-6);
        assert!(matches!(
            monic_pdf_approx(&moments_of(&beta32(), 13), (0.0, 1.0), 13, &MonicOptions::default()),
            Err(Error::IllConditioned(_))
        ));
    }

    #[test]
    fn monic_reproduces_its_weight() {
        let w = Distribution::beta(2.0, 2.0).unwrap();
        let m = moments_of(&w, 8);
        let opts = MonicOptions {
            weight: Some(w),
            ..Default::default()
        };
        for n in [0, 3, 8] {
            let approx = monic_pdf_approx(&m, (0.0, 1.0), n, &opts).unwrap();
            assert!(approx.sup_error(|y| w.pdf(y), 0.0, 1.0, 200) < 1e-9, "n = {n}");
        }
    }

    #[test]
    fn transformed_moments() {
        let m = moments_of(&beta32(), 10);
        let approx = transformed_moments_pdf_approx(&m, 1.0, 10).unwrap();
        assert!(approx.sup_error(|y| beta32().pdf(y), 0.0, 1.0, 1000) > 0.2);
        // exact for uniform moments in exact arithmetic; the alternating sum
        // loses about 0.07 to cancellation at N = 30
        let u = Distribution::uniform(0.0, 2.0).unwrap();
        let mu = moments_of(&u, 30);
        let t = transformed_moments_pdf_approx(&mu, 2.0, 30).unwrap();
        assert!(t.sup_error(|_| 0.5, 0.0, 2.0, 600) <= 0.1);
        let t10 = transformed_moments_pdf_approx(&mu, 2.0, 10).unwrap();
        assert!((t10.diagnostics().unwrap().integral - 1.0).abs() < 1e-6);
        // mass equals (N+1)/N (1 - E[(Y/b)^N]) for a general target
        let d = approx.diagnostics().unwrap();
        let want = 11.0 / 10.0 * (1.0 - m.get(10));
        assert!((d.integral - want).abs() < 1e-9, "{} vs {want}", d.integral);
    }

    #[test]
    fn transformed_point_mass_at_b() {
        let m = MomentSequence::new(vec![1.0; 8], Provenance::MellinExact);
        let t = transformed_moments_pdf_approx(&m, 1.0, 8).unwrap();
        let d = t.diagnostics().unwrap();
        assert!(d.abs_integral <= 1.0 + 1e-6);
        assert!(t.eval(0.1).abs() < 1e-9);
    }

    #[test]
    fn support_failure_mode_shows_in_abs_mass() {
        let m = moments_of(&beta32(), 7);
        let good = legendre_pdf_approx(&m, (0.0, 1.0), 7).unwrap().diagnostics().unwrap();
        let bad = legendre_pdf_approx(&m, (0.0, 0.5), 7).unwrap().diagnostics().unwrap();
        assert!(good.negative_mass < 1e-6);
        assert!(bad.abs_integral - 1.0 > 0.2, "{bad:?}");
    }

    #[test]
    fn clip_mode_renormalizes() {
        let m = moments_of(&beta32(), 7);
        let bad = legendre_pdf_approx(&m, (0.0, 0.5), 7).unwrap();
        let pdf = bad.clipped(2001).unwrap();
        assert!((pdf.mass() - 1.0).abs() < 1e-12);
        assert!(pdf.values.iter().all(|v| *v >= 0.0));
        assert!(bad.to_csv(11).starts_with("x,density\n"));
    }
}
