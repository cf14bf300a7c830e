//! Numerical integration shared by the rest of the crate.
//!
//! [`integrate`] is a globally adaptive 7/15-point Gauss–Kronrod scheme: the
//! subinterval with the largest error estimate is bisected until the summed
//! estimate meets `max(abs, rel * |I|)`. Infinite upper limits are handled by
//! the map `x = a + t / (1 - t)`.
//!
//! [`GaussRule`] builds fixed Gauss rules for probability measures from their
//! three-term recurrence (Golub–Welsch).

use std::collections::BinaryHeap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

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
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub abs: f64,
    pub rel: f64,
    pub max_intervals: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            abs: 1e-12,
            rel: 1e-10,
            max_intervals: 4000,
        }
    }
}

impl Tolerance {
    pub fn new(abs: f64, rel: f64) -> Self {
        Self {
            abs,
            rel,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub converged: bool,
}

struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kr = WGK[7] * fc;
    let mut ga = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kr += WGK[j] * pair;
        if j % 2 == 1 {
            ga += WG[j / 2] * pair;
        }
    }
    Segment {
        a,
        b,
        value: kr * h,
        error: ((kr - ga) * h).abs(),
    }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: Tolerance) -> Estimate {
    let mut heap = BinaryHeap::new();
    let first = kronrod(f, a, b);
    let mut value = first.value;
    let mut error = first.error;
    heap.push(first);
    while error > tol.abs.max(tol.rel * value.abs()) {
        if heap.len() >= tol.max_intervals {
            return Estimate {
                value,
                error,
                converged: false,
            };
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision
            heap.push(worst);
            return Estimate {
                value,
                error,
                converged: false,
            };
        }
        let left = kronrod(f, worst.a, mid);
        let right = kronrod(f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // recompute the sum to shed accumulated update round-off
    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Estimate {
        value,
        error,
        converged: true,
    }
}

/// Integrates `f` over `[a, b]`; `b` may be `f64::INFINITY`.
pub fn integrate_with<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Estimate {
    if a == b {
        return Estimate {
            value: 0.0,
            error: 0.0,
            converged: true,
        };
    }
    if b.is_infinite() {
        let g = |t: f64| {
            let s = 1.0 - t;
            let v = f(a + t / s);
            if v == 0.0 {
                0.0
            } else {
                v / (s * s)
            }
        };
        adapt(&g, 0.0, 1.0, tol)
    } else {
        adapt(&f, a, b, tol)
    }
}

/// Integrates with the default tolerance and fails on a non-finite result or
/// an error estimate that is far from converged.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Result<f64> {
    checked(integrate_with(f, a, b, Tolerance::default()))
}

/// Integrates across consecutive breakpoints, e.g. at known kinks of `f`.
pub fn integrate_pieces<F: Fn(f64) -> f64>(f: F, points: &[f64], tol: Tolerance) -> Result<f64> {
    let mut total = 0.0;
    for w in points.windows(2) {
        if w[1] > w[0] {
            total += checked(integrate_with(&f, w[0], w[1], tol))?;
        }
    }
    Ok(total)
}

fn checked(est: Estimate) -> Result<f64> {
    if !est.value.is_finite() {
        return Err(Error::Quadrature(format!(
            "non-finite estimate {}",
            est.value
        )));
    }
    if !est.converged && est.error > 1e-6 * est.value.abs().max(1.0) {
        return Err(Error::Quadrature(format!(
            "error estimate {:e} on value {:e}",
            est.error, est.value
        )));
    }
    Ok(est.value)
}

/// Monic three-term recurrence `p_{k+1}(x) = (x - a_k) p_k(x) - b_k p_{k-1}(x)`
/// of the orthogonal polynomials of a probability measure (`b_0 = 1`).
#[derive(Debug, Clone, PartialEq)]
pub struct Recurrence {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl Recurrence {
    /// Uniform probability measure on (-1, 1).
    pub fn legendre(n: usize) -> Self {
        let a = vec![0.0; n];
        let b = (0..n)
            .map(|k| {
                if k == 0 {
                    1.0
                } else {
                    let k2 = (k * k) as f64;
                    k2 / (4.0 * k2 - 1.0)
                }
            })
            .collect();
        Self { a, b }
    }

    /// Uniform probability measure on (0, 1).
    pub fn shifted_legendre(n: usize) -> Self {
        Self::legendre(n).affine(0.5, 0.5)
    }

    /// Beta(alpha, beta) probability measure on (0, 1).
    pub fn beta(alpha: f64, beta: f64, n: usize) -> Self {
        // Jacobi on (-1, 1) with weight (1-t)^p (1+t)^q, p = beta-1, q = alpha-1
        let p = beta - 1.0;
        let q = alpha - 1.0;
        let mut a = Vec::with_capacity(n);
        let mut b = Vec::with_capacity(n);
        for k in 0..n {
            let kf = k as f64;
            let s = 2.0 * kf + p + q;
            a.push(if k == 0 {
                (q - p) / (p + q + 2.0)
            } else {
                (q * q - p * p) / (s * (s + 2.0))
            });
            b.push(match k {
                0 => 1.0,
                1 => 4.0 * (1.0 + p) * (1.0 + q) / ((2.0 + p + q).powi(2) * (3.0 + p + q)),
                _ => {
                    4.0 * kf * (kf + p) * (kf + q) * (kf + p + q)
                        / (s * s * (s + 1.0) * (s - 1.0))
                }
            });
        }
        Self { a, b }.affine(0.5, 0.5)
    }

    /// Recurrence of the push-forward under `x -> shift + scale * x`.
    fn affine(self, scale: f64, shift: f64) -> Self {
        let a = self.a.iter().map(|&v| shift + scale * v).collect();
        let b = self
            .b
            .iter()
            .enumerate()
            .map(|(k, &v)| if k == 0 { v } else { v * scale * scale })
            .collect();
        Self { a, b }
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }
}

/// Gauss rule for a probability measure: weights sum to one.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn from_recurrence(rec: &Recurrence) -> Self {
        let n = rec.len();
        let mut jac = DMatrix::<f64>::zeros(n, n);
        for i in 0..n {
            jac[(i, i)] = rec.a[i];
            if i + 1 < n {
                let off = rec.b[i + 1].sqrt();
                jac[(i, i + 1)] = off;
                jac[(i + 1, i)] = off;
            }
        }
        let eig = SymmetricEigen::new(jac);
        let mut pairs: Vec<(f64, f64)> = (0..n)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
            .collect();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        }
    }

    pub fn legendre(n: usize) -> Self {
        Self::from_recurrence(&Recurrence::legendre(n))
    }

    pub fn shifted_legendre(n: usize) -> Self {
        Self::from_recurrence(&Recurrence::shifted_legendre(n))
    }

    pub fn beta(alpha: f64, beta: f64, n: usize) -> Self {
        Self::from_recurrence(&Recurrence::beta(alpha, beta, n))
    }

    pub fn expect<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}
