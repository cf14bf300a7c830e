//! Gaussian mixtures fitted by the generalized method of moments.
//!
//! The fit minimizes `r(η)ᵀ W r(η)` with `r_n = μ_n - m_n(η)`, where `m_n` are
//! the closed-form raw moments of the mixture. Parameters are searched
//! unconstrained: mixing proportions through a softmax of `k-1` logits and
//! standard deviations through `exp`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::normal_even_moment;
use crate::error::{Error, Result};
use crate::moments::MomentSequence;
use crate::optim::{nelder_mead, NelderMeadOptions};
use crate::specfun::erf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianMixture {
    pub pi: Vec<f64>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
}

impl GaussianMixture {
    pub fn new(pi: Vec<f64>, mu: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        let g = Self { pi, mu, sigma };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.pi.len();
        if k == 0 || self.mu.len() != k || self.sigma.len() != k {
            return Err(Error::domain("gaussian mixture", "pi, mu and sigma need equal nonzero length"));
        }
        if self.pi.iter().any(|p| !(*p >= 0.0)) || (self.pi.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::domain("gaussian mixture", format!("proportions {:?} must be >= 0 and sum to 1", self.pi)));
        }
        if self.sigma.iter().any(|s| !(*s > 0.0)) || self.mu.iter().any(|m| !m.is_finite()) {
            return Err(Error::domain("gaussian mixture", "sigma must be positive and means finite"));
        }
        Ok(())
    }

    pub fn k(&self) -> usize {
        self.pi.len()
    }

    fn components(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.pi
            .iter()
            .zip(&self.mu)
            .zip(&self.sigma)
            .map(|((&p, &m), &s)| (p, m, s))
    }

    /// Raw moment `m_n = Σ π_i Σ_{k even} C(n,k) μ_i^(n-k) σ_i^k (k-1)!!`.
    pub fn moment(&self, n: u32) -> f64 {
        self.components()
            .map(|(p, m, s)| {
                let mut binom = 1.0;
                let mut sum = 0.0;
                for k in 0..=n {
                    if k % 2 == 0 {
                        sum += binom * m.powi((n - k) as i32) * s.powi(k as i32) * normal_even_moment(k);
                    }
                    binom = binom * (n - k) as f64 / (k + 1) as f64;
                }
                p * sum
            })
            .sum()
    }

    pub fn pdf(&self, y: f64) -> f64 {
        self.components()
            .map(|(p, m, s)| {
                let z = (y - m) / s;
                p * (-0.5 * z * z).exp() / (s * (2.0 * std::f64::consts::PI).sqrt())
            })
            .sum()
    }

    pub fn cdf(&self, y: f64) -> f64 {
        let c: f64 = self
            .components()
            .map(|(p, m, s)| p * 0.5 * (1.0 + erf((y - m) / (s * std::f64::consts::SQRT_2))))
            .sum();
        c.clamp(0.0, 1.0)
    }

    pub fn sample_one<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.random();
        let mut acc = 0.0;
        let mut chosen = self.k() - 1;
        for (i, p) in self.pi.iter().enumerate() {
            acc += p;
            if u < acc {
                chosen = i;
                break;
            }
        }
        let z: f64 = rng.sample(StandardNormal);
        self.mu[chosen] + self.sigma[chosen] * z
    }

    fn pack(&self) -> Vec<f64> {
        let k = self.k();
        let base = self.pi[0].max(1e-300).ln();
        let mut x: Vec<f64> = self.pi[1..].iter().map(|p| p.max(1e-300).ln() - base).collect();
        x.extend_from_slice(&self.mu);
        x.extend(self.sigma.iter().map(|s| s.ln()));
        debug_assert_eq!(x.len(), 3 * k - 1);
        x
    }

    fn unpack(x: &[f64], k: usize) -> Self {
        let mut logits = vec![0.0];
        logits.extend_from_slice(&x[..k - 1]);
        let top = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let w: Vec<f64> = logits.iter().map(|z| (z - top).exp()).collect();
        let total: f64 = w.iter().sum();
        Self {
            pi: w.iter().map(|v| v / total).collect(),
            mu: x[k - 1..2 * k - 1].to_vec(),
            sigma: x[2 * k - 1..].iter().map(|v| v.exp()).collect(),
        }
    }
}

/// Diagonal GMM weighting matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightMatrix {
    pub diag: Vec<f64>,
}

impl WeightMatrix {
    pub fn identity(n: usize) -> Self {
        Self { diag: vec![1.0; n] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.diag.iter().any(|w| !(*w > 0.0) || !w.is_finite()) {
            return Err(Error::domain("weight matrix", "entries must be finite and positive"));
        }
        Ok(())
    }
}

/// `diag_i = 1/|μ_i|`, with 1 where `|μ_i| ≤ 1e-12`.
pub fn default_weight_matrix(m: &MomentSequence) -> WeightMatrix {
    WeightMatrix {
        diag: m
            .mu
            .iter()
            .map(|v| if v.abs() > 1e-12 { 1.0 / v.abs() } else { 1.0 })
            .collect(),
    }
}

/// `Σ W_n (μ_n - m_n(η))²`.
pub fn gmm_objective(gm: &GaussianMixture, m: &MomentSequence, w: &WeightMatrix) -> f64 {
    m.mu
        .iter()
        .zip(&w.diag)
        .enumerate()
        .map(|(i, (mu, wi))| {
            let r = mu - gm.moment(i as u32 + 1);
            wi * r * r
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    /// Objective evaluations per restart.
    pub max_evals: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_evals: 10_000,
            restarts: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestartOutcome {
    pub start: GaussianMixture,
    pub mixture: GaussianMixture,
    pub objective: f64,
    pub evaluations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmFit {
    pub mixture: GaussianMixture,
    pub objective: f64,
    /// Index of the winning restart.
    pub best: usize,
    pub restarts: Vec<RestartOutcome>,
}

/// Documented starting point: means spread from the 10% to the 90% point of
/// `[lo, hi]`, every `σ = (hi - lo)/4`, equal weights.
pub fn default_init(k: usize, support: (f64, f64)) -> Result<GaussianMixture> {
    let (lo, hi) = support;
    if !(hi > lo) || k == 0 {
        return Err(Error::domain("gmm init", format!("support [{lo}, {hi}] with k = {k}")));
    }
    let w = hi - lo;
    let mu = (0..k)
        .map(|i| {
            let t = if k == 1 { 0.5 } else { 0.1 + 0.8 * i as f64 / (k - 1) as f64 };
            lo + t * w
        })
        .collect();
    GaussianMixture::new(vec![1.0 / k as f64; k], mu, vec![w / 4.0; k])
}

/// Fits a `k`-component mixture to `m`; restart 0 starts at `init`, the
/// others at seeded Gaussian perturbations of it. The best restart wins.
pub fn fit_gmm(
    m: &MomentSequence,
    k: usize,
    w: &WeightMatrix,
    init: &GaussianMixture,
    opts: FitOptions,
) -> Result<GmmFit> {
    if k == 0 || m.n_moms() < 3 * k - 1 {
        return Err(Error::domain(
            "fit_gmm",
            format!("{} moments cannot identify {} parameters", m.n_moms(), 3 * k - 1),
        ));
    }
    if w.diag.len() != m.n_moms() {
        return Err(Error::domain("fit_gmm", "weight matrix size differs from moment count"));
    }
    w.validate()?;
    init.validate()?;
    if init.k() != k {
        return Err(Error::domain("fit_gmm", "initial mixture has the wrong component count"));
    }
    let width = init.sigma.iter().copied().fold(0.0, f64::max) * 4.0;
    let mut steps = vec![1.0; k - 1];
    steps.extend(std::iter::repeat_n(0.1 * width, k));
    steps.extend(std::iter::repeat_n(0.5, k));
    let x0 = init.pack();
    let objective = |x: &[f64]| gmm_objective(&GaussianMixture::unpack(x, k), m, w);
    let nm = NelderMeadOptions {
        max_evals: opts.max_evals,
        ..Default::default()
    };

    let restarts: Vec<RestartOutcome> = (0..opts.restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut start = x0.clone();
            if r > 0 {
                let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
                rng.set_stream(r as u64);
                for (v, s) in start.iter_mut().zip(&steps) {
                    let z: f64 = rng.sample(StandardNormal);
                    *v += z * s;
                }
            }
            let min = nelder_mead(objective, &start, &steps, nm);
            RestartOutcome {
                start: GaussianMixture::unpack(&start, k),
                mixture: GaussianMixture::unpack(&min.x, k),
                objective: min.f,
                evaluations: min.evaluations,
                converged: min.converged,
            }
        })
        .collect();

    let best = (0..restarts.len())
        .min_by(|&a, &b| restarts[a].objective.total_cmp(&restarts[b].objective))
        .unwrap();
    let winner = &restarts[best];
    if !winner.objective.is_finite() {
        return Err(Error::NonConvergence {
            evaluations: restarts.iter().map(|r| r.evaluations).sum(),
            objective: winner.objective,
        });
    }
    Ok(GmmFit {
        mixture: winner.mixture.clone(),
        objective: gmm_objective(&winner.mixture, m, w),
        best,
        restarts,
    })
}
