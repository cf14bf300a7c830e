//! Seeded Monte Carlo oracle.
//!
//! Samples are drawn in fixed-size blocks; block `b` uses ChaCha8 stream `b`
//! of the run seed. Blocks are evaluated in parallel and concatenated in
//! order, so results depend only on the seed, never on thread scheduling.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::mellin::two_columns;
use crate::models::BifurcationModel;
use crate::moments::{MomentSequence, Provenance};

pub const BLOCK: usize = 1 << 14;
pub const DEFAULT_BINS: usize = 100;

/// Draws `n` model evaluations; deterministic in `seed`.
pub fn sample_model(model: BifurcationModel, inputs: &[Distribution], n: usize, seed: u64) -> Result<Vec<f64>> {
    if inputs.len() != model.dim() {
        return Err(Error::domain(
            "mc_run",
            format!("{} expects {} inputs, got {}", model.name(), model.dim(), inputs.len()),
        ));
    }
    let blocks = n.div_ceil(BLOCK);
    let parts: Vec<Vec<f64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64);
            let len = BLOCK.min(n - b * BLOCK);
            let mut r = vec![0.0; inputs.len()];
            (0..len)
                .map(|_| {
                    for (slot, d) in r.iter_mut().zip(inputs) {
                        *slot = d.sample_one(&mut rng);
                    }
                    model.eval_unchecked(&r)
                })
                .collect()
        })
        .collect();
    Ok(parts.concat())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<u64>,
}

impl Histogram {
    /// Equal-width bins over the sample range.
    pub fn from_samples(xs: &[f64], bins: usize) -> Self {
        let bins = bins.max(1);
        let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
        let mut hi = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if !(hi > lo) {
            hi = lo + 1.0;
        }
        let width = (hi - lo) / bins as f64;
        let edges = (0..=bins).map(|i| lo + width * i as f64).collect();
        let mut counts = vec![0u64; bins];
        for &x in xs {
            let i = (((x - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Self { edges, counts }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Normalized density at the bin centres.
    pub fn density(&self) -> (Vec<f64>, Vec<f64>) {
        let n = self.total().max(1) as f64;
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(|(e, &c)| (0.5 * (e[0] + e[1]), c as f64 / (n * (e[1] - e[0]))))
            .unzip()
    }

    pub fn to_csv(&self) -> String {
        let (x, d) = self.density();
        two_columns("density", &x, &d)
    }
}

/// Empirical CDF of a sample.
#[derive(Debug, Clone, PartialEq)]
pub struct Ecdf {
    sorted: Vec<f64>,
}

impl Ecdf {
    pub fn new(mut xs: Vec<f64>) -> Self {
        xs.retain(|x| !x.is_nan());
        xs.sort_by(f64::total_cmp);
        Self { sorted: xs }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.sorted.partition_point(|&v| v <= x) as f64 / self.sorted.len().max(1) as f64
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    /// Kolmogorov–Smirnov distance to a continuous CDF.
    pub fn ks_distance<F: Fn(f64) -> f64>(&self, cdf: F) -> f64 {
        let n = self.sorted.len() as f64;
        self.sorted
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let c = cdf(x);
                (c - i as f64 / n).abs().max(((i + 1) as f64 / n - c).abs())
            })
            .fold(0.0, f64::max)
    }

    /// ECDF tabulated on `points` evenly spaced over the sample range.
    pub fn to_csv(&self, points: usize) -> String {
        let (lo, hi) = match (self.sorted.first(), self.sorted.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => return two_columns("cumulative", &[], &[]),
        };
        let points = points.max(2);
        let xs: Vec<f64> = (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| self.eval(x)).collect();
        two_columns("cumulative", &xs, &ys)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub n_moms: usize,
    pub bins: usize,
}

impl Default for McOptions {
    fn default() -> Self {
        Self {
            n_moms: 5,
            bins: DEFAULT_BINS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McResult {
    pub model: BifurcationModel,
    pub n_samples: usize,
    pub seed: u64,
    pub sign_probability: f64,
    pub moments: MomentSequence,
    /// Standard errors of the sample moments.
    pub moment_std_errors: Vec<f64>,
    pub histogram: Histogram,
    #[serde(skip)]
    pub ecdf: Option<Ecdf>,
}

impl McResult {
    /// Binomial standard error of the sign probability.
    pub fn sign_std_error(&self) -> f64 {
        let p = self.sign_probability;
        (p * (1.0 - p) / self.n_samples as f64).sqrt()
    }

    pub fn ecdf(&self) -> &Ecdf {
        self.ecdf.as_ref().expect("ecdf is kept for fresh runs")
    }

    pub fn write_csvs(&self, dir: impl AsRef<Path>, stem: &str) -> Result<()> {
        let dir = dir.as_ref();
        std::fs::write(dir.join(format!("{stem}_histogram.csv")), self.histogram.to_csv())?;
        if let Some(e) = &self.ecdf {
            std::fs::write(dir.join(format!("{stem}_ecdf.csv")), e.to_csv(2048))?;
        }
        Ok(())
    }
}

pub fn mc_run(
    model: BifurcationModel,
    inputs: &[Distribution],
    n_samples: usize,
    seed: u64,
    opts: McOptions,
) -> Result<McResult> {
    if n_samples == 0 {
        return Err(Error::domain("mc_run", "n_samples must be >= 1"));
    }
    let xs = sample_model(model, inputs, n_samples, seed)?;
    let sub = xs.iter().filter(|&&x| model.is_subcritical(x)).count();
    let (mu, se) = sample_moments(&xs, opts.n_moms);
    Ok(McResult {
        model,
        n_samples,
        seed,
        sign_probability: sub as f64 / n_samples as f64,
        moments: MomentSequence::new(mu, Provenance::MonteCarlo),
        moment_std_errors: se,
        histogram: Histogram::from_samples(&xs, opts.bins),
        ecdf: Some(Ecdf::new(xs)),
    })
}

/// Raw sample moments `μ_1..μ_n` with their standard errors.
pub fn sample_moments(xs: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let m = xs.len() as f64;
    let mut sums = vec![0.0; 2 * n];
    for &x in xs {
        let mut p = 1.0;
        for s in sums.iter_mut() {
            p *= x;
            *s += p;
        }
    }
    let raw: Vec<f64> = sums.iter().map(|s| s / m).collect();
    let mu = raw[..n].to_vec();
    let se = (0..n)
        .map(|k| ((raw[2 * k + 1] - raw[k] * raw[k]).max(0.0) / m).sqrt())
        .collect();
    (mu, se)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mellin::example31_closed_form;

    fn ex31() -> [Distribution; 2] {
        [Distribution::uniform(-1.0, 3.0).unwrap(), Distribution::gamma(3.0, 1.0).unwrap()]
    }

    #[test]
    fn deterministic_and_block_invariant() {
        let a = mc_run(BifurcationModel::PitchforkProduct, &ex31(), 50_000, 9, McOptions::default()).unwrap();
        let b = mc_run(BifurcationModel::PitchforkProduct, &ex31(), 50_000, 9, McOptions::default()).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        let c = mc_run(BifurcationModel::PitchforkProduct, &ex31(), 50_000, 10, McOptions::default()).unwrap();
        assert_ne!(a.sign_probability, c.sign_probability);
        // a prefix of a longer run is the shorter run
        let long = sample_model(BifurcationModel::PitchforkProduct, &ex31(), 3 * BLOCK + 5, 9).unwrap();
        let short = sample_model(BifurcationModel::PitchforkProduct, &ex31(), 2 * BLOCK + 1, 9).unwrap();
        assert_eq!(&long[..short.len()], &short[..]);
    }

    #[test]
    fn single_threaded_pool_gives_same_bits() {
        let run = || sample_model(BifurcationModel::Lorenz, &[Distribution::beta(2.0, 2.0).unwrap(), Distribution::gamma(8.0, 1.0).unwrap()], 40_000, 3).unwrap();
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        assert_eq!(pool.install(run), run());
    }

    #[test]
    fn example31_sign_probability_and_ecdf() {
        let r = mc_run(BifurcationModel::PitchforkProduct, &ex31(), 100_000, 1, McOptions::default()).unwrap();
        assert!((r.sign_probability - 0.25).abs() < 3.0 * r.sign_std_error() + 1e-3);
        assert_eq!(r.histogram.total(), 100_000);
        assert_eq!(r.histogram.counts.len(), 100);
        let e = example31_closed_form();
        let d = r.ecdf().ks_distance(|x| e.cdf(x));
        assert!(d < 1.628 / (1e5f64).sqrt(), "KS {d}");
    }

    #[test]
    fn point_masses() {
        let pts = [Distribution::point(0.6).unwrap(), Distribution::point(0.5).unwrap()];
        let r = mc_run(BifurcationModel::WattGovernor, &pts, 1000, 0, McOptions::default()).unwrap();
        assert!(r.sign_probability == 0.0 || r.sign_probability == 1.0);
        let neg = [Distribution::point(-2.0).unwrap(), Distribution::point(3.0).unwrap()];
        let r = mc_run(BifurcationModel::PitchforkProduct, &neg, 1000, 0, McOptions::default()).unwrap();
        assert_eq!(r.sign_probability, 1.0);
        assert_eq!(r.moments.mu[0], -6.0);
        assert_eq!(r.moments.mu[1], 36.0);
        assert_eq!(r.moment_std_errors[0], 0.0);
    }

    #[test]
    fn csv_shapes() {
        let r = mc_run(BifurcationModel::PitchforkProduct, &ex31(), 5000, 2, McOptions::default()).unwrap();
        let h = r.histogram.to_csv();
        assert!(h.starts_with("x,density\n"));
        assert_eq!(h.lines().count(), 101);
        let (xs, d) = r.histogram.density();
        let mass: f64 = d.iter().sum::<f64>() * (xs[1] - xs[0]);
        assert!((mass - 1.0).abs() < 1e-12);
        assert!(r.ecdf().to_csv(50).starts_with("x,cumulative\n"));
        assert_eq!(r.ecdf().eval(f64::INFINITY), 1.0);
        assert!(mc_run(BifurcationModel::PitchforkProduct, &ex31(), 0, 2, McOptions::default()).is_err());
    }
}
