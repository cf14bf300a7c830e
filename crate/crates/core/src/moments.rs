//! Moment sequences of a bifurcation coefficient, from the Mellin algebra or
//! from sampling.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::distributions::Distribution;
use crate::error::{Error, Result};
use crate::mellin::{mellin_eval, ProductExpression};
use crate::models::BifurcationModel;
use crate::montecarlo::{sample_model, sample_moments};

pub const MAX_MOMENTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    MellinExact,
    MellinPce,
    MonteCarlo,
}

/// Raw moments `μ_1..μ_n` (μ_0 = 1 is implicit).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentSequence {
    pub mu: Vec<f64>,
    pub provenance: Provenance,
}

impl MomentSequence {
    pub fn new(mu: Vec<f64>, provenance: Provenance) -> Self {
        Self { mu, provenance }
    }

    pub fn n_moms(&self) -> usize {
        self.mu.len()
    }

    /// `μ_k` with `μ_0 = 1`.
    pub fn get(&self, k: usize) -> f64 {
        if k == 0 {
            1.0
        } else {
            self.mu[k - 1]
        }
    }

    pub fn variance(&self) -> Option<f64> {
        (self.mu.len() >= 2).then(|| self.mu[1] - self.mu[0] * self.mu[0])
    }

    /// Smallest eigenvalue of the largest Hankel matrix `[μ_{i+j}]` the
    /// sequence fills; nonnegative for a genuine moment sequence.
    pub fn hankel_min_eigenvalue(&self) -> Option<f64> {
        let m = self.mu.len() / 2;
        if m == 0 {
            return None;
        }
        let h = DMatrix::from_fn(m + 1, m + 1, |i, j| self.get(i + j));
        Some(SymmetricEigen::new(h).eigenvalues.min())
    }

    /// `σ² = μ₂ - μ₁² ≥ 0`; a violation flags PCE error, it is not fatal.
    pub fn hankel_ok(&self) -> bool {
        self.variance().is_none_or(|v| v >= 0.0)
    }
}

/// `μ_k = M(e)(k+1)` for `k = 1..=n_moms`.
pub fn coefficient_moments(e: &ProductExpression, n_moms: usize) -> Result<MomentSequence> {
    if !(1..=MAX_MOMENTS).contains(&n_moms) {
        return Err(Error::domain(
            "coefficient_moments",
            format!("n_moms = {n_moms} outside 1..={MAX_MOMENTS}"),
        ));
    }
    let mu = (2..=n_moms as i64 + 1).map(|s| mellin_eval(e, s)).collect::<Result<_>>()?;
    let provenance = if e.has_pce() {
        Provenance::MellinPce
    } else {
        Provenance::MellinExact
    };
    Ok(MomentSequence::new(mu, provenance))
}

/// Sample raw moments of the model coefficient.
pub fn mc_moments(
    model: BifurcationModel,
    inputs: &[Distribution],
    n_moms: usize,
    n_samples: usize,
    seed: u64,
) -> Result<MomentSequence> {
    if n_samples < 1000 {
        return Err(Error::domain("mc_moments", format!("n_samples = {n_samples} < 1000")));
    }
    let xs = sample_model(model, inputs, n_samples, seed)?;
    Ok(MomentSequence::new(sample_moments(&xs, n_moms).0, Provenance::MonteCarlo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pce::ProjectOptions;

    fn lorenz(zeta: Distribution) -> ProductExpression {
        let inputs = [zeta, Distribution::gamma(8.0, 1.0).unwrap()];
        let germ = Distribution::uniform(0.0, 1.0).unwrap();
        BifurcationModel::Lorenz
            .mellin_decomposition(&inputs, &germ, ProjectOptions::default())
            .unwrap()
            .unwrap()
    }

    fn close(got: &[f64], want: &[f64], rel: f64) {
        for (k, (g, w)) in got.iter().zip(want).enumerate() {
            assert!(((g - w) / w).abs() <= rel, "mu_{}: {g} vs {w}", k + 1);
        }
    }

    #[test]
    fn table_rows() {
        let t2 = coefficient_moments(&lorenz(Distribution::beta(2.0, 2.0).unwrap()), 5).unwrap();
        assert_eq!(t2.provenance, Provenance::MellinPce);
        close(&t2.mu, &[4.55e-2, 2.66e-3, 1.99e-4, 1.94e-5, 2.60e-6], 0.02);
        let a = coefficient_moments(&lorenz(Distribution::uniform(4.0, 6.0).unwrap()), 7).unwrap();
        close(&a.mu[..2], &[1.1882e-1, 1.6479e-2], 0.02);
        let d = coefficient_moments(&lorenz(Distribution::gen_beta(2.0, 5.0, -0.5, 0.5).unwrap()), 5).unwrap();
        close(&d.mu[..1], &[-4.6247e-2], 0.02);
        assert!(a.hankel_ok() && d.hankel_ok());
    }

    #[test]
    fn exact_provenance_is_hankel_positive() {
        let inputs = [Distribution::uniform(-1.0, 3.0).unwrap(), Distribution::gamma(3.0, 1.0).unwrap()];
        let germ = Distribution::uniform(0.0, 1.0).unwrap();
        let e = BifurcationModel::PitchforkProduct
            .mellin_decomposition(&inputs, &germ, ProjectOptions::default())
            .unwrap()
            .unwrap();
        let m = coefficient_moments(&e, 6).unwrap();
        assert_eq!(m.provenance, Provenance::MellinExact);
        assert!(m.hankel_min_eigenvalue().unwrap() > 0.0);
        assert!(coefficient_moments(&e, 0).is_err());
        assert!(coefficient_moments(&e, 11).is_err());
    }

    #[test]
    fn flags_non_moment_sequences() {
        let bad = MomentSequence::new(vec![1.0, 0.5], Provenance::MellinPce);
        assert!(!bad.hankel_ok());
        assert!(bad.hankel_min_eigenvalue().unwrap() < 0.0);
    }

    #[test]
    fn mc_point_masses_are_exact() {
        let pts = [Distribution::point(1.0).unwrap(), Distribution::point(2.0).unwrap()];
        let m = mc_moments(BifurcationModel::Lorenz, &pts, 3, 1000, 5).unwrap();
        assert_eq!(m.mu, vec![0.25, 0.0625, 0.015625]);
        assert!(mc_moments(BifurcationModel::Lorenz, &pts, 3, 999, 5).is_err());
    }

    #[test]
    fn json_shape() {
        let m = MomentSequence::new(vec![0.5, 0.25], Provenance::MonteCarlo);
        assert_eq!(serde_json::to_string(&m).unwrap(), r#"{"mu":[0.5,0.25],"provenance":"monte_carlo"}"#);
    }
}
