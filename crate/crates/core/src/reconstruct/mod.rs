//! Densities and CDFs recovered from moment sequences.

mod gmm;
mod polynomial;

pub use gmm::{
    default_init, default_weight_matrix, fit_gmm, gmm_objective, FitOptions, GaussianMixture, GmmFit, RestartOutcome,
    WeightMatrix,
};
pub use polynomial::{
    legendre_pdf_approx, monic_pdf_approx, transformed_moments_pdf_approx, ApproxKind, DensityApprox, Diagnostics,
    MonicOptions, MAX_MONIC_DEGREE,
};

use crate::error::{Error, Result};

/// `[q(tail), q(1 - tail)]` of a sample, e.g. from a pilot Monte Carlo run.
pub fn support_from_samples(xs: &[f64], tail: f64) -> Result<(f64, f64)> {
    let mut v: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
    if v.len() < 2 {
        return Err(Error::domain("support estimate", "need at least two finite samples"));
    }
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let i = h.floor() as usize;
        let t = h - i as f64;
        if i + 1 < v.len() {
            v[i] + t * (v[i + 1] - v[i])
        } else {
            v[i]
        }
    };
    let (lo, hi) = (q(tail), q(1.0 - tail));
    if !(hi > lo) {
        return Err(Error::domain("support estimate", "sample has no spread"));
    }
    Ok((lo, hi))
}
