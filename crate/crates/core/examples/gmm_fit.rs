//! Gaussian-mixture method of moments on the Mellin moments of the Lorenz
//! coefficient, with the CDF compared to Monte Carlo.
//!
//! ```text
//! cargo run --release --example gmm_fit
//! ```

use bifprob::models::BifurcationModel;
use bifprob::moments::coefficient_moments;
use bifprob::montecarlo::{mc_run, sample_model, McOptions};
use bifprob::pce::ProjectOptions;
use bifprob::reconstruct::{default_init, default_weight_matrix, fit_gmm, support_from_samples, FitOptions};
use bifprob::Distribution;

fn main() -> bifprob::Result<()> {
    let theta = Distribution::gamma(8.0, 1.0)?;
    let germ = Distribution::uniform(0.0, 1.0)?;
    let model = BifurcationModel::Lorenz;
    let settings = [
        ("PS A", Distribution::uniform(4.0, 6.0)?, 7, vec![0.0, 0.05, 0.1, 0.35]),
        ("PS D", Distribution::gen_beta(2.0, 5.0, -0.5, 0.5)?, 5, vec![-0.15, -0.05, 0.0, 0.05]),
    ];
    for (name, zeta, n_moms, ys) in settings {
        let inputs = [zeta, theta];
        let e = model.mellin_decomposition(&inputs, &germ, ProjectOptions::default()).expect("product form")?;
        let m = coefficient_moments(&e, n_moms)?;
        let support = support_from_samples(&sample_model(model, &inputs, 10_000, 20211)?, 1e-9)?;
        let init = default_init(2, support)?;
        let fit = fit_gmm(&m, 2, &default_weight_matrix(&m), &init, FitOptions { seed: 20211, ..Default::default() })?;
        let gm = &fit.mixture;

        println!("{name}: k = 2 fit to {n_moms} moments, best restart {} of {}", fit.best + 1, fit.restarts.len());
        for (i, r) in fit.restarts.iter().enumerate() {
            println!("  restart {}: objective {:.4e} after {} evaluations", i + 1, r.objective, r.evaluations);
        }
        for i in 0..gm.k() {
            println!("  π = {:.5}  μ = {:+.5e}  σ = {:.5e}", gm.pi[i], gm.mu[i], gm.sigma[i]);
        }
        println!("  {:>3}  {:>13}  {:>13}", "n", "target", "mixture");
        for k in 1..=n_moms {
            println!("  {k:>3}  {:>13.5e}  {:>13.5e}", m.get(k), gm.moment(k as u32));
        }
        let mc = mc_run(model, &inputs, 1_000_000, 20211, McOptions::default())?;
        println!("  {:>8}  {:>9}  {:>9}", "y", "Gmix CDF", "MC CDF");
        for y in ys {
            println!("  {y:>8}  {:>9.4}  {:>9.4}", gm.cdf(y), mc.ecdf().eval(y));
        }
        println!();
    }
    Ok(())
}
