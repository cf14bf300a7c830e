//! Sigma-point estimates of the probability of a subcritical Hopf
//! bifurcation in the Watt governor, against Monte Carlo.
//!
//! ```text
//! cargo run --release --example unscented_watt
//! ```

use bifprob::models::BifurcationModel;
use bifprob::montecarlo::{mc_run, McOptions};
use bifprob::unscented::{default_kappa, sigma_points_p3, sigma_points_p5, ut_sign_probability};
use bifprob::Distribution;

fn main() -> bifprob::Result<()> {
    let model = BifurcationModel::WattGovernor;
    let rows = [((0.0, 1.0), (0.0, 1.0)), ((0.0, 1.0), (0.6, 1.0)), ((0.0, 1.0), (0.9, 1.0)), ((0.0, 0.2), (0.7, 0.95))];
    println!("{:>12}  {:>12}  {:>6}  {:>6}  {:>16}", "alpha", "beta", "P3", "P5", "MC (1e5)");
    for (alpha, beta) in rows {
        let inputs = [Distribution::uniform(beta.0, beta.1)?, Distribution::uniform(alpha.0, alpha.1)?];
        let p3 = ut_sign_probability(model, &sigma_points_p3(&inputs, default_kappa(2))?)?;
        let p5 = ut_sign_probability(model, &sigma_points_p5(&inputs)?)?;
        let mc = mc_run(model, &inputs, 100_000, 20211, McOptions::default())?;
        println!(
            "{:>12}  {:>12}  {:>6}  {:>6}  {:>8.4} ± {:.4}",
            format!("U({}, {})", alpha.0, alpha.1),
            format!("U({}, {})", beta.0, beta.1),
            p3.fraction(),
            p5.fraction(),
            mc.sign_probability,
            mc.sign_std_error()
        );
    }

    let inputs = [Distribution::uniform(0.0, 1.0)?, Distribution::uniform(0.0, 1.0)?];
    let est = ut_sign_probability(model, &sigma_points_p5(&inputs)?)?;
    println!("\nprecision-5 points on the unit square:\n{}", est.to_csv(model));
    Ok(())
}
