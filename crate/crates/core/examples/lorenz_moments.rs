//! Moments of the reduced Lorenz coefficient `X = ζ/(θ(1+ζ))` from Mellin
//! algebra with a PCE factor, against Monte Carlo.
//!
//! ```text
//! cargo run --release --example lorenz_moments
//! ```

use bifprob::models::BifurcationModel;
use bifprob::moments::coefficient_moments;
use bifprob::montecarlo::{mc_run, McOptions};
use bifprob::pce::ProjectOptions;
use bifprob::Distribution;

fn main() -> bifprob::Result<()> {
    let theta = Distribution::gamma(8.0, 1.0)?;
    let germ = Distribution::uniform(0.0, 1.0)?;
    let settings = [
        ("PS A", Distribution::uniform(4.0, 6.0)?, 7),
        ("PS B", Distribution::beta(2.0, 2.0)?, 5),
        ("PS C", Distribution::beta(2.0, 5.0)?, 5),
        ("PS D", Distribution::gen_beta(2.0, 5.0, -0.5, 0.5)?, 5),
    ];
    let model = BifurcationModel::Lorenz;
    for (name, zeta, n_moms) in settings {
        let inputs = [zeta, theta];
        let e = model.mellin_decomposition(&inputs, &germ, ProjectOptions::default()).expect("product form")?;
        let m = coefficient_moments(&e, n_moms)?;
        let mc = mc_run(model, &inputs, 1_000_000, 20211, McOptions { n_moms, ..Default::default() })?;
        println!("{name}: ζ ~ {zeta}, θ ~ {theta}");
        println!("  {:>3}  {:>13}  {:>13}  {:>9}  {:>8}", "n", "Mellin/PCE", "MC (1e6)", "MC s.e.", "rel diff");
        for k in 0..n_moms {
            let (a, b) = (m.mu[k], mc.moments.mu[k]);
            println!(
                "  {:>3}  {a:>13.5e}  {b:>13.5e}  {:>9.1e}  {:>7.2}%",
                k + 1,
                mc.moment_std_errors[k],
                100.0 * (a - b).abs() / b.abs()
            );
        }
        println!("  P(X < 0) by MC: {:.5}\n", mc.sign_probability);
    }
    Ok(())
}
