//! Polynomial chaos expansion of the Lorenz ratio factor `ζ/(1+ζ)` and the
//! Mellin transform of the resulting power polynomial.
//!
//! ```text
//! cargo run --release --example pce_lorenz
//! ```

use bifprob::pce::{project, ProjectOptions};
use bifprob::Distribution;

fn main() -> bifprob::Result<()> {
    let germ = Distribution::uniform(0.0, 1.0)?;
    let zeta = Distribution::beta(2.0, 2.0)?;
    for degree in [2, 4] {
        let pce = project(|z| z / (1.0 + z), &zeta, &germ, ProjectOptions { degree, nodes: None })?;
        let p = pce.collect_powers();
        println!("ζ ~ {zeta}, germ {germ}, N = {degree}");
        println!("  orthonormal coefficients: {:?}", rounded(&pce.coeffs));
        println!("  powers of ξ:              {:?}", rounded(&p.coeffs));
        println!("  {:>3}  {:>14}  {:>20}", "s", "E[p(ξ)^(s-1)]", "ĉ(s)");
        for s in 2..=4 {
            println!("  {s:>3}  {:>14.8e}  {:?}", p.mellin(s)?, rounded(&p.chat_coefficients(s)?));
        }
        println!();
    }

    // a negative-capable input needs no sign split on the PCE path
    let zeta = Distribution::gen_beta(2.0, 5.0, -0.5, 0.5)?;
    let p = project(|z| z / (1.0 + z), &zeta, &germ, ProjectOptions::default())?.collect_powers();
    println!("ζ ~ {zeta}: powers {:?}, E[p] = {:.6e}", rounded(&p.coeffs), p.mellin(2)?);
    Ok(())
}

fn rounded(v: &[f64]) -> Vec<f64> {
    v.iter().map(|c| (c * 1e6).round() / 1e6).collect()
}
