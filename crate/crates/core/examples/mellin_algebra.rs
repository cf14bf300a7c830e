//! Mellin-transform rules for products, powers and scalings of independent
//! factors, and the Gamma × Gamma density with an additive perturbation.
//!
//! ```text
//! cargo run --release --example mellin_algebra
//! ```

use bifprob::mellin::{gamma_gamma_pdf, mellin_eval, perturbation_sensitivity, MellinFactor, ProductExpression};
use bifprob::Distribution;

fn main() -> bifprob::Result<()> {
    let u = Distribution::uniform(0.5, 2.0)?;
    let g = Distribution::gamma(8.0, 1.0)?;

    // a · ξ^k has M(s) = a^{s-1} E[ξ^{k(s-1)}]
    let expr = ProductExpression::new(
        vec![MellinFactor::dist(u).scaled(3.0), MellinFactor::dist(g).pow(2).inverse()],
        1.0,
    )?;
    println!("Y = 3 U · Θ^-2, U ~ {u}, Θ ~ {g}");
    println!("{:>3}  {:>16}  {:>16}", "s", "M(Y)(s)", "E[Y^(s-1)] direct");
    // E[Θ^-2(s-1)] exists while 2(s-1) < 8
    for s in 1..=4i64 {
        let k = (s - 1) as u32;
        let direct = 3f64.powi(k as i32) * u.raw_moment(k) * g.signed_moment(-2 * k as i64)?;
        println!("{s:>3}  {:>16.10e}  {:>16.10e}", mellin_eval(&expr, s)?, direct);
    }

    // M(1/ξ)(s) = M(ξ)(2 - s)
    let inv = ProductExpression::new(vec![MellinFactor::dist(g).inverse()], 1.0)?;
    println!("\ninverse rule on {g}:");
    for s in 1..=4i64 {
        println!("  M(1/Θ)({s}) = {:.12}   M(Θ)({}) = {:.12}", mellin_eval(&inv, s)?, 2 - s, g.mellin(2 - s)?);
    }

    println!("\ndensity of Γ(2,1)·(Γ(3,1) + Γ(ε,1)) and its first-order change in ε");
    println!("{:>6}  {:>12}  {:>12}  {:>14}", "x", "ε = 0", "ε = 0.1", "d/dε (h=1e-4)");
    for x in [0.25, 1.0, 3.0, 6.0, 12.0] {
        println!(
            "{x:>6}  {:>12.8}  {:>12.8}  {:>14.8}",
            gamma_gamma_pdf(2.0, 3.0, 0.0, x)?,
            gamma_gamma_pdf(2.0, 3.0, 0.1, x)?,
            perturbation_sensitivity(2.0, 3.0, x, 1e-4)?
        );
    }
    Ok(())
}
