//! Density approximants built from raw moments: Legendre, monic orthogonal
//! and transformed-moment forms, with their failure modes.
//!
//! ```text
//! cargo run --release --example polynomial_reconstruct [out_dir]
//! ```

use bifprob::models::BifurcationModel;
use bifprob::moments::{coefficient_moments, MomentSequence, Provenance};
use bifprob::pce::ProjectOptions;
use bifprob::reconstruct::{legendre_pdf_approx, monic_pdf_approx, transformed_moments_pdf_approx, MonicOptions};
use bifprob::Distribution;

fn main() -> bifprob::Result<()> {
    let target = Distribution::beta(3.0, 2.0)?;
    let m = MomentSequence::new((1..=12).map(|k| target.raw_moment(k)).collect(), Provenance::MellinExact);
    println!("target {target}; sup error on [0.05, 0.95]");
    let leg = legendre_pdf_approx(&m, (0.0, 1.0), 10)?;
    println!("  Legendre n=10      {:.2e}", leg.sup_error(|y| target.pdf(y), 0.05, 0.95, 2000));
    for n in [4, 10] {
        let a = monic_pdf_approx(&m, (0.0, 1.0), n, &MonicOptions::default())?;
        println!("  monic n={n:<2}         {:.2e}", a.sup_error(|y| target.pdf(y), 0.05, 0.95, 2000));
    }
    for n in [10, 30] {
        let a = transformed_moments_pdf_approx(&m, 1.0, n.min(12))?;
        let d = a.diagnostics()?;
        println!(
            "  transformed N={:<2}   {:.2e}  (mass {:.4})",
            n.min(12),
            a.sup_error(|y| target.pdf(y), 0.05, 0.95, 2000),
            d.integral
        );
    }

    // Lorenz coefficient, PS A: the result hinges on the assumed support
    let inputs = [Distribution::uniform(4.0, 6.0)?, Distribution::gamma(8.0, 1.0)?];
    let germ = Distribution::uniform(0.0, 1.0)?;
    let e = BifurcationModel::Lorenz
        .mellin_decomposition(&inputs, &germ, ProjectOptions::default())
        .expect("product form")?;
    let m = coefficient_moments(&e, 7)?;
    println!("\nLorenz PS A, Legendre degree 7");
    for support in [(0.0, 1.0), (0.0, 0.5)] {
        let a = legendre_pdf_approx(&m, support, 7)?;
        let d = a.diagnostics()?;
        println!(
            "  [{}, {}]: ∫ρ = {:.4}, ∫|ρ| = {:.4}, negative mass {:.3e}, min {:.3e}",
            support.0, support.1, d.integral, d.abs_integral, d.negative_mass, d.min_value
        );
        if let Some(dir) = std::env::args().nth(1) {
            std::fs::create_dir_all(&dir)?;
            std::fs::write(format!("{dir}/legendre_{}_{}.csv", support.0, support.1), a.to_csv(2048))?;
            a.clipped(2048)?.write_csv(format!("{dir}/legendre_{}_{}_clipped.csv", support.0, support.1))?;
        }
    }
    Ok(())
}
