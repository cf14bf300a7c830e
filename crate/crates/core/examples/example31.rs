//! Product of a sign-indefinite and a positive input: `U(-1, 3) · Γ(3, 1)`.
//!
//! Compares the Mellin-convolution density with the closed form and reports
//! the exact and sampled probability of a negative product.
//!
//! ```text
//! cargo run --release --example example31 [out_dir]
//! ```

use bifprob::mellin::{default_grid, product_pdf_convolution, Example31, DEFAULT_GRID_POINTS};
use bifprob::montecarlo::{mc_run, McOptions};
use bifprob::models::BifurcationModel;

fn main() -> bifprob::Result<()> {
    let (r1, r2) = Example31::factors();
    let exact = Example31;
    println!("X = r1 r2 with r1 ~ {r1}, r2 ~ {r2}");
    println!("P(X < 0) closed form: {:.12}", exact.cdf(0.0));

    let grid = default_grid(&r1, &r2, DEFAULT_GRID_POINTS, 1);
    let pdf = product_pdf_convolution(&r1, &r2, &grid)?;
    let sup = grid
        .iter()
        .zip(&pdf.values)
        .map(|(&x, &v)| (v - exact.pdf(x)).abs())
        .fold(0.0, f64::max);
    println!("convolution on {} points over [{:.3}, {:.3}]", grid.len(), grid[0], grid[grid.len() - 1]);
    println!("  max |convolution - closed form| = {sup:.2e}");
    println!("  mass = {:.8}", pdf.mass());

    println!("\n{:>6}  {:>12}  {:>12}", "x", "pdf", "cdf");
    for x in [-3.0, -1.0, -1e-9, 1e-9, 1.0, 5.0, 15.0] {
        println!("{x:>6}  {:>12.8}  {:>12.8}", exact.pdf(x), exact.cdf(x));
    }

    let mc = mc_run(BifurcationModel::PitchforkProduct, &[r1, r2], 1_000_000, 20211, McOptions::default())?;
    println!(
        "\nMonte Carlo, {} samples: P(X < 0) = {:.5} ± {:.1e}",
        mc.n_samples,
        mc.sign_probability,
        mc.sign_std_error()
    );

    if let Some(dir) = std::env::args().nth(1) {
        std::fs::create_dir_all(&dir)?;
        pdf.write_csv(format!("{dir}/product_pdf.csv"))?;
        pdf.write_cdf_csv(format!("{dir}/product_cdf.csv"))?;
        mc.write_csvs(&dir, "mc")?;
        println!("tables written to {dir}");
    }
    Ok(())
}
