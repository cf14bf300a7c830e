//! Runs a bundled experiment config through the library API, as the
//! `bifprob analyze` command does.
//!
//! ```text
//! cargo run --release --example run_config -- configs/ps_d.json [out_dir]
//! ```

use bifprob::cli::{run, Command, ExperimentConfig};

fn main() -> bifprob::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/ps_d.json").into());
    let cfg = ExperimentConfig::load(&path)?;
    let mut out = run(Command::Analyze, &cfg)?;
    if let Some(dir) = args.next() {
        out.write(dir.as_ref())?;
    }
    print!("{}", out.report.render());
    Ok(())
}
