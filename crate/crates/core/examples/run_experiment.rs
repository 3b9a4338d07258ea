//! Runs a JSON experiment config, defaulting to the shipped Z_4 identity suite.

use std::path::PathBuf;

use lca_tfa::experiment::{run, ExperimentConfig};

fn main() -> lca_tfa::error::Result<()> {
    let path = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/identities_z4.json")
    });
    let mut cfg = ExperimentConfig::read(&path)?;
    cfg.output.dir = std::env::temp_dir().join("lca-tfa-example");
    let summary = run(&cfg)?;
    for c in &summary.checks {
        println!("{:<28} {:>10.2e} {}", c.id, c.value, if c.passed { "ok" } else { "FAIL" });
    }
    println!("artifacts in {}", cfg.output_dir().display());
    Ok(())
}
