//! Run a registered experiment from a config file, as `saccel run` does.
//!
//! cargo run --release --example run_experiment -- configs/tail_bound.json

use saccel::experiments::{self, ExperimentConfig};

fn main() -> saccel::Result<()> {
    let path = std::env::args().nth(1).unwrap_or_else(|| "configs/tail_bound.json".into());
    let config = ExperimentConfig::load(path.as_ref(), None, &["ensemble_size=2000".into()])?;
    println!("{} (seed {})", config.kind().name(), config.master_seed);

    let out = std::env::temp_dir().join(format!("saccel_{}", config.kind().name()));
    let summary = experiments::run(&config, Some(&out), None)?;
    for r in &summary.outcome.reports {
        let verdict = if !r.is_gating() { "info" } else if r.passed { "pass" } else { "FAIL" };
        println!("{verdict:>4} {:<36} {:.5}", r.name, r.estimate);
    }
    println!("outputs in {}", summary.out_dir.display());
    Ok(())
}
