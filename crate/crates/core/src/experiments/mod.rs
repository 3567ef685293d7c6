//! Named, config-driven experiments with JSON/CSV reporting.
//!
//! [`execute`] computes everything in memory; [`run`] then writes
//! `report.json`, the raw CSVs and `manifest.json`. Nothing is written
//! when the configuration is invalid or the computation fails.

mod config;
mod long_paths;
mod particles;
mod registry;
mod relative;
mod tail;
mod waves;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

pub use config::{apply_override, ExperimentConfig, ExperimentParams};
pub use long_paths::{Decomposition, ErgodicSin2};
pub use particles::{BrownianSingle, Independence, TwoPeriods};
pub use registry::{list_json, list_text, ExperimentKind, RegistryEntry};
pub use relative::QvLimit;
pub use tail::{TailBound, TailCase};
pub use waves::Quasilinear;

use crate::error::{Error, Result};
use crate::stats::StatReport;

/// `git describe`-style version of this build.
pub const VERSION: &str = match option_env!("SACCEL_GIT_DESCRIBE") {
    Some(v) => v,
    None => concat!("v", env!("CARGO_PKG_VERSION")),
};

/// A raw output file produced by an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct OutputFile {
    pub name: String,
    pub contents: Vec<u8>,
}

/// Everything an experiment produced, before anything touches the disk.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub reports: Vec<StatReport>,
    pub files: Vec<OutputFile>,
}

impl Outcome {
    /// True iff every report with a declared tolerance passed.
    pub fn passed(&self) -> bool {
        self.reports.iter().filter(|r| r.is_gating()).all(|r| r.passed)
    }

    pub fn report(&self, name: &str) -> Option<&StatReport> {
        self.reports.iter().find(|r| r.name == name)
    }

    /// `report.json` contents: the reports as a pretty JSON array.
    pub fn report_json(&self) -> Vec<u8> {
        let mut out = serde_json::to_vec_pretty(&self.reports).expect("reports serialize");
        out.push(b'\n');
        out
    }
}

/// Runs the experiment on the current rayon pool.
pub fn execute(config: &ExperimentConfig) -> Result<Outcome> {
    let mut outcome = match &config.params {
        ExperimentParams::BrownianSingle(p) => particles::brownian_single(p, config),
        ExperimentParams::ThethQv(p) => relative::qv_limit(p, config),
        ExperimentParams::ErgodicSin2(p) => long_paths::ergodic_sin2(p, config),
        ExperimentParams::NpartIndependence(p) => particles::independence(p, config),
        ExperimentParams::PeriodicExtension(p) => particles::two_periods(p, config, false),
        ExperimentParams::PathDecomposition(p) => long_paths::decomposition(p, config),
        ExperimentParams::QuasilinearFiniteM(p) => waves::quasilinear(p, config),
        ExperimentParams::TailBound(p) => tail::tail_bound(p, config),
        ExperimentParams::SmallAExploratory(p) => particles::two_periods(p, config, true),
    }?;
    if config.kind().is_exploratory() {
        for r in &mut outcome.reports {
            r.tolerance = None;
            r.passed = true;
        }
    }
    Ok(outcome)
}

/// Runs `execute` on a pool of `threads` workers (default: all cores).
pub fn execute_with_threads(config: &ExperimentConfig, threads: Option<usize>) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::Config("--threads must be at least 1".into()));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| execute(config))
}

/// Summary of a completed run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub passed: bool,
    pub outcome: Outcome,
}

/// Executes and writes `report.json`, the CSVs and `manifest.json` to
/// `out_dir`, falling back to the config's `output_dir`, then to
/// `out/<experiment>`.
pub fn run(config: &ExperimentConfig, out_dir: Option<&Path>, threads: Option<usize>) -> Result<RunSummary> {
    let dir = out_dir
        .map(Path::to_path_buf)
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(config.kind().name()));
    let started = Instant::now();
    let outcome = execute_with_threads(config, threads)?;
    let wall = started.elapsed().as_secs_f64();

    let manifest = json!({
        "experiment": config.kind().name(),
        "version": VERSION,
        "config": config.effective(),
        "master_seed": config.master_seed,
        "threads": threads.unwrap_or_else(rayon::current_num_threads),
        "passed": outcome.passed(),
        "wall_time_seconds": wall,
    });
    let mut files = vec![OutputFile { name: "report.json".into(), contents: outcome.report_json() }];
    files.extend(outcome.files.iter().cloned());
    let mut manifest_bytes = serde_json::to_vec_pretty(&manifest)?;
    manifest_bytes.push(b'\n');
    files.push(OutputFile { name: "manifest.json".into(), contents: manifest_bytes });
    write_all(&dir, &files)?;
    Ok(RunSummary { out_dir: dir, passed: outcome.passed(), outcome })
}

/// Writes every file or none: on failure, files already written are removed.
fn write_all(dir: &Path, files: &[OutputFile]) -> Result<()> {
    let created_dir = !dir.exists();
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    for f in files {
        let path = dir.join(&f.name);
        if let Err(e) = fs::write(&path, &f.contents) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            if created_dir {
                let _ = fs::remove_dir(dir);
            }
            return Err(e.into());
        }
        written.push(path);
    }
    Ok(())
}

/// Maps `work` over member indices `0..count` in parallel; results keep
/// index order, so downstream reductions see the same sequence regardless
/// of scheduling.
pub(crate) fn ensemble<T, F>(count: usize, work: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(u64) -> Result<T> + Sync + Send,
{
    (0..count as u64).into_par_iter().map(work).collect()
}

/// CSV text builder; rows are joined with LF.
pub(crate) struct Csv {
    text: String,
}

impl Csv {
    pub(crate) fn new(header: &str) -> Self {
        Csv { text: format!("{header}\n") }
    }

    pub(crate) fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub(crate) fn into_file(self, name: &str) -> OutputFile {
        OutputFile { name: name.into(), contents: self.text.into_bytes() }
    }
}
