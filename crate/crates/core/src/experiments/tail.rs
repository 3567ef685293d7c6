//! Exponential tail bound for martingale excursions, on standard Brownian paths.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::config::{count_at_least, require};
use super::{ensemble, Csv, ExperimentConfig, Outcome};
use crate::error::{Error, Result};
use crate::path::{fmt_f64, SampledPath};
use crate::rng::stream_rng;
use crate::stats::{tail_bound_check, TailBoundParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailCase {
    pub b: f64,
    pub k: f64,
    #[serde(rename = "T")]
    pub duration: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TailBound {
    pub cases: Vec<TailCase>,
    pub ensemble_size: usize,
    /// Grid steps per path.
    pub steps: usize,
}

impl TailBound {
    pub(crate) fn validate(&self) -> Result<()> {
        require(!self.cases.is_empty(), || "cases must not be empty".into())?;
        for c in &self.cases {
            TailBoundParams::new(c.b, c.k, c.duration).map_err(|e| Error::Config(e.to_string()))?;
        }
        count_at_least("ensemble_size", self.ensemble_size, 1)?;
        count_at_least("steps", self.steps, 1)
    }
}

/// `k · B` on `[0, T]`: a martingale with quadratic-variation rate `k²`.
fn scaled_brownian(master_seed: u64, stream: u64, k: f64, duration: f64, steps: usize) -> SampledPath {
    let dt = duration / steps as f64;
    let scale = k * dt.sqrt();
    let mut rng = stream_rng(master_seed, stream);
    let mut x = 0.0;
    let mut values = Vec::with_capacity(steps + 1);
    values.push(x);
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        x += scale * z;
        values.push(x);
    }
    SampledPath { dt, values }
}

pub(crate) fn tail_bound(p: &TailBound, config: &ExperimentConfig) -> Result<Outcome> {
    let mut reports = Vec::new();
    let mut csv = Csv::new("b,k,T,exceedance,upper_99,bound");
    for c in &p.cases {
        let params = TailBoundParams::new(c.b, c.k, c.duration)?;
        let paths = ensemble(p.ensemble_size, |i| {
            // cases with equal (k, T) share their paths
            Ok(scaled_brownian(config.master_seed, i, c.k, c.duration, p.steps))
        })?;
        let r = tail_bound_check(&paths, params)?.rename(format!("tail_bound_b={}_k={}_T={}", c.b, c.k, c.duration));
        csv.row(&[
            fmt_f64(c.b),
            fmt_f64(c.k),
            fmt_f64(c.duration),
            fmt_f64(r.estimate),
            fmt_f64(r.statistic),
            fmt_f64(params.bound()),
        ]);
        reports.push(r);
    }
    Ok(Outcome { reports, files: vec![csv.into_file("tail.csv")] })
}
