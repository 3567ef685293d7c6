//! Quadratic variation of the relative velocity, simulated in the slow
//! variables `(X, Y)` and mapped back.

use serde::{Deserialize, Serialize};

use super::config::{count_at_least, positive, require};
use super::{ensemble, Csv, ExperimentConfig, Outcome};
use crate::error::Result;
use crate::path::fmt_f64;
use crate::rescaling::{qv_of_vn, reconstruct_vn, simulate_xy, RescaledState};
use crate::rng::derive_seed;
use crate::stats::{mean, mean_report, StatReport};

const CURVE_POINTS: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QvLimit {
    pub n_values: Vec<f64>,
    pub u0: f64,
    pub v0: f64,
    pub ensemble_size: usize,
    /// Step of the slow `(X, Y)` integration.
    pub dt: f64,
    #[serde(rename = "horizon_T", default = "unit")]
    pub horizon: f64,
}

fn unit() -> f64 {
    1.0
}

impl QvLimit {
    pub(crate) fn validate(&self) -> Result<()> {
        require(!self.n_values.is_empty(), || "n_values must not be empty".into())?;
        for &n in &self.n_values {
            positive("n_values", n)?;
        }
        require(self.n_values.windows(2).all(|w| w[0] < w[1]), || {
            "n_values must be strictly increasing".into()
        })?;
        positive("dt", self.dt)?;
        positive("horizon_T", self.horizon)?;
        count_at_least("ensemble_size", self.ensemble_size, 2)?;
        for &n in &self.n_values {
            RescaledState::new(self.u0, n.cbrt() * self.v0)
                .map_err(|e| crate::Error::Config(e.to_string()))?;
        }
        Ok(())
    }

    /// Slow-time step count covering `horizon` in original time for this `n`.
    fn steps(&self, n: f64) -> usize {
        let slow_horizon = n.cbrt() * n.cbrt() * self.horizon;
        ((slow_horizon / self.dt).round() as usize).max(1)
    }
}

pub(crate) fn qv_limit(p: &QvLimit, config: &ExperimentConfig) -> Result<Outcome> {
    let mut reports = Vec::new();
    let mut per_n = Vec::new();
    let mut raw = Csv::new("n,member,qv");
    let mut curve = Csv::new("n,t,mean_qv,reference");

    for (k, &n) in p.n_values.iter().enumerate() {
        let n23 = n.cbrt() * n.cbrt();
        let steps = p.steps(n);
        // Snap the slow step so the horizon is a whole number of steps; the
        // reconstructed V then lives on the grid `horizon / steps`.
        let dt_slow = n23 * p.horizon / steps as f64;
        let dt_v = p.horizon / steps as f64;
        let marks: Vec<usize> = (1..=CURVE_POINTS).map(|j| j * steps / CURVE_POINTS).collect();

        let qv_paths: Vec<Vec<f64>> = ensemble(p.ensemble_size, |i| {
            let seed = derive_seed(config.master_seed, ((k as u64) << 32) | i);
            let path = simulate_xy(p.u0, n.cbrt() * p.v0, seed, dt_slow, n23 * p.horizon)?;
            let v = reconstruct_vn(&path.y_path(), n, dt_v)?;
            qv_of_vn(&v, &marks)
        })?;
        let finals: Vec<f64> = qv_paths.iter().map(|q| q[CURVE_POINTS - 1]).collect();
        let target = 0.5 * p.horizon;
        let dev: Vec<f64> = finals.iter().map(|q| (q - target).abs()).collect();

        reports.push(mean_report(&format!("qv_mean_n={n}"), &finals)?);
        let dev_report = mean_report(&format!("qv_abs_deviation_n={n}"), &dev)?;
        per_n.push(dev_report.estimate);
        reports.push(dev_report);

        for (i, q) in finals.iter().enumerate() {
            raw.row(&[fmt_f64(n), i.to_string(), fmt_f64(*q)]);
        }
        for (j, &m) in marks.iter().enumerate() {
            let t = m as f64 * dt_v;
            let avg = mean(&qv_paths.iter().map(|q| q[j]).collect::<Vec<_>>());
            curve.row(&[fmt_f64(n), fmt_f64(t), fmt_f64(avg), fmt_f64(0.5 * t)]);
        }
    }

    let rise = per_n.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let rise = if rise.is_finite() { rise } else { 0.0 };
    reports.push(StatReport::new("qv_deviation_monotone", rise, rise).at_most(config.tolerance("monotone_slack")));
    let last = *per_n.last().expect("n_values is non-empty");
    reports.push(
        StatReport::new("qv_deviation_largest_n", last, last).below(config.tolerance("deviation_max")),
    );
    Ok(Outcome { reports, files: vec![raw.into_file("qv.csv"), curve.into_file("qv_curve.csv")] })
}
