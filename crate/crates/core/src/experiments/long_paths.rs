//! Long `(X, Y)` runs: the sin² time average, occupation of the band
//! `|Y| ≤ M`, and the excursion decomposition behind the average.
//!
//! Both experiments draw member `i` from seed `derive_seed(master_seed, i)`,
//! so with equal `master_seed`, start and step they analyse the same paths.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::{count_at_least, positive, require};
use super::{ensemble, Csv, ExperimentConfig, Outcome, OutputFile};
use crate::ergodic::{decompose_path, excursion_stats, running_average_sin2, running_occupation};
use crate::error::{Error, Result};
use crate::path::{fmt_f64, SampledPath};
use crate::rescaling::{simulate_xy, RescaledPath, RescaledState};
use crate::rng::derive_seed;
use crate::stats::{mean_report, median, StatReport};

fn check_start(x0: f64, y0: f64) -> Result<()> {
    RescaledState::new(x0, y0).map(|_| ()).map_err(|e| Error::Config(e.to_string()))
}

fn simulate_member(master_seed: u64, i: u64, x0: f64, y0: f64, dt: f64, horizon: f64) -> Result<RescaledPath> {
    simulate_xy(x0, y0, derive_seed(master_seed, i), dt, horizon)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ErgodicSin2 {
    pub x0: f64,
    pub y0: f64,
    pub dt: f64,
    #[serde(rename = "horizon_T")]
    pub horizon: f64,
    /// Early time at which the occupation fraction is compared.
    #[serde(rename = "short_T")]
    pub short_horizon: f64,
    pub ensemble_size: usize,
    #[serde(rename = "M_threshold")]
    pub threshold: f64,
}

impl ErgodicSin2 {
    pub(crate) fn validate(&self) -> Result<()> {
        check_start(self.x0, self.y0)?;
        positive("dt", self.dt)?;
        positive("horizon_T", self.horizon)?;
        positive("short_T", self.short_horizon)?;
        positive("M_threshold", self.threshold)?;
        require(self.short_horizon <= self.horizon, || "short_T must not exceed horizon_T".into())?;
        require(self.horizon / self.dt >= 1.0, || "horizon_T must span at least one step".into())?;
        count_at_least("ensemble_size", self.ensemble_size, 2)
    }
}

/// Decade checkpoints up to the horizon, with `short` and the horizon itself.
fn checkpoints(dt: f64, short: f64, steps: usize) -> Vec<usize> {
    let mut at: Vec<usize> = (0..)
        .map(|e| 10f64.powi(e))
        .take_while(|t| t / dt <= steps as f64)
        .map(|t| (t / dt).round() as usize)
        .chain([(short / dt).round() as usize, steps])
        .filter(|&k| k >= 1 && k <= steps)
        .collect();
    at.sort_unstable();
    at.dedup();
    at
}

struct ErgodicMember {
    average: f64,
    running: Vec<f64>,
    occupation: Vec<f64>,
    min_distance: f64,
}

pub(crate) fn ergodic_sin2(p: &ErgodicSin2, config: &ExperimentConfig) -> Result<Outcome> {
    let steps = (p.horizon / p.dt).round() as usize;
    let at = checkpoints(p.dt, p.short_horizon, steps);
    let short_index = at
        .iter()
        .position(|&k| k == (p.short_horizon / p.dt).round() as usize)
        .expect("short_T is a checkpoint");

    let members: Vec<ErgodicMember> = ensemble(p.ensemble_size, |i| {
        let path = simulate_member(config.master_seed, i, p.x0, p.y0, p.dt, p.horizon)?;
        let min_distance = path.min_singular_distance;
        let RescaledPath { dt, x, y, .. } = path;
        let xs = SampledPath { dt, values: x };
        let running = running_average_sin2(&xs, &at)?;
        drop(xs);
        let occupation = running_occupation(&SampledPath { dt, values: y }, p.threshold, &at)?;
        Ok(ErgodicMember { average: *running.last().expect("checkpoints"), running, occupation, min_distance })
    })?;

    let band = config.tolerance("band");
    let averages: Vec<f64> = members.iter().map(|m| m.average).collect();
    let inside = averages.iter().filter(|a| (**a - 0.5).abs() <= band).count();
    let rate = inside as f64 / averages.len() as f64;
    let short_median = median(&members.iter().map(|m| m.occupation[short_index]).collect::<Vec<_>>());
    let long_median = median(&members.iter().map(|m| *m.occupation.last().expect("checkpoints")).collect::<Vec<_>>());
    let ratio = if short_median > 0.0 { long_median / short_median } else { f64::INFINITY };
    let min_distance = members.iter().map(|m| m.min_distance).fold(f64::INFINITY, f64::min);

    let reports = vec![
        StatReport::new("sin2_average_success_rate", rate, rate).at_least(config.tolerance("success_rate")),
        mean_report("sin2_average_mean", &averages)?,
        StatReport::new("occupation_median_short", short_median, short_median),
        StatReport::new("occupation_median_long", long_median, long_median),
        StatReport::new("occupation_decay_ratio", ratio, ratio).at_most(config.tolerance("occupation_ratio")),
        // The process never reaches the singular set; on the grid the
        // recorded distance must stay strictly positive.
        StatReport::new("min_singular_distance", min_distance, min_distance).above(0.0),
    ];

    let mut csv = Csv::new("member,t,average,occupation");
    for (i, m) in members.iter().enumerate() {
        for (j, &k) in at.iter().enumerate() {
            csv.row(&[i.to_string(), fmt_f64(k as f64 * p.dt), fmt_f64(m.running[j]), fmt_f64(m.occupation[j])]);
        }
    }
    Ok(Outcome { reports, files: vec![csv.into_file("ergodic.csv")] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Decomposition {
    pub x0: f64,
    pub y0: f64,
    pub dt: f64,
    #[serde(rename = "horizon_T")]
    pub horizon: f64,
    pub ensemble_size: usize,
    #[serde(rename = "M_values")]
    pub thresholds: Vec<f64>,
}

impl Decomposition {
    pub(crate) fn validate(&self) -> Result<()> {
        check_start(self.x0, self.y0)?;
        positive("dt", self.dt)?;
        positive("horizon_T", self.horizon)?;
        require(self.horizon / self.dt >= 1.0, || "horizon_T must span at least one step".into())?;
        count_at_least("ensemble_size", self.ensemble_size, 1)?;
        require(!self.thresholds.is_empty(), || "M_values must not be empty".into())?;
        require(self.thresholds.iter().all(|&m| m > 2.0 && m.is_finite()), || {
            "every M must exceed 2".into()
        })?;
        require(self.thresholds.windows(2).all(|w| w[0] < w[1]), || {
            "M_values must be strictly increasing".into()
        })
    }
}

#[derive(Debug, Clone, Copy)]
struct ThresholdStats {
    k1_fraction: f64,
    k0_fraction: f64,
    residual: f64,
    excursions: usize,
    duration_violations: usize,
    partition_ok: bool,
    sandwich_ok: bool,
}

pub(crate) fn decomposition(p: &Decomposition, config: &ExperimentConfig) -> Result<Outcome> {
    let members: Vec<(Vec<ThresholdStats>, Option<Vec<u8>>)> = ensemble(p.ensemble_size, |i| {
        let path = simulate_member(config.master_seed, i, p.x0, p.y0, p.dt, p.horizon)?;
        let mut audit = None;
        let mut per_m = Vec::with_capacity(p.thresholds.len());
        for (j, &m) in p.thresholds.iter().enumerate() {
            let d = decompose_path(&path, m)?;
            let r = excursion_stats(&d, &path)?;
            if i == 0 && j == 0 {
                let mut buf = Vec::new();
                d.write_csv(&mut buf)?;
                audit = Some(buf);
            }
            per_m.push(ThresholdStats {
                k1_fraction: r.k1_time_fraction,
                k0_fraction: r.k0_time_fraction,
                residual: r.excursion_residual,
                excursions: r.excursion_count,
                duration_violations: r.upper_bound_violations + r.lower_bound_violations,
                partition_ok: r.partition_holds(path.len()),
                sandwich_ok: r.sandwich_holds(),
            });
        }
        Ok((per_m, audit))
    })?;

    let slack = config.tolerance("residual_slack_dt") * p.dt;
    let k0_min = config.tolerance("k0_fraction_min");
    let mut reports = Vec::new();
    let mut k1_medians = Vec::new();
    for (j, &m) in p.thresholds.iter().enumerate() {
        let col = |f: fn(&ThresholdStats) -> f64| -> Vec<f64> { members.iter().map(|(s, _)| f(&s[j])).collect() };
        let k1 = median(&col(|s| s.k1_fraction));
        let k0 = median(&col(|s| s.k0_fraction));
        let worst_residual = col(|s| s.residual).into_iter().fold(0.0, f64::max);
        k1_medians.push(k1);
        reports.push(StatReport::new(format!("k1_time_fraction_median_M={m}"), k1, k1));
        reports.push(StatReport::new(format!("k0_time_fraction_median_M={m}"), k0, k0).at_least(k0_min));
        reports.push(
            StatReport::new(format!("excursion_residual_max_M={m}"), worst_residual, worst_residual)
                .at_most(8.0 * PI / m + slack),
        );
    }
    let rise = k1_medians.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let rise = if rise.is_finite() { rise } else { 0.0 };
    reports.push(StatReport::new("k1_fraction_monotone", rise, rise).at_most(config.tolerance("monotone_slack")));

    let all = || members.iter().flat_map(|(s, _)| s.iter());
    let violations = all().map(|s| s.duration_violations).sum::<usize>() as f64;
    let partition_failures = all().filter(|s| !s.partition_ok).count() as f64;
    let sandwich_failures = all().filter(|s| !s.sandwich_ok).count() as f64;
    reports.push(StatReport::new("duration_bound_violations", violations, violations).at_most(0.0));
    reports.push(StatReport::new("partition_identity_failures", partition_failures, partition_failures).at_most(0.0));
    reports.push(StatReport::new("sandwich_failures", sandwich_failures, sandwich_failures).at_most(0.0));

    let mut csv = Csv::new("M,member,k1_fraction,k0_fraction,residual,excursions");
    for (j, &m) in p.thresholds.iter().enumerate() {
        for (i, (s, _)) in members.iter().enumerate() {
            let s = &s[j];
            csv.row(&[
                fmt_f64(m),
                i.to_string(),
                fmt_f64(s.k1_fraction),
                fmt_f64(s.k0_fraction),
                fmt_f64(s.residual),
                s.excursions.to_string(),
            ]);
        }
    }
    let mut files = vec![csv.into_file("excursions.csv")];
    if let Some(Some(audit)) = members.first().map(|(_, a)| a.clone()) {
        files.push(OutputFile { name: "decomposition.csv".into(), contents: audit });
    }
    Ok(Outcome { reports, files })
}
