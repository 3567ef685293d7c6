//! Experiments on the particle system itself: single-particle momentum
//! law, independence of particles, and decorrelation across periods.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::{count_at_least, non_negative, require};
use super::{ensemble, Csv, ExperimentConfig, Outcome};
use crate::dynamics::{estimate_diffusion, simulate_ensemble, EnsembleTrajectory, ParticleState, ScalingParams};
use crate::error::Result;
use crate::noise_field::{sample_base_field, TimeGrid, PERIOD};
use crate::path::{fmt_f64, SampledPath};
use crate::rng::derive_seed;
use crate::stats::{
    consecutive_block_correlation, correlation_ci, increment_correlations, ks_normal, max_off_diagonal, mean,
    variance, variance_report, StatReport,
};

fn one() -> usize {
    1
}

/// Smallest divisor of `steps` that gives at most `points` recorded intervals.
pub(crate) fn record_stride(steps: usize, points: usize) -> usize {
    let target = steps.div_ceil(points.max(1)).max(1);
    (target..=steps).find(|s| steps.is_multiple_of(*s)).unwrap_or(steps.max(1))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrownianSingle {
    #[serde(rename = "A")]
    pub a: f64,
    pub ensemble_size: usize,
    pub steps_per_period: usize,
    #[serde(default = "one")]
    pub horizon_periods: usize,
    #[serde(default)]
    pub q0: f64,
    #[serde(default)]
    pub p0: f64,
}

impl BrownianSingle {
    pub(crate) fn validate(&self) -> Result<()> {
        non_negative("A", self.a)?;
        count_at_least("ensemble_size", self.ensemble_size, 30)?;
        count_at_least("steps_per_period", self.steps_per_period, 2)?;
        count_at_least("horizon_periods", self.horizon_periods, 1)
    }
}

pub(crate) fn brownian_single(p: &BrownianSingle, config: &ExperimentConfig) -> Result<Outcome> {
    let params = ScalingParams::new(p.a)?;
    let grid = TimeGrid::periods(p.steps_per_period, p.horizon_periods)?;
    let steps = grid.horizon_steps();
    let stride = record_stride(steps, 64);
    let start = [ParticleState::new(p.q0, p.p0)];

    let paths: Vec<SampledPath> = ensemble(p.ensemble_size, |i| {
        let field = sample_base_field(grid, derive_seed(config.master_seed, i));
        let traj = simulate_ensemble(&start, params, &field, steps, stride)?;
        Ok(traj.momentum_path(0))
    })?;

    let samples = paths[0].len();
    let dt_rec = paths[0].dt;
    let rec_per_period = p.steps_per_period / stride;
    let last: Vec<f64> = paths.iter().map(|q| q.values[samples - 1] - q.values[0]).collect();
    let first_period: Vec<f64> = if p.steps_per_period.is_multiple_of(stride) {
        paths.iter().map(|q| q.values[rec_per_period] - q.values[0]).collect()
    } else {
        last.clone()
    };
    let horizon = p.horizon_periods as f64 * PERIOD;

    let mut reports = vec![
        variance_report("variance_increment", &last, PI * horizon)?.at_most(config.tolerance("variance_rel")),
        ks_normal(&first_period, 0.0, 2.0 * PI * PI)?
            .rename("ks_period_increment")
            .p_above(config.tolerance("ks_alpha")),
    ];
    let d = estimate_diffusion(&paths, (0.1 * horizon, horizon))?;
    reports.push(
        StatReport::new("diffusion_coefficient", d.d, (d.d / PI - 1.0).abs()).with_ci(d.ci_low, d.ci_high),
    );

    let mut csv = Csv::new("t,variance,reference");
    for k in 0..samples {
        let inc: Vec<f64> = paths.iter().map(|q| q.values[k] - q.values[0]).collect();
        let t = k as f64 * dt_rec;
        let v = if k == 0 { 0.0 } else { variance(&inc) };
        csv.row(&[fmt_f64(t), fmt_f64(v), fmt_f64(PI * t)]);
    }
    let mut incs = Csv::new("member,increment");
    for (i, x) in last.iter().enumerate() {
        incs.row(&[i.to_string(), fmt_f64(*x)]);
    }
    Ok(Outcome { reports, files: vec![csv.into_file("variance.csv"), incs.into_file("increments.csv")] })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Independence {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "N")]
    pub particles: usize,
    pub q0: Vec<f64>,
    pub p0: Vec<f64>,
    pub ensemble_size: usize,
    pub steps_per_period: usize,
}

impl Independence {
    pub(crate) fn validate(&self) -> Result<()> {
        non_negative("A", self.a)?;
        count_at_least("N", self.particles, 2)?;
        require(self.q0.len() == self.particles && self.p0.len() == self.particles, || {
            format!("q0 and p0 need N = {} entries", self.particles)
        })?;
        count_at_least("ensemble_size", self.ensemble_size, 100)?;
        count_at_least("steps_per_period", self.steps_per_period, 2)
    }
}

struct MemberVariations {
    /// Upper-triangle cross-variations at the period end, row-major.
    cross: Vec<f64>,
    qv: Vec<f64>,
    endpoints: EnsembleTrajectory,
}

pub(crate) fn independence(p: &Independence, config: &ExperimentConfig) -> Result<Outcome> {
    let params = ScalingParams::new(p.a)?;
    let grid = TimeGrid::periods(p.steps_per_period, 1)?;
    let steps = grid.horizon_steps();
    let n = p.particles;
    let start: Vec<ParticleState> = p.q0.iter().zip(&p.p0).map(|(&q, &m)| ParticleState::new(q, m)).collect();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();

    let members: Vec<MemberVariations> = ensemble(p.ensemble_size, |i| {
        let field = sample_base_field(grid, derive_seed(config.master_seed, i));
        let traj = simulate_ensemble(&start, params, &field, steps, 1)?;
        let incs: Vec<Vec<f64>> = (0..n).map(|k| traj.momentum_path(k).increments().collect()).collect();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let cross = pairs.iter().map(|&(a, b)| dot(&incs[a], &incs[b])).collect();
        let qv = incs.iter().map(|v| dot(v, v)).collect();
        let endpoints = EnsembleTrajectory {
            dt: traj.dt,
            sample_every: steps,
            sample_times: vec![0, steps],
            states: traj.states.iter().map(|s| vec![s[0], s[steps]]).collect(),
            field_seed: traj.field_seed,
        };
        Ok(MemberVariations { cross, qv, endpoints })
    })?;

    let scale = 2.0 * PI * PI;
    let pair_means: Vec<f64> = (0..pairs.len())
        .map(|k| mean(&members.iter().map(|m| m.cross[k].abs() / scale).collect::<Vec<_>>()))
        .collect();
    let worst_pair = pair_means.iter().copied().fold(0.0, f64::max);
    let qv_ratios: Vec<f64> = members.iter().flat_map(|m| m.qv.iter().map(|q| q / scale)).collect();
    let qv_ratio = mean(&qv_ratios);
    let endpoints: Vec<EnsembleTrajectory> = members.iter().map(|m| m.endpoints.clone()).collect();
    let corr = increment_correlations(&endpoints, (0.0, PERIOD))?;
    let worst_corr = max_off_diagonal(&corr);

    let reports = vec![
        StatReport::new("cross_variation_max_pair", worst_pair, worst_pair)
            .below(config.tolerance("cross_variation_max")),
        StatReport::new("increment_correlation_max", worst_corr, worst_corr).below(config.tolerance("correlation_max")),
        StatReport::new("quadratic_variation_ratio", qv_ratio, (qv_ratio - 1.0).abs())
            .at_most(config.tolerance("qv_rel")),
    ];

    let mut cv = Csv::new("member,i,j,cross_variation");
    for (m, member) in members.iter().enumerate() {
        for (k, &(a, b)) in pairs.iter().enumerate() {
            cv.row(&[m.to_string(), a.to_string(), b.to_string(), fmt_f64(member.cross[k])]);
        }
    }
    let mut cm = Csv::new("i,j,correlation");
    for (a, row) in corr.iter().enumerate() {
        for (b, r) in row.iter().enumerate() {
            cm.row(&[a.to_string(), b.to_string(), fmt_f64(*r)]);
        }
    }
    Ok(Outcome { reports, files: vec![cv.into_file("cross_variation.csv"), cm.into_file("correlations.csv")] })
}

/// Two consecutive field periods for one particle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoPeriods {
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(default)]
    pub q0: f64,
    #[serde(default)]
    pub p0: f64,
    pub ensemble_size: usize,
    pub steps_per_period: usize,
}

impl TwoPeriods {
    pub(crate) fn validate(&self) -> Result<()> {
        non_negative("A", self.a)?;
        count_at_least("ensemble_size", self.ensemble_size, 100)?;
        count_at_least("steps_per_period", self.steps_per_period, 2)
    }
}

pub(crate) fn two_periods(p: &TwoPeriods, config: &ExperimentConfig, exploratory: bool) -> Result<Outcome> {
    let params = ScalingParams::new(p.a)?;
    let grid = TimeGrid::periods(p.steps_per_period, 2)?;
    let start = [ParticleState::new(p.q0, p.p0)];
    let trajs: Vec<EnsembleTrajectory> = ensemble(p.ensemble_size, |i| {
        let field = sample_base_field(grid, derive_seed(config.master_seed, i));
        simulate_ensemble(&start, params, &field, grid.horizon_steps(), p.steps_per_period)
    })?;

    let rho = consecutive_block_correlation(&trajs, 0, (0.0, PERIOD))?;
    let (lo, hi) = correlation_ci(rho, trajs.len());
    let first: Vec<f64> = trajs.iter().map(|t| t.states[0][1].p - t.states[0][0].p).collect();
    let second: Vec<f64> = trajs.iter().map(|t| t.states[0][2].p - t.states[0][1].p).collect();
    let total: Vec<f64> = first.iter().zip(&second).map(|(a, b)| a + b).collect();

    let mut corr = StatReport::new("period_increment_correlation", rho, rho.abs()).with_ci(lo, hi);
    let mut var = variance_report("variance_two_periods", &total, 4.0 * PI * PI)?;
    if !exploratory {
        corr = corr.below(config.tolerance("correlation_max"));
        var = var.at_most(config.tolerance("variance_rel"));
    }
    let reports = vec![
        corr,
        var,
        variance_report("variance_first_period", &first, 2.0 * PI * PI)?,
        ks_normal(&total, 0.0, 4.0 * PI * PI)?.rename("ks_two_period_increment"),
    ];

    let mut csv = Csv::new("member,first_period,second_period");
    for (i, (a, b)) in first.iter().zip(&second).enumerate() {
        csv.row(&[i.to_string(), fmt_f64(*a), fmt_f64(*b)]);
    }
    Ok(Outcome { reports, files: vec![csv.into_file("period_increments.csv")] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stride_divides_and_bounds_points() {
        assert_eq!(record_stride(1000, 64), 20);
        assert_eq!(record_stride(1000, 2000), 1);
        assert_eq!(record_stride(97, 10), 97);
        for steps in 1..300 {
            let s = record_stride(steps, 16);
            assert_eq!(steps % s, 0);
            assert!(steps / s <= 16);
        }
    }
}
