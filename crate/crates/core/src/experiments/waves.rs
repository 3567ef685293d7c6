//! Momentum diffusion in a finite set of overlapping waves.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::config::{count_at_least, positive, require};
use super::{ensemble, Csv, ExperimentConfig, Outcome};
use crate::dynamics::{estimate_diffusion, overlap_parameter, simulate_finite_waves, WaveSpectrum};
use crate::error::Result;
use crate::noise_field::PERIOD;
use crate::path::{fmt_f64, SampledPath};
use crate::rng::stream_rng;
use crate::stats::{variance, StatReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Quasilinear {
    pub wave_count: usize,
    pub mass: f64,
    #[serde(rename = "A0")]
    pub amplitude: f64,
    #[serde(default)]
    pub q0: f64,
    #[serde(default)]
    pub qdot0: f64,
    pub ensemble_size: usize,
    pub steps_per_period: usize,
    #[serde(rename = "horizon_T")]
    pub horizon: f64,
    /// Fit window `[t1, t2]` for the variance slope.
    pub window: (f64, f64),
    #[serde(default = "default_sample_every")]
    pub sample_every: usize,
}

fn default_sample_every() -> usize {
    16
}

impl Quasilinear {
    pub(crate) fn validate(&self) -> Result<()> {
        count_at_least("wave_count", self.wave_count, 2)?;
        positive("mass", self.mass)?;
        positive("A0", self.amplitude)?;
        count_at_least("ensemble_size", self.ensemble_size, 30)?;
        count_at_least("steps_per_period", self.steps_per_period, 1)?;
        count_at_least("sample_every", self.sample_every, 1)?;
        positive("horizon_T", self.horizon)?;
        let (t1, t2) = self.window;
        require(t1 >= 0.0 && t2 > t1 && t2 <= self.horizon, || {
            format!("window ({t1}, {t2}) must satisfy 0 ≤ t1 < t2 ≤ horizon_T")
        })
    }

    /// `(m/A₀)^{2/3} M`, large in the quasilinear regime.
    pub fn regime_parameter(&self) -> f64 {
        (self.mass / self.amplitude).powf(2.0 / 3.0) * self.wave_count as f64
    }

    /// `D = π A₀²`, with `Var(p_t − p_0) = D t`.
    pub fn quasilinear_coefficient(&self) -> f64 {
        PI * self.amplitude * self.amplitude
    }
}

pub(crate) fn quasilinear(p: &Quasilinear, config: &ExperimentConfig) -> Result<Outcome> {
    let dt = PERIOD / p.steps_per_period as f64;
    let paths: Vec<SampledPath> = ensemble(p.ensemble_size, |i| {
        let mut rng = stream_rng(config.master_seed, i);
        let spectrum = WaveSpectrum::random_phases(p.wave_count, p.amplitude, &mut rng)?;
        let traj = simulate_finite_waves((p.q0, p.qdot0), &spectrum, p.mass, dt, p.horizon, p.sample_every)?;
        Ok(traj.momentum_path(p.mass))
    })?;

    let d_ql = p.quasilinear_coefficient();
    let est = estimate_diffusion(&paths, p.window)?;
    let ratio = est.d / d_ql;
    let probe = WaveSpectrum::centered(vec![p.amplitude; p.wave_count], vec![0.0; p.wave_count])?;
    let overlap = overlap_parameter(&probe, p.mass, p.wave_count / 2 - 1)?;

    let reports = vec![
        StatReport::new("diffusion_ratio", ratio, (ratio - 1.0).abs())
            .with_ci(est.ci_low / d_ql, est.ci_high / d_ql)
            .at_most(config.tolerance("ratio_band")),
        StatReport::new("diffusion_coefficient", est.d, est.d).with_ci(est.ci_low, est.ci_high),
        StatReport::new("overlap_parameter", overlap, overlap),
        StatReport::new("regime_parameter", p.regime_parameter(), p.regime_parameter()),
    ];

    let mut csv = Csv::new("t,variance,reference");
    let samples = paths[0].len();
    for k in 0..samples {
        let t = k as f64 * paths[0].dt;
        let inc: Vec<f64> = paths.iter().map(|q| q.values[k] - q.values[0]).collect();
        let v = if k == 0 { 0.0 } else { variance(&inc) };
        csv.row(&[fmt_f64(t), fmt_f64(v), fmt_f64(d_ql * t)]);
    }
    Ok(Outcome { reports, files: vec![csv.into_file("variance.csv")] })
}
