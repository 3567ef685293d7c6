//! Particle dynamics in the shared stochastic field.
//!
//! `dQ = A P dt`, `dP = sin Q ∘ dC + cos Q ∘ dS`, for any number of
//! non-interacting particles that all feel the same realization of
//! `(C, S)`. The finite-wave model and the diffusion-coefficient
//! estimator live in the submodules.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::noise_field::FieldRealization;
use crate::path::{fmt_f64, SampledPath};

mod diffusion;
mod finite_waves;

pub use diffusion::{estimate_diffusion, DiffusionEstimate};
pub use finite_waves::{
    overlap_parameter, simulate_finite_waves, wave_force_coefficients, FiniteWaveTrajectory,
    WaveSpectrum,
};

const TWO_PI: f64 = 2.0 * PI;

/// Reduces an angle to `[0, 2π)`.
#[inline]
pub fn wrap_angle(q: f64) -> f64 {
    let r = q.rem_euclid(TWO_PI);
    if r >= TWO_PI {
        0.0
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParticleState {
    pub q: f64,
    pub p: f64,
}

impl ParticleState {
    pub fn new(q: f64, p: f64) -> Self {
        Self { q: wrap_angle(q), p }
    }
}

/// Coupling `A` (inverse mass) and the derived `n = √π A`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingParams {
    a: f64,
    n: f64,
}

impl ScalingParams {
    pub fn new(a: f64) -> Result<Self> {
        if !(a >= 0.0) || !a.is_finite() {
            return Err(Error::param("A", format!("must be finite and non-negative, got {a}")));
        }
        Ok(Self { a, n: PI.sqrt() * a })
    }

    /// Parameters whose derived `n` is the given value.
    pub fn from_n(n: f64) -> Result<Self> {
        Self::new(n / PI.sqrt())
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn n(&self) -> f64 {
        self.n
    }
}

/// One-step integrators for the particle SDE.
///
/// All three use the same increments; the noise coefficients depend on `Q`
/// only, so the Itô and Stratonovich solutions coincide and the schemes
/// converge to the same limit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Scheme {
    /// Half drift, exact kick at the midpoint position, half drift.
    #[default]
    Strang,
    /// Explicit Euler-Maruyama (Itô).
    EulerMaruyama,
    /// Predictor-corrector trapezoid (Stratonovich).
    Heun,
}

/// Advances every particle by one Strang step with the shared increments.
pub fn step_particles(states: &mut [ParticleState], dc: f64, ds: f64, dt: f64, params: ScalingParams) {
    let half = 0.5 * params.a * dt;
    for s in states.iter_mut() {
        let q_mid = s.q + half * s.p;
        let (sin, cos) = q_mid.sin_cos();
        s.p += sin * dc + cos * ds;
        s.q = wrap_angle(q_mid + half * s.p);
    }
}

/// Advances every particle by one step of the chosen scheme.
pub fn step_with(
    scheme: Scheme,
    states: &mut [ParticleState],
    dc: f64,
    ds: f64,
    dt: f64,
    params: ScalingParams,
) {
    let a = params.a;
    match scheme {
        Scheme::Strang => step_particles(states, dc, ds, dt, params),
        Scheme::EulerMaruyama => {
            for s in states.iter_mut() {
                let (sin, cos) = s.q.sin_cos();
                s.q = wrap_angle(s.q + a * s.p * dt);
                s.p += sin * dc + cos * ds;
            }
        }
        Scheme::Heun => {
            for s in states.iter_mut() {
                let (sin0, cos0) = s.q.sin_cos();
                let p_pred = s.p + sin0 * dc + cos0 * ds;
                let q_pred = s.q + a * s.p * dt;
                let (sin1, cos1) = q_pred.sin_cos();
                let q_new = s.q + 0.5 * a * (s.p + p_pred) * dt;
                s.p += 0.5 * (sin0 + sin1) * dc + 0.5 * (cos0 + cos1) * ds;
                s.q = wrap_angle(q_new);
            }
        }
    }
}

/// Recorded states of `N` particles driven by one field realization.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleTrajectory {
    pub dt: f64,
    pub sample_every: usize,
    /// Grid step index of each recorded sample.
    pub sample_times: Vec<usize>,
    /// `states[particle][sample]`.
    pub states: Vec<Vec<ParticleState>>,
    pub field_seed: u64,
}

impl EnsembleTrajectory {
    pub fn particle_count(&self) -> usize {
        self.states.len()
    }

    /// Momentum of one particle as a path on the sample grid.
    pub fn momentum_path(&self, particle: usize) -> SampledPath {
        SampledPath {
            dt: self.dt * self.sample_every as f64,
            values: self.states[particle].iter().map(|s| s.p).collect(),
        }
    }

    pub fn position_path(&self, particle: usize) -> SampledPath {
        SampledPath {
            dt: self.dt * self.sample_every as f64,
            values: self.states[particle].iter().map(|s| s.q).collect(),
        }
    }

    /// Index of the sample recorded at grid step `step`, if any.
    pub fn sample_index(&self, step: usize) -> Option<usize> {
        self.sample_times.binary_search(&step).ok()
    }

    /// CSV with header `t,particle,q,p`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,particle,q,p")?;
        for (k, &step) in self.sample_times.iter().enumerate() {
            let t = fmt_f64(step as f64 * self.dt);
            for (i, path) in self.states.iter().enumerate() {
                let s = path[k];
                writeln!(out, "{t},{i},{},{}", fmt_f64(s.q), fmt_f64(s.p))?;
            }
        }
        Ok(())
    }
}

/// Integrates all particles over `horizon_steps` grid steps with the Strang scheme.
pub fn simulate_ensemble(
    initial: &[ParticleState],
    params: ScalingParams,
    field: &FieldRealization,
    horizon_steps: usize,
    sample_every: usize,
) -> Result<EnsembleTrajectory> {
    simulate_ensemble_with(Scheme::Strang, initial, params, field, horizon_steps, sample_every)
}

pub fn simulate_ensemble_with(
    scheme: Scheme,
    initial: &[ParticleState],
    params: ScalingParams,
    field: &FieldRealization,
    horizon_steps: usize,
    sample_every: usize,
) -> Result<EnsembleTrajectory> {
    if initial.is_empty() {
        return Err(Error::param("initial", "need at least one particle"));
    }
    if sample_every == 0 {
        return Err(Error::param("sample_every", "must be at least 1"));
    }
    let dt = field.grid().dt();
    let n_samples = horizon_steps / sample_every + 2;
    let mut states: Vec<Vec<ParticleState>> = initial
        .iter()
        .map(|s| {
            let mut v = Vec::with_capacity(n_samples);
            v.push(ParticleState::new(s.q, s.p));
            v
        })
        .collect();
    let mut sample_times = Vec::with_capacity(n_samples);
    sample_times.push(0);
    let mut current: Vec<ParticleState> = states.iter().map(|v| v[0]).collect();
    for step in 0..horizon_steps {
        let (dc, ds) = field.field_increment(step);
        step_with(scheme, &mut current, dc, ds, dt, params);
        let done = step + 1;
        if done % sample_every == 0 || done == horizon_steps {
            sample_times.push(done);
            for (path, s) in states.iter_mut().zip(&current) {
                path.push(*s);
            }
        }
    }
    Ok(EnsembleTrajectory { dt, sample_every, sample_times, states, field_seed: field.seed() })
}

/// Final states only; no trajectory storage.
pub fn propagate(
    scheme: Scheme,
    initial: &[ParticleState],
    params: ScalingParams,
    field: &FieldRealization,
    start_step: usize,
    steps: usize,
) -> Vec<ParticleState> {
    let dt = field.grid().dt();
    let mut current: Vec<ParticleState> =
        initial.iter().map(|s| ParticleState::new(s.q, s.p)).collect();
    for step in start_step..start_step + steps {
        let (dc, ds) = field.field_increment(step);
        step_with(scheme, &mut current, dc, ds, dt, params);
    }
    current
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise_field::{sample_base_field, TimeGrid};
    use proptest::prelude::*;

    fn params(a: f64) -> ScalingParams {
        ScalingParams::new(a).unwrap()
    }

    #[test]
    fn n_is_sqrt_pi_times_a() {
        let p = params(3.0);
        assert!((p.n() - PI.sqrt() * 3.0).abs() <= 1e-12 * p.n());
        assert!(ScalingParams::new(-1.0).is_err());
        assert!((ScalingParams::from_n(10.0).unwrap().n() - 10.0).abs() < 1e-12);
    }

    #[test]
    fn frozen_dynamics() {
        let mut s = [ParticleState::new(1.3, -0.4)];
        step_particles(&mut s, 0.0, 0.0, 0.01, params(0.0));
        assert_eq!(s[0], ParticleState::new(1.3, -0.4));
    }

    #[test]
    fn kick_at_origin() {
        let (a, c, sn, dt) = (2.5, 0.3, -0.7, 0.01);
        let mut s = [ParticleState::new(0.0, 0.0)];
        step_particles(&mut s, c, sn, dt, params(a));
        assert!((s[0].p - sn).abs() < 1e-15);
        assert!((s[0].q - wrap_angle(a * sn * dt / 2.0)).abs() < 1e-15);
    }

    #[test]
    fn wrap_angle_range() {
        for q in [-1e-18, -TWO_PI, 0.0, TWO_PI, 7.0 * TWO_PI + 0.5, -3.0] {
            let w = wrap_angle(q);
            assert!((0.0..TWO_PI).contains(&w), "{q} -> {w}");
        }
    }

    #[test]
    fn identical_particles_stay_identical() {
        let g = TimeGrid::new(200, 600).unwrap();
        let f = sample_base_field(g, 3);
        let init = [ParticleState::new(0.4, 0.2); 2];
        let tr = simulate_ensemble(&init, params(5.0), &f, 600, 7).unwrap();
        assert_eq!(tr.states[0], tr.states[1]);
        assert_eq!(tr.sample_times.first(), Some(&0));
        assert_eq!(tr.sample_times.last(), Some(&600));
        assert_eq!(tr.sample_times.len(), 600 / 7 + 2);
    }

    #[test]
    fn zero_horizon_returns_initial() {
        let g = TimeGrid::new(10, 10).unwrap();
        let f = sample_base_field(g, 3);
        let tr = simulate_ensemble(&[ParticleState::new(1.0, 2.0)], params(1.0), &f, 0, 1).unwrap();
        assert_eq!(tr.sample_times, vec![0]);
        assert_eq!(tr.states[0], vec![ParticleState::new(1.0, 2.0)]);
    }

    #[test]
    fn rejects_empty_or_bad_sampling() {
        let g = TimeGrid::new(10, 10).unwrap();
        let f = sample_base_field(g, 3);
        assert!(simulate_ensemble(&[], params(1.0), &f, 10, 1).is_err());
        assert!(simulate_ensemble(&[ParticleState::new(0.0, 0.0)], params(1.0), &f, 10, 0).is_err());
    }

    #[test]
    fn a_zero_moves_momentum_along_fixed_direction() {
        let g = TimeGrid::new(100, 100).unwrap();
        let f = sample_base_field(g, 8);
        let q0 = 0.9;
        let end = propagate(Scheme::Strang, &[ParticleState::new(q0, 1.0)], params(0.0), &f, 0, 100);
        let (c, s) = f.period_endpoint_values();
        assert!((end[0].p - (1.0 + q0.sin() * c + q0.cos() * s)).abs() < 1e-12);
        assert_eq!(end[0].q, q0);
    }

    #[test]
    fn csv_layout() {
        let g = TimeGrid::new(10, 10).unwrap();
        let f = sample_base_field(g, 3);
        let init = [ParticleState::new(0.0, 0.0), ParticleState::new(1.0, 0.0)];
        let tr = simulate_ensemble(&init, params(1.0), &f, 10, 5).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,particle,q,p");
        assert_eq!(lines.len(), 1 + 3 * 2);
        assert!(lines[2].starts_with("0.0000000000000000e0,1,"));
    }

    proptest! {
        #[test]
        fn permutation_equivariance(seed in 0u64..1000, shift in 1usize..4) {
            let g = TimeGrid::new(64, 128).unwrap();
            let f = sample_base_field(g, seed);
            let init: Vec<ParticleState> = (0..4)
                .map(|i| ParticleState::new(0.7 * i as f64, 0.3 - 0.2 * i as f64))
                .collect();
            let mut rotated = init.clone();
            rotated.rotate_left(shift);
            let a = simulate_ensemble(&init, params(3.0), &f, 128, 1).unwrap();
            let b = simulate_ensemble(&rotated, params(3.0), &f, 128, 1).unwrap();
            for i in 0..4 {
                prop_assert_eq!(&a.states[(i + shift) % 4], &b.states[i]);
            }
        }

        #[test]
        fn position_shift_by_full_turn(seed in 0u64..1000, q in 0.0f64..TWO_PI, p in -2.0f64..2.0) {
            let g = TimeGrid::new(64, 64).unwrap();
            let f = sample_base_field(g, seed);
            let a = propagate(Scheme::Strang, &[ParticleState { q, p }], params(2.0), &f, 0, 64);
            let b = propagate(Scheme::Strang, &[ParticleState { q: q + TWO_PI, p }], params(2.0), &f, 0, 64);
            prop_assert!((a[0].p - b[0].p).abs() < 1e-9);
            let dq = (a[0].q - b[0].q).abs();
            prop_assert!(dq.min(TWO_PI - dq) < 1e-9);
        }
    }
}
