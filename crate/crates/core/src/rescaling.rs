//! Relative coordinates of a particle pair and the slow `(X, Y)` scaling.
//!
//! For two particles in the same field, half the position difference `U`
//! and the scaled half momentum difference `V` obey
//! `dU = n V dt`, `dV = sin U dW` with a reconstructed Wiener process `W`.
//! Under `X_t = U_{n^{-2/3} t}`, `Y_t = n^{1/3} V_{n^{-2/3} t}` this becomes
//! `dX = Y dt`, `dY = sin X dB`, which no longer depends on `n` except
//! through `Y_0`.

use std::f64::consts::PI;

use rand_distr::{Distribution, StandardNormal};

use crate::dynamics::{wrap_angle, EnsembleTrajectory, ParticleState, ScalingParams};
use crate::error::{Error, Result};
use crate::noise_field::FieldRealization;
use crate::path::{same_spacing, SampledPath};
use crate::rng;

const TWO_PI: f64 = 2.0 * PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RescaledState {
    pub x: f64,
    pub y: f64,
}

impl RescaledState {
    /// Validated state of `E = [0, 2π) × ℝ \ {(0,0), (π,0)}`.
    pub fn new(x: f64, y: f64) -> Result<Self> {
        let x = wrap_angle(x);
        if y == 0.0 && (x == 0.0 || x == PI) {
            return Err(Error::SingularInitialState { x, y });
        }
        Ok(Self { x, y })
    }
}

/// Euclidean distance from `(x, y)` to the nearer of `(0,0)` and `(π,0)`,
/// with `x` taken on the circle.
pub fn singular_distance(x: f64, y: f64) -> f64 {
    let x = wrap_angle(x);
    let dx0 = x.min(TWO_PI - x);
    let dxpi = (x - PI).abs();
    let d0 = dx0.hypot(y);
    let dpi = dxpi.hypot(y);
    d0.min(dpi)
}

/// A sampled `(X, Y)` path with `X` reduced to `[0, 2π)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RescaledPath {
    pub dt: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    /// Smallest distance to the singular set over the recorded grid points.
    pub min_singular_distance: f64,
}

impl RescaledPath {
    /// Wraps recorded samples; `x` is reduced modulo 2π.
    pub fn new(dt: f64, x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", "must be positive"));
        }
        if x.len() != y.len() {
            return Err(Error::GridMismatch(format!("lengths {} and {}", x.len(), y.len())));
        }
        let x = x.into_iter().map(wrap_angle).collect();
        Ok(Self::from_parts(dt, x, y))
    }

    fn from_parts(dt: f64, x: Vec<f64>, y: Vec<f64>) -> Self {
        let min_singular_distance = x
            .iter()
            .zip(&y)
            .map(|(&a, &b)| singular_distance(a, b))
            .fold(f64::INFINITY, f64::min);
        Self { dt, x, y, min_singular_distance }
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.len().saturating_sub(1) as f64 * self.dt
    }

    pub fn x_path(&self) -> SampledPath {
        SampledPath { dt: self.dt, values: self.x.clone() }
    }

    pub fn y_path(&self) -> SampledPath {
        SampledPath { dt: self.dt, values: self.y.clone() }
    }

    /// The state at time `t`, which must be a grid time.
    pub fn at_time(&self, t: f64) -> Result<RescaledState> {
        let k = grid_index(t, self.dt)?;
        if k >= self.len() {
            return Err(Error::OffGrid { time: t });
        }
        Ok(RescaledState { x: self.x[k], y: self.y[k] })
    }

    /// Prefix up to grid index `end` (inclusive).
    pub fn prefix(&self, end: usize) -> RescaledPath {
        let end = end.min(self.len().saturating_sub(1));
        Self::from_parts(self.dt, self.x[..=end].to_vec(), self.y[..=end].to_vec())
    }
}

fn grid_index(t: f64, dt: f64) -> Result<usize> {
    let k = t / dt;
    let r = k.round();
    if !(r >= 0.0) || (k - r).abs() > 1e-8 * r.max(1.0) {
        return Err(Error::OffGrid { time: t });
    }
    Ok(r as usize)
}

/// Strang step of `dX = Y dt`, `dY = sin X dB` on the universal cover.
#[inline]
fn xy_step(x: f64, y: f64, db: f64, dt: f64) -> (f64, f64) {
    let x_mid = x + 0.5 * dt * y;
    let y_new = y + x_mid.sin() * db;
    (x_mid + 0.5 * dt * y_new, y_new)
}

/// Simulates `(X, Y)` from `(x0, y0)` with fresh `N(0, dt)` increments.
pub fn simulate_xy(x0: f64, y0: f64, seed: u64, dt: f64, horizon: f64) -> Result<RescaledPath> {
    if !(dt > 0.0) || !(horizon >= 0.0) {
        return Err(Error::param("dt", "dt must be positive and horizon non-negative"));
    }
    let start = RescaledState::new(x0, y0)?;
    let steps = (horizon / dt).round() as usize;
    let scale = dt.sqrt();
    let mut r = rng::seeded(seed);
    let mut x = Vec::with_capacity(steps + 1);
    let mut y = Vec::with_capacity(steps + 1);
    let (mut xc, mut yc) = (start.x, start.y);
    x.push(xc);
    y.push(yc);
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(&mut r);
        (xc, yc) = xy_step(xc, yc, scale * z, dt);
        xc = wrap_angle(xc);
        x.push(xc);
        y.push(yc);
    }
    Ok(RescaledPath::from_parts(dt, x, y))
}

/// Same integrator driven by given increments `db` (one per step).
pub fn simulate_xy_with_increments(x0: f64, y0: f64, db: &[f64], dt: f64) -> Result<RescaledPath> {
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let start = RescaledState::new(x0, y0)?;
    let mut x = Vec::with_capacity(db.len() + 1);
    let mut y = Vec::with_capacity(db.len() + 1);
    let (mut xc, mut yc) = (start.x, start.y);
    x.push(xc);
    y.push(yc);
    for &b in db {
        (xc, yc) = xy_step(xc, yc, b, dt);
        xc = wrap_angle(xc);
        x.push(xc);
        y.push(yc);
    }
    Ok(RescaledPath::from_parts(dt, x, y))
}

/// Simulates `dU = n V dt`, `dV = sin U dW` with given increments; `U` is
/// reduced modulo 2π. Returns `(u, v)`.
pub fn simulate_uv(u0: f64, v0: f64, n: f64, dw: &[f64], dt: f64) -> Result<(SampledPath, SampledPath)> {
    if !(n > 0.0) {
        return Err(Error::param("n", "must be positive"));
    }
    if !(dt > 0.0) {
        return Err(Error::param("dt", "must be positive"));
    }
    let mut u = Vec::with_capacity(dw.len() + 1);
    let mut v = Vec::with_capacity(dw.len() + 1);
    let (mut uc, mut vc) = (wrap_angle(u0), v0);
    u.push(uc);
    v.push(vc);
    let half = 0.5 * n * dt;
    for &w in dw {
        let u_mid = uc + half * vc;
        vc += u_mid.sin() * w;
        uc = wrap_angle(u_mid + half * vc);
        u.push(uc);
        v.push(vc);
    }
    Ok((SampledPath { dt, values: u }, SampledPath { dt, values: v }))
}

/// `X_t = U_{n^{-2/3} t}`, `Y_t = n^{1/3} V_{n^{-2/3} t}` on the shared grid.
///
/// The output grid spacing is `n^{2/3}` times the input spacing; no
/// interpolation happens anywhere.
pub fn rescale_map(u_path: &SampledPath, v_path: &SampledPath, n: f64) -> Result<RescaledPath> {
    if !(n > 0.0) {
        return Err(Error::param("n", "must be positive"));
    }
    u_path.ensure_aligned(v_path)?;
    let amp = n.cbrt();
    let x = u_path.values.iter().map(|&u| wrap_angle(u)).collect();
    let y = v_path.values.iter().map(|&v| amp * v).collect();
    Ok(RescaledPath::from_parts(u_path.dt * amp * amp, x, y))
}

/// `V_t = n^{-1/3} Y_{n^{2/3} t}` sampled every `dt_v` in original time.
///
/// `n^{2/3} dt_v` must be a whole multiple of the `Y` grid spacing.
pub fn reconstruct_vn(y_path: &SampledPath, n: f64, dt_v: f64) -> Result<SampledPath> {
    if !(n > 0.0) {
        return Err(Error::param("n", "must be positive"));
    }
    if !(dt_v > 0.0) {
        return Err(Error::param("dt_v", "must be positive"));
    }
    let n23 = n.cbrt() * n.cbrt();
    let stride = grid_index(dt_v * n23, y_path.dt)?;
    if stride == 0 {
        return Err(Error::OffGrid { time: dt_v * n23 });
    }
    let scale = 1.0 / n.cbrt();
    let values = y_path.values.iter().step_by(stride).map(|&y| scale * y).collect();
    Ok(SampledPath { dt: dt_v, values })
}

/// Cumulative sum of squared increments of `v_path`, read at `sample_times`
/// (grid indices).
pub fn qv_of_vn(v_path: &SampledPath, sample_times: &[usize]) -> Result<Vec<f64>> {
    if v_path.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: v_path.len() });
    }
    if let Some(&bad) = sample_times.iter().find(|&&k| k >= v_path.len()) {
        return Err(Error::param("sample_times", format!("index {bad} beyond path of length {}", v_path.len())));
    }
    let mut cumulative = Vec::with_capacity(v_path.len());
    let mut acc = 0.0;
    cumulative.push(0.0);
    for d in v_path.increments() {
        acc += d * d;
        cumulative.push(acc);
    }
    Ok(sample_times.iter().map(|&k| cumulative[k]).collect())
}

/// The states of one particle together with the grid they were recorded on.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticlePath {
    pub field_seed: u64,
    pub dt: f64,
    pub sample_every: usize,
    pub states: Vec<ParticleState>,
}

impl EnsembleTrajectory {
    pub fn particle_path(&self, particle: usize) -> ParticlePath {
        ParticlePath {
            field_seed: self.field_seed,
            dt: self.dt,
            sample_every: self.sample_every,
            states: self.states[particle].clone(),
        }
    }
}

/// Half-difference and half-sum coordinates of a particle pair, and the
/// increments of the driving martingale `W` of the relative motion.
#[derive(Debug, Clone, PartialEq)]
pub struct RelativeCoords {
    pub dt: f64,
    /// `(Q − Q')/2` on the universal cover.
    pub u: Vec<f64>,
    /// `(P − P')/(2√π)`.
    pub v: Vec<f64>,
    /// `(Q + Q')/2` on the universal cover.
    pub u_prime: Vec<f64>,
    /// `(P + P')/(2√π)`.
    pub v_prime: Vec<f64>,
    /// `dW = π^{-1/2}(cos U' dC − sin U' dS)`, `U'` at each step midpoint.
    pub w_increments: Vec<f64>,
    /// Set when the pair starts on `{(kπ, 0)}`, where the relative motion never starts.
    pub degenerate: bool,
}

impl RelativeCoords {
    pub fn u_path(&self) -> SampledPath {
        SampledPath { dt: self.dt, values: self.u.clone() }
    }

    pub fn v_path(&self) -> SampledPath {
        SampledPath { dt: self.dt, values: self.v.clone() }
    }

    /// Cumulative `W`, starting at 0.
    pub fn w_path(&self) -> SampledPath {
        let mut acc = 0.0;
        let mut values = Vec::with_capacity(self.w_increments.len() + 1);
        values.push(0.0);
        for dw in &self.w_increments {
            acc += dw;
            values.push(acc);
        }
        SampledPath { dt: self.dt, values }
    }

    /// Midpoint of `U` during step `i`, where the field acts.
    pub fn u_mid(&self, i: usize, params: ScalingParams) -> f64 {
        self.u[i] + 0.5 * params.n() * self.v[i] * self.dt
    }
}

/// Builds the relative coordinates of two particles recorded at every step.
pub fn relative_coords(
    a: &ParticlePath,
    b: &ParticlePath,
    field: &FieldRealization,
    params: ScalingParams,
) -> Result<RelativeCoords> {
    if a.field_seed != field.seed() || b.field_seed != field.seed() {
        return Err(Error::GridMismatch("trajectories were driven by a different field".into()));
    }
    if a.sample_every != 1 || b.sample_every != 1 {
        return Err(Error::GridMismatch("relative coordinates need every grid step recorded".into()));
    }
    if !same_spacing(a.dt, b.dt) || !same_spacing(a.dt, field.grid().dt()) {
        return Err(Error::GridMismatch(format!("spacings {} and {}", a.dt, b.dt)));
    }
    if a.states.len() != b.states.len() || a.states.is_empty() {
        return Err(Error::GridMismatch(format!(
            "lengths {} and {}",
            a.states.len(),
            b.states.len()
        )));
    }
    let dt = a.dt;
    let len = a.states.len();
    let drift = 0.5 * params.a() * dt;
    let inv_2sqrtpi = 0.5 / PI.sqrt();
    let inv_sqrtpi = 1.0 / PI.sqrt();

    // Unwrap each Q by the exact Strang drift: ΔQ = A dt (p_i + p_{i+1}) / 2.
    let unwrap = |s: &[ParticleState]| -> Vec<f64> {
        let mut q = Vec::with_capacity(len);
        let mut acc = s[0].q;
        q.push(acc);
        for w in s.windows(2) {
            acc += drift * (w[0].p + w[1].p);
            q.push(acc);
        }
        q
    };
    let qa = unwrap(&a.states);
    let qb = unwrap(&b.states);

    let mut coords = RelativeCoords {
        dt,
        u: Vec::with_capacity(len),
        v: Vec::with_capacity(len),
        u_prime: Vec::with_capacity(len),
        v_prime: Vec::with_capacity(len),
        w_increments: Vec::with_capacity(len - 1),
        degenerate: false,
    };
    for i in 0..len {
        let (pa, pb) = (a.states[i].p, b.states[i].p);
        coords.u.push(0.5 * (qa[i] - qb[i]));
        coords.u_prime.push(0.5 * (qa[i] + qb[i]));
        coords.v.push(inv_2sqrtpi * (pa - pb));
        coords.v_prime.push(inv_2sqrtpi * (pa + pb));
    }
    for i in 0..len - 1 {
        let (dc, ds) = field.field_increment(i);
        let up_mid = coords.u_prime[i] + drift * (a.states[i].p + b.states[i].p) * 0.5;
        let (s, c) = up_mid.sin_cos();
        coords.w_increments.push(inv_sqrtpi * (c * dc - s * ds));
    }
    let u0 = coords.u[0];
    let k = (u0 / PI).round();
    coords.degenerate = coords.v[0] == 0.0 && (u0 - k * PI).abs() < 1e-15;
    Ok(coords)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::simulate_ensemble;
    use crate::noise_field::{sample_base_field, TimeGrid};
    use proptest::prelude::*;

    #[test]
    fn singular_initial_states_rejected() {
        assert!(matches!(simulate_xy(0.0, 0.0, 1, 0.01, 1.0), Err(Error::SingularInitialState { .. })));
        assert!(simulate_xy(PI, 0.0, 1, 0.01, 1.0).is_err());
        assert!(simulate_xy(TWO_PI, 0.0, 1, 0.01, 1.0).is_err());
        assert!(simulate_xy(PI, 1e-3, 1, 0.01, 1.0).is_ok());
    }

    #[test]
    fn singular_distance_geometry() {
        assert_eq!(singular_distance(0.0, 0.0), 0.0);
        assert!((singular_distance(PI, 3.0) - 3.0).abs() < 1e-15);
        assert!((singular_distance(TWO_PI - 0.1, 0.0) - 0.1).abs() < 1e-12);
        assert!((singular_distance(PI / 2.0, 0.0) - PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn zero_noise_is_pure_drift() {
        let dt = 1e-3;
        let db = vec![0.0; 2000];
        let p = simulate_xy_with_increments(0.5, 1.0, &db, dt).unwrap();
        for (i, (x, y)) in p.x.iter().zip(&p.y).enumerate() {
            assert_eq!(*y, 1.0);
            let expect = wrap_angle(0.5 + i as f64 * dt);
            assert!((x - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn same_seed_same_path() {
        let a = simulate_xy(1.0, 1.0, 9, 1e-2, 10.0).unwrap();
        let b = simulate_xy(1.0, 1.0, 9, 1e-2, 10.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.y, simulate_xy(1.0, 1.0, 10, 1e-2, 10.0).unwrap().y);
    }

    #[test]
    fn fast_rotation_averages_sin_squared() {
        let y0 = 1e3;
        let horizon = TWO_PI / y0;
        let dt = horizon / 1000.0;
        let p = simulate_xy(1.0, y0, 4, dt, horizon).unwrap();
        let avg = crate::ergodic::ergodic_average_sin2(&p.x_path()).unwrap();
        assert!((0.45..=0.55).contains(&avg), "{avg}");
    }

    #[test]
    fn rescale_at_n_one_is_identity() {
        let u = SampledPath { dt: 0.1, values: vec![0.1, 0.5, 2.0, 6.0] };
        let v = SampledPath { dt: 0.1, values: vec![1.0, -2.0, 0.3, 0.0] };
        let r = rescale_map(&u, &v, 1.0).unwrap();
        assert_eq!(r.x, u.values);
        assert_eq!(r.y, v.values);
        assert_eq!(r.dt, 0.1);
    }

    #[test]
    fn rescale_constant_velocity() {
        let n = 1000.0;
        let u = SampledPath { dt: 0.01, values: vec![1.0; 5] };
        let v = SampledPath { dt: 0.01, values: vec![0.7; 5] };
        let r = rescale_map(&u, &v, n).unwrap();
        assert!(r.y.iter().all(|y| (y - 7.0).abs() < 1e-12));
        assert!((r.dt - 1.0).abs() < 1e-12);
    }

    #[test]
    fn off_grid_requests_fail() {
        let y = SampledPath { dt: 0.1, values: vec![0.0; 10] };
        assert!(matches!(reconstruct_vn(&y, 8.0, 0.013), Err(Error::OffGrid { .. })));
        let p = simulate_xy(1.0, 1.0, 1, 0.1, 1.0).unwrap();
        assert!(p.at_time(0.3).is_ok());
        assert!(matches!(p.at_time(0.35), Err(Error::OffGrid { .. })));
        assert!(p.at_time(5.0).is_err());
    }

    #[test]
    fn qv_edge_cases() {
        let one = SampledPath { dt: 0.1, values: vec![1.0] };
        assert!(qv_of_vn(&one, &[0]).is_err());
        let steps = 1000;
        let dt = 1.0 / steps as f64;
        // linear path: QV = steps * dt^2 = dt
        let lin = SampledPath { dt, values: (0..=steps).map(|i| i as f64 * dt).collect() };
        let qv = qv_of_vn(&lin, &[steps]).unwrap();
        assert!((qv[0] - dt).abs() < 1e-12);
        assert!(qv_of_vn(&lin, &[steps + 1]).is_err());
    }

    #[test]
    fn brownian_qv_near_one() {
        let steps = 10_000;
        let dt = 1.0 / steps as f64;
        let mut r = rng::seeded(3);
        let mut acc = 0.0;
        let mut values = vec![0.0];
        for _ in 0..steps {
            let z: f64 = StandardNormal.sample(&mut r);
            acc += dt.sqrt() * z;
            values.push(acc);
        }
        let qv = qv_of_vn(&SampledPath { dt, values }, &[steps]).unwrap();
        assert!((qv[0] - 1.0).abs() < 0.05, "{}", qv[0]);
    }

    fn pair(seed: u64, a: f64, q: (f64, f64), p: (f64, f64)) -> (RelativeCoords, FieldRealization, ScalingParams) {
        let grid = TimeGrid::new(2000, 2000).unwrap();
        let field = sample_base_field(grid, seed);
        let params = ScalingParams::new(a).unwrap();
        let init = [ParticleState::new(q.0, p.0), ParticleState::new(q.1, p.1)];
        let tr = simulate_ensemble(&init, params, &field, 2000, 1).unwrap();
        let rc = relative_coords(&tr.particle_path(0), &tr.particle_path(1), &field, params).unwrap();
        (rc, field, params)
    }

    #[test]
    fn initial_relative_coordinates() {
        let (rc, _, _) = pair(1, 2.0, (1.0, 0.5), (0.3, -0.1));
        assert!((rc.u[0] - 0.25).abs() < 1e-15);
        assert!((rc.v[0] - 0.4 / (2.0 * PI.sqrt())).abs() < 1e-15);
        assert!(!rc.degenerate);
    }

    #[test]
    fn identical_particles_are_degenerate() {
        let (rc, _, _) = pair(1, 2.0, (1.0, 1.0), (0.3, 0.3));
        assert!(rc.degenerate);
        assert!(rc.u.iter().all(|&u| u == 0.0));
        assert!(rc.v.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn relative_velocity_is_driven_by_w() {
        // dV = sin(U_mid) dW holds step by step.
        let (rc, _, params) = pair(5, 3.0, (0.2, 2.5), (1.0, -0.5));
        for i in 0..rc.w_increments.len() {
            let dv = rc.v[i + 1] - rc.v[i];
            let pred = rc.u_mid(i, params).sin() * rc.w_increments[i];
            assert!((dv - pred).abs() < 1e-12, "step {i}: {dv} vs {pred}");
        }
        // dU = n V dt, trapezoid
        for i in 0..rc.u.len() - 1 {
            let du = rc.u[i + 1] - rc.u[i];
            let pred = 0.5 * params.n() * (rc.v[i] + rc.v[i + 1]) * rc.dt;
            assert!((du - pred).abs() < 1e-11);
        }
    }

    #[test]
    fn mismatched_inputs_rejected() {
        let grid = TimeGrid::new(100, 100).unwrap();
        let field = sample_base_field(grid, 1);
        let other = sample_base_field(grid, 2);
        let params = ScalingParams::new(1.0).unwrap();
        let init = [ParticleState::new(0.0, 1.0), ParticleState::new(1.0, 0.0)];
        let dense = simulate_ensemble(&init, params, &field, 100, 1).unwrap();
        let sparse = simulate_ensemble(&init, params, &field, 100, 2).unwrap();
        let (a, b) = (dense.particle_path(0), dense.particle_path(1));
        assert!(relative_coords(&a, &b, &other, params).is_err());
        assert!(relative_coords(&sparse.particle_path(0), &sparse.particle_path(1), &field, params).is_err());
        let mut short = b.clone();
        short.states.pop();
        assert!(matches!(relative_coords(&a, &short, &field, params), Err(Error::GridMismatch(_))));
    }

    proptest! {
        #[test]
        fn rescaling_commutes_with_simulation(
            seed in 0u64..500,
            n in 1.0f64..1e4,
            u0 in 0.1f64..6.0,
            v0 in -2.0f64..2.0,
        ) {
            // the slow-time step stays fine, as in the experiments
            let steps = 300;
            let dt: f64 = 1e-2 / (n.cbrt() * n.cbrt());
            let mut r = rng::seeded(seed);
            let dw: Vec<f64> = (0..steps)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(&mut r);
                    dt.sqrt() * z
                })
                .collect();
            let (u, v) = simulate_uv(u0, v0, n, &dw, dt).unwrap();
            let mapped = rescale_map(&u, &v, n).unwrap();
            let c = n.cbrt();
            let db: Vec<f64> = dw.iter().map(|w| c * w).collect();
            let direct = simulate_xy_with_increments(u0, c * v0, &db, dt * c * c).unwrap();
            prop_assert!((mapped.dt - direct.dt).abs() <= 1e-12 * direct.dt);
            for k in 0..=steps {
                let dx = (mapped.x[k] - direct.x[k]).abs();
                prop_assert!(dx.min(TWO_PI - dx) < 1e-9, "x at {}: {}", k, dx);
                prop_assert!((mapped.y[k] - direct.y[k]).abs() < 1e-9 * (1.0 + direct.y[k].abs()));
            }
        }

        #[test]
        fn v_round_trip(values in prop::collection::vec(-10.0f64..10.0, 2..50), n in 1.0f64..1e6) {
            let dt = 0.01;
            let v = SampledPath { dt, values: values.clone() };
            let u = SampledPath { dt, values: vec![1.0; values.len()] };
            let y = rescale_map(&u, &v, n).unwrap().y_path();
            let back = reconstruct_vn(&y, n, dt).unwrap();
            prop_assert_eq!(back.values.len(), values.len());
            for (a, b) in back.values.iter().zip(&values) {
                prop_assert!((a - b).abs() <= 4.0 * f64::EPSILON * b.abs().max(1e-300));
            }
        }
    }
}
