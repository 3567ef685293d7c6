//! Deterministic motion in a finite set of waves with a common wavenumber.
//!
//! `q̈ = m⁻¹ Σ_j A_j sin(q − ω_j t + φ_j)` with integer pulsations. The sum
//! factors as `X(t) sin q + Y(t) cos q`, so the two time-only coefficients
//! are tabulated once per realization (by FFT when the step divides the
//! period) and the RK4 loop itself is cheap.

use std::f64::consts::PI;

use rand::Rng;
use rustfft::{num_complex::Complex, FftPlanner};

use crate::error::{Error, Result};
use crate::path::SampledPath;

#[derive(Debug, Clone, PartialEq)]
pub struct WaveSpectrum {
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
    pulsations: Vec<i64>,
}

impl WaveSpectrum {
    pub fn new(amplitudes: Vec<f64>, phases: Vec<f64>, pulsations: Vec<i64>) -> Result<Self> {
        if amplitudes.is_empty() {
            return Err(Error::param("spectrum", "needs at least one wave"));
        }
        if phases.len() != amplitudes.len() || pulsations.len() != amplitudes.len() {
            return Err(Error::param("spectrum", "amplitude, phase and pulsation lengths differ"));
        }
        let phases = phases.into_iter().map(super::wrap_angle).collect();
        Ok(Self { amplitudes, phases, pulsations })
    }

    /// `M` waves with pulsations `j − M/2`, `j = 0..M`.
    pub fn centered(amplitudes: Vec<f64>, phases: Vec<f64>) -> Result<Self> {
        let m = amplitudes.len() as i64;
        let pulsations = (0..m).map(|j| j - m / 2).collect();
        Self::new(amplitudes, phases, pulsations)
    }

    /// Equal amplitudes with independent uniform phases.
    pub fn random_phases<R: Rng + ?Sized>(wave_count: usize, amplitude: f64, rng: &mut R) -> Result<Self> {
        let phases = (0..wave_count).map(|_| rng.random::<f64>() * 2.0 * PI).collect();
        Self::centered(vec![amplitude; wave_count], phases)
    }

    pub fn wave_count(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn pulsations(&self) -> &[i64] {
        &self.pulsations
    }

    /// Phase velocity `ω/k` with unit wavenumber.
    pub fn phase_velocity(&self, index: usize) -> f64 {
        self.pulsations[index] as f64
    }

    fn force_bound(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.abs()).sum()
    }
}

/// Resonance overlap between waves `index` and `index + 1`.
pub fn overlap_parameter(spectrum: &WaveSpectrum, mass: f64, index: usize) -> Result<f64> {
    if !(mass > 0.0) {
        return Err(Error::param("mass", "must be positive"));
    }
    if index + 1 >= spectrum.wave_count() {
        return Err(Error::param("index", format!("needs waves {index} and {}", index + 1)));
    }
    let gap = (spectrum.phase_velocity(index + 1) - spectrum.phase_velocity(index)).abs();
    if gap == 0.0 {
        return Err(Error::Degenerate("equal phase velocities".into()));
    }
    let width = |a: f64| 2.0 * (a / mass).sqrt();
    Ok((width(spectrum.amplitudes[index]) + width(spectrum.amplitudes[index + 1])) / gap)
}

/// `(X(t), Y(t))` by direct summation over the waves.
pub fn wave_force_coefficients(spectrum: &WaveSpectrum, t: f64) -> (f64, f64) {
    let mut x = 0.0;
    let mut y = 0.0;
    for ((a, phi), w) in spectrum.amplitudes.iter().zip(&spectrum.phases).zip(&spectrum.pulsations) {
        let (s, c) = (phi - *w as f64 * t).sin_cos();
        x += a * c;
        y += a * s;
    }
    (x, y)
}

/// Coefficients on `t_k = 2πk/points`, `k = 0..points`, by one FFT.
fn coefficient_table(spectrum: &WaveSpectrum, points: usize) -> Vec<(f64, f64)> {
    let mut buf = vec![Complex::new(0.0, 0.0); points];
    for ((a, phi), w) in spectrum.amplitudes.iter().zip(&spectrum.phases).zip(&spectrum.pulsations) {
        let bin = w.rem_euclid(points as i64) as usize;
        buf[bin] += Complex::from_polar(*a, *phi);
    }
    FftPlanner::new().plan_fft_forward(points).process(&mut buf);
    buf.into_iter().map(|z| (z.re, z.im)).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct FiniteWaveTrajectory {
    pub dt: f64,
    /// Unwrapped position.
    pub q: Vec<f64>,
    pub qdot: Vec<f64>,
}

impl FiniteWaveTrajectory {
    /// `p = m q̇` on the sample grid.
    pub fn momentum_path(&self, mass: f64) -> SampledPath {
        SampledPath { dt: self.dt, values: self.qdot.iter().map(|v| mass * v).collect() }
    }
}

/// RK4 integration of the finite-wave equation of motion.
///
/// When `2π/dt` is an integer the force coefficients come from an FFT
/// table on the half-step grid; otherwise they are summed directly.
pub fn simulate_finite_waves(
    initial: (f64, f64),
    spectrum: &WaveSpectrum,
    mass: f64,
    dt: f64,
    horizon: f64,
    sample_every: usize,
) -> Result<FiniteWaveTrajectory> {
    if !(mass > 0.0) {
        return Err(Error::param("mass", "must be positive"));
    }
    if !(dt > 0.0) || !(horizon >= 0.0) {
        return Err(Error::param("dt", "dt must be positive and horizon non-negative"));
    }
    if sample_every == 0 {
        return Err(Error::param("sample_every", "must be at least 1"));
    }
    let kick = dt * spectrum.force_bound() / mass;
    if kick > 0.1 {
        log::warn!("finite-wave step may be too coarse: dt*max|F|/m = {kick:.3}");
    }

    let steps = (horizon / dt).round() as usize;
    let per_period = 2.0 * PI / dt;
    let table = if (per_period - per_period.round()).abs() < 1e-9 * per_period
        && 2 * per_period.round() as usize >= spectrum.wave_count()
    {
        Some(coefficient_table(spectrum, 2 * per_period.round() as usize))
    } else {
        None
    };
    let coeff = |half_index: usize| -> (f64, f64) {
        match &table {
            Some(t) => t[half_index % t.len()],
            None => wave_force_coefficients(spectrum, half_index as f64 * 0.5 * dt),
        }
    };
    let inv_m = 1.0 / mass;
    let accel = |q: f64, (x, y): (f64, f64)| -> f64 {
        let (s, c) = q.sin_cos();
        inv_m * (x * s + y * c)
    };

    let (mut q, mut v) = initial;
    let mut out_q = Vec::with_capacity(steps / sample_every + 2);
    let mut out_v = Vec::with_capacity(steps / sample_every + 2);
    out_q.push(q);
    out_v.push(v);
    for step in 0..steps {
        let c0 = coeff(2 * step);
        let c1 = coeff(2 * step + 1);
        let c2 = coeff(2 * step + 2);
        let k1q = v;
        let k1v = accel(q, c0);
        let k2q = v + 0.5 * dt * k1v;
        let k2v = accel(q + 0.5 * dt * k1q, c1);
        let k3q = v + 0.5 * dt * k2v;
        let k3v = accel(q + 0.5 * dt * k2q, c1);
        let k4q = v + dt * k3v;
        let k4v = accel(q + dt * k3q, c2);
        q += dt / 6.0 * (k1q + 2.0 * k2q + 2.0 * k3q + k4q);
        v += dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if (step + 1) % sample_every == 0 {
            out_q.push(q);
            out_v.push(v);
        }
    }
    Ok(FiniteWaveTrajectory { dt: dt * sample_every as f64, q: out_q, qdot: out_v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn spectrum_validation() {
        assert!(WaveSpectrum::centered(vec![], vec![]).is_err());
        assert!(WaveSpectrum::centered(vec![1.0], vec![]).is_err());
        let s = WaveSpectrum::centered(vec![1.0; 4], vec![7.0; 4]).unwrap();
        assert_eq!(s.pulsations(), &[-2, -1, 0, 1]);
        assert!(s.phases().iter().all(|p| (0.0..2.0 * PI).contains(p)));
    }

    #[test]
    fn overlap_values() {
        let zero = WaveSpectrum::centered(vec![0.0, 0.0], vec![0.0, 0.0]).unwrap();
        assert_eq!(overlap_parameter(&zero, 1.0, 0).unwrap(), 0.0);
        let unit = WaveSpectrum::centered(vec![1.0, 1.0], vec![0.0, 0.0]).unwrap();
        assert!((overlap_parameter(&unit, 1.0, 0).unwrap() - 4.0).abs() < 1e-15);
        let s_full = overlap_parameter(&unit, 1.0, 0).unwrap();
        let s_half = overlap_parameter(&unit, 0.5, 0).unwrap();
        assert!((s_half / s_full - 2f64.sqrt()).abs() < 1e-14);
        assert!(overlap_parameter(&unit, 1.0, 1).is_err());
        let same = WaveSpectrum::new(vec![1.0, 1.0], vec![0.0, 0.0], vec![3, 3]).unwrap();
        assert!(matches!(overlap_parameter(&same, 1.0, 0), Err(Error::Degenerate(_))));
    }

    #[test]
    fn fft_table_matches_direct_sum() {
        let mut r = rng::seeded(11);
        let s = WaveSpectrum::random_phases(37, 0.8, &mut r).unwrap();
        let points = 512;
        let table = coefficient_table(&s, points);
        for k in [0, 1, 17, 255, 511] {
            let t = 2.0 * PI * k as f64 / points as f64;
            let (x, y) = wave_force_coefficients(&s, t);
            assert!((table[k].0 - x).abs() < 1e-10, "k={k}");
            assert!((table[k].1 - y).abs() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn free_particle() {
        let s = WaveSpectrum::centered(vec![0.0; 8], vec![0.3; 8]).unwrap();
        let tr = simulate_finite_waves((0.5, 1.5), &s, 1.0, 2.0 * PI / 1000.0, 3.0, 1).unwrap();
        for (i, (q, v)) in tr.q.iter().zip(&tr.qdot).enumerate() {
            assert!((q - (0.5 + 1.5 * i as f64 * tr.dt)).abs() < 1e-12);
            assert_eq!(*v, 1.5);
        }
    }

    #[test]
    fn single_wave_energy_is_conserved() {
        // In the wave frame psi = q - w t + phi: psi'' = (A/m) sin psi.
        let (a, m, phi) = (0.01, 1.0, 0.4);
        let s = WaveSpectrum::centered(vec![a], vec![phi]).unwrap();
        let w = s.pulsations()[0] as f64;
        let dt = 1e-3;
        let tr = simulate_finite_waves((0.0, w + 0.05), &s, m, dt, 4.0 * PI, 1).unwrap();
        let energy = |i: usize| {
            let t = i as f64 * tr.dt;
            let psi = tr.q[i] - w * t + phi;
            let dpsi = tr.qdot[i] - w;
            0.5 * dpsi * dpsi + a / m * psi.cos()
        };
        let per_period = (2.0 * PI / dt).round() as usize;
        let e0 = energy(0);
        for i in (0..tr.q.len()).step_by(per_period) {
            assert!((energy(i) - e0).abs() < 1e-6);
        }
        // bounded velocity near the resonance
        assert!(tr.qdot.iter().all(|v| (v - w).abs() < 0.5));
    }

    #[test]
    fn fft_and_direct_routes_agree() {
        let mut r = rng::seeded(3);
        let s = WaveSpectrum::random_phases(16, 0.5, &mut r).unwrap();
        let aligned = simulate_finite_waves((0.1, 0.0), &s, 1.0, 2.0 * PI / 2000.0, 2.0, 1).unwrap();
        // Same step but off by a hair so the direct route is taken.
        let dt = 2.0 * PI / 2000.0 * (1.0 + 1e-7);
        let direct = simulate_finite_waves((0.1, 0.0), &s, 1.0, dt, 2.0, 1).unwrap();
        let last = aligned.q.len() - 1;
        assert!((aligned.qdot[last] - direct.qdot[last]).abs() < 1e-4);
    }

    #[test]
    fn rejects_bad_arguments() {
        let s = WaveSpectrum::centered(vec![1.0], vec![0.0]).unwrap();
        assert!(simulate_finite_waves((0.0, 0.0), &s, 0.0, 0.1, 1.0, 1).is_err());
        assert!(simulate_finite_waves((0.0, 0.0), &s, 1.0, -0.1, 1.0, 1).is_err());
        assert!(simulate_finite_waves((0.0, 0.0), &s, 1.0, 0.1, 1.0, 0).is_err());
    }
}
