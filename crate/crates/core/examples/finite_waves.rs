//! Quasilinear diffusion: many overlapping waves with random phases give
//! Var(p_t − p_0) ≈ π A₀² t.
//!
//! cargo run --release --example finite_waves

use std::f64::consts::PI;

use saccel::dynamics::{estimate_diffusion, simulate_finite_waves, WaveSpectrum};
use saccel::rng::stream_rng;

fn main() -> saccel::Result<()> {
    let (waves, amplitude, mass) = (256, 10.0, 1.0);
    let dt = 2.0 * PI / 8192.0;
    let paths = (0..200)
        .map(|i| {
            let spectrum = WaveSpectrum::random_phases(waves, amplitude, &mut stream_rng(5, i))?;
            Ok(simulate_finite_waves((0.0, 0.0), &spectrum, mass, dt, 2.0 * PI, 64)?.momentum_path(mass))
        })
        .collect::<saccel::Result<Vec<_>>>()?;

    let est = estimate_diffusion(&paths, (1.0, 2.0 * PI))?;
    let d_ql = PI * amplitude * amplitude;
    println!("D = {:.1} [{:.1}, {:.1}]", est.d, est.ci_low, est.ci_high);
    println!("D / (pi A0^2) = {:.3}", est.d / d_ql);
    println!("(m/A0)^(2/3) M = {:.1}", (mass / amplitude).powf(2.0 / 3.0) * waves as f64);
    Ok(())
}
