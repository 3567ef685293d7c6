//! Momentum of one particle is Brownian whatever A is: Var(P_t − P_0) = πt.
//!
//! cargo run --release --example single_particle

use std::f64::consts::PI;

use saccel::dynamics::{simulate_ensemble, ParticleState, ScalingParams};
use saccel::noise_field::{sample_base_field, TimeGrid};
use saccel::rng::derive_seed;
use saccel::stats::{ks_normal, variance};

fn main() -> saccel::Result<()> {
    let steps = 1000;
    let grid = TimeGrid::periods(steps, 1)?;
    for a in [0.0, 1.0, 10.0] {
        let params = ScalingParams::new(a)?;
        let increments: Vec<f64> = (0..2000)
            .map(|i| {
                let field = sample_base_field(grid, derive_seed(1, i));
                let traj = simulate_ensemble(&[ParticleState::new(1.0, 0.0)], params, &field, steps, steps)?;
                let p = &traj.states[0];
                Ok(p[p.len() - 1].p - p[0].p)
            })
            .collect::<saccel::Result<_>>()?;
        let target = 2.0 * PI * PI;
        let ks = ks_normal(&increments, 0.0, target)?;
        println!(
            "A = {a:>4}: Var = {:.3} (target {target:.3}), KS D = {:.4}, p = {:.3}",
            variance(&increments),
            ks.statistic,
            ks.p_value.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
