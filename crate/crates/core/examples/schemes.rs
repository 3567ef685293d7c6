//! Strang, Euler–Maruyama and Heun on the same Brownian path.
//!
//! The noise coefficients depend on Q alone, so all three converge to one
//! solution; halving dt roughly halves their distance from a fine reference.
//!
//! cargo run --release --example schemes

use saccel::dynamics::{propagate, ParticleState, ScalingParams, Scheme};
use saccel::noise_field::{sample_base_field, FieldRealization, TimeGrid};

fn coarsen(fine: &FieldRealization, factor: usize) -> saccel::Result<FieldRealization> {
    let sum = |xs: &[f64]| xs.chunks(factor).map(|c| c.iter().sum()).collect::<Vec<f64>>();
    let grid = TimeGrid::periods(fine.grid().steps_per_period() / factor, 1)?;
    FieldRealization::from_increments(grid, sum(fine.dc()), sum(fine.ds()), fine.seed())
}

fn main() -> saccel::Result<()> {
    let params = ScalingParams::new(1.0)?;
    let start = [ParticleState::new(0.7, 0.3)];
    let schemes = [Scheme::Strang, Scheme::EulerMaruyama, Scheme::Heun];
    let factors = [256, 128, 64, 32, 16];
    let paths = 50;
    let mut errors = vec![[0.0; 3]; factors.len()];
    for seed in 0..paths {
        let fine = sample_base_field(TimeGrid::periods(1 << 16, 1)?, seed);
        // a quarter period
        let reference = propagate(Scheme::Strang, &start, params, &fine, 0, (1 << 16) / 4)[0];
        for (row, &factor) in errors.iter_mut().zip(&factors) {
            let field = coarsen(&fine, factor)?;
            let steps = field.grid().steps_per_period() / 4;
            for (e, &s) in row.iter_mut().zip(&schemes) {
                *e += (propagate(s, &start, params, &field, 0, steps)[0].p - reference.p).abs() / paths as f64;
            }
        }
    }
    println!("mean |p - p_ref| at t = pi/2 over {paths} paths");
    for (row, &factor) in errors.iter().zip(&factors) {
        let dt = 2.0 * std::f64::consts::PI * factor as f64 / (1 << 16) as f64;
        let cols: Vec<String> = schemes.iter().zip(row).map(|(s, e)| format!("{s:?} {e:.2e}")).collect();
        println!("dt = {dt:.2e}: {}", cols.join("  "));
    }
    Ok(())
}
