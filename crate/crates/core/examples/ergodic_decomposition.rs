//! Long (X, Y) path: time average of sin²X, occupation of |Y| ≤ M and the
//! excursion decomposition.
//!
//! cargo run --release --example ergodic_decomposition

use saccel::ergodic::{decompose_path, excursion_stats, running_average_sin2, running_occupation};
use saccel::rescaling::simulate_xy;

fn main() -> saccel::Result<()> {
    let dt = 1e-3;
    let path = simulate_xy(1.0, 1.0, 7, dt, 1000.0)?;
    let at: Vec<usize> = [10.0, 100.0, 1000.0].iter().map(|t| (t / dt) as usize).collect();
    let avg = running_average_sin2(&path.x_path(), &at)?;
    let occ = running_occupation(&path.y_path(), 5.0, &at)?;
    for ((k, a), o) in at.iter().zip(&avg).zip(&occ) {
        println!("t = {:>6}: <sin^2 X> = {a:.4}, occupation(|Y| <= 5) = {o:.4}", *k as f64 * dt);
    }

    for m in [5.0, 10.0, 20.0] {
        let decomp = decompose_path(&path, m)?;
        let r = excursion_stats(&decomp, &path)?;
        println!(
            "M = {m:>4}: {} excursions, K0 time {:.3}, K1 time {:.4}, residual {:.2e}, partition ok {}",
            r.excursion_count,
            r.k0_time_fraction,
            r.k1_time_fraction,
            r.excursion_residual,
            r.partition_holds(path.len())
        );
    }
    Ok(())
}
