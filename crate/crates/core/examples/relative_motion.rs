//! Relative motion of two particles: the rescaled velocity V^n has
//! quadratic variation close to t/2 once n is large.
//!
//! cargo run --release --example relative_motion

use saccel::rescaling::{qv_of_vn, reconstruct_vn, simulate_xy, singular_distance};

fn main() -> saccel::Result<()> {
    let (u0, v0, horizon, steps) = (1.0, 1.0, 1.0, 1000);
    for n in [100.0_f64, 1000.0, 10_000.0] {
        let scale = n.cbrt();
        let slow_horizon = scale * scale * horizon;
        let qv: Vec<f64> = (0..50)
            .map(|seed| {
                let path = simulate_xy(2.0 * u0, scale * v0, seed, slow_horizon / steps as f64, slow_horizon)?;
                let v = reconstruct_vn(&path.y_path(), n, horizon / steps as f64)?;
                Ok(qv_of_vn(&v, &[v.len() - 1])?[0])
            })
            .collect::<saccel::Result<_>>()?;
        let mean = qv.iter().sum::<f64>() / qv.len() as f64;
        println!("n = {n:>6}: mean <V^n>_1 = {mean:.4}  (limit 0.5)");
    }
    println!("distance of (1, 1) from the singular set: {:.3}", singular_distance(1.0, 1.0));
    Ok(())
}
