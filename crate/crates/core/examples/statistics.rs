//! Statistical helpers: KS against a normal law, a variance interval, and
//! the exponential tail bound for Brownian excursions.
//!
//! cargo run --release --example statistics

use rand_distr::{Distribution, StandardNormal};
use saccel::path::SampledPath;
use saccel::rng::stream_rng;
use saccel::stats::{binomial_upper, ks_normal, tail_bound_check, variance_report, TailBoundParams};

fn brownian(stream: u64, steps: usize) -> SampledPath {
    let dt = 1.0 / steps as f64;
    let mut rng = stream_rng(3, stream);
    let mut x = 0.0;
    let mut values = vec![x];
    for _ in 0..steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        x += dt.sqrt() * z;
        values.push(x);
    }
    SampledPath { dt, values }
}

fn main() -> saccel::Result<()> {
    let paths: Vec<SampledPath> = (0..5000).map(|i| brownian(i, 500)).collect();
    let endpoints: Vec<f64> = paths.iter().map(|p| p.values[p.len() - 1]).collect();

    let ks = ks_normal(&endpoints, 0.0, 1.0)?;
    println!("KS vs N(0,1): D = {:.4}, p = {:.3}", ks.statistic, ks.p_value.unwrap_or(f64::NAN));
    let v = variance_report("endpoint_variance", &endpoints, 1.0)?;
    println!("variance {:.4} in [{:.4}, {:.4}]", v.estimate, v.ci_low.unwrap(), v.ci_high.unwrap());

    for b in [1.0, 2.0, 3.0] {
        let params = TailBoundParams::new(b, 1.0, 1.0)?;
        let r = tail_bound_check(&paths, params)?;
        println!(
            "b = {b}: P(sup|B| >= b) ~ {:.4}, 99% upper {:.4}, bound {:.4}, {}",
            r.estimate,
            r.statistic,
            params.bound(),
            if r.passed { "holds" } else { "violated" }
        );
    }
    println!("no successes in 300 trials: 95% upper limit {:.4}", binomial_upper(0, 300, 0.95)?);
    Ok(())
}
