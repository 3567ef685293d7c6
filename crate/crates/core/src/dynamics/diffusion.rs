use crate::error::{Error, Result};
use crate::path::SampledPath;

/// Slope of `Var(p_t − p_0)` over a time window, with a 95% interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionEstimate {
    pub d: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

const MIN_ENSEMBLE: usize = 30;
const Z95: f64 = 1.959_963_984_540_054;

/// Least-squares slope of the ensemble variance of `p_t − p_0` on `[t1, t2]`.
///
/// The slope is a fixed linear combination of per-time sample variances,
/// so it is also the mean over realizations of a per-path contribution;
/// the standard error is that mean's standard error. This accounts for the
/// strong correlation between variances at different times of the same
/// paths, which an ordinary regression error would ignore.
pub fn estimate_diffusion(paths: &[SampledPath], window: (f64, f64)) -> Result<DiffusionEstimate> {
    let (t1, t2) = window;
    if paths.len() < MIN_ENSEMBLE {
        return Err(Error::InsufficientSamples { needed: MIN_ENSEMBLE, got: paths.len() });
    }
    if !(t2 > t1) || !(t1 >= 0.0) {
        return Err(Error::Degenerate(format!("window ({t1}, {t2})")));
    }
    let first = &paths[0];
    for p in &paths[1..] {
        first.ensure_aligned(p)?;
    }
    let eps = 1e-9 * first.dt;
    let idx: Vec<usize> = (0..first.len())
        .filter(|&i| {
            let t = first.time(i);
            t >= t1 - eps && t <= t2 + eps
        })
        .collect();
    if idx.len() < 2 {
        return Err(Error::Degenerate("fewer than two samples in the window".into()));
    }

    let times: Vec<f64> = idx.iter().map(|&i| first.time(i)).collect();
    let t_mean = times.iter().sum::<f64>() / times.len() as f64;
    let sxx: f64 = times.iter().map(|t| (t - t_mean).powi(2)).sum();
    let weights: Vec<f64> = times.iter().map(|t| (t - t_mean) / sxx).collect();

    let n = paths.len() as f64;
    let means: Vec<f64> = idx
        .iter()
        .map(|&i| paths.iter().map(|p| p.values[i] - p.values[0]).sum::<f64>() / n)
        .collect();
    let contributions: Vec<f64> = paths
        .iter()
        .map(|p| {
            idx.iter()
                .zip(&weights)
                .zip(&means)
                .map(|((&i, w), m)| {
                    let dev = p.values[i] - p.values[0] - m;
                    w * dev * dev
                })
                .sum::<f64>()
                * n
                / (n - 1.0)
        })
        .collect();

    let total_var: f64 = idx
        .iter()
        .zip(&means)
        .map(|(&i, m)| paths.iter().map(|p| (p.values[i] - p.values[0] - m).powi(2)).sum::<f64>())
        .sum();
    if total_var == 0.0 {
        return Err(Error::Degenerate("paths have zero variance".into()));
    }

    let d = contributions.iter().sum::<f64>() / n;
    let var_c = contributions.iter().map(|c| (c - d).powi(2)).sum::<f64>() / (n - 1.0);
    let std_error = (var_c / n).sqrt();
    Ok(DiffusionEstimate { d, std_error, ci_low: d - Z95 * std_error, ci_high: d + Z95 * std_error })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;
    use rand_distr::{Distribution, StandardNormal};
    use std::f64::consts::PI;

    /// Brownian paths with `Var(p_t) = rate * t`, the closed-form oracle.
    fn brownian_paths(seed: u64, count: usize, steps: usize, dt: f64, rate: f64) -> Vec<SampledPath> {
        let mut r = rng::seeded(seed);
        (0..count)
            .map(|_| {
                let mut v = Vec::with_capacity(steps + 1);
                let mut x = 0.0;
                v.push(x);
                for _ in 0..steps {
                    let z: f64 = StandardNormal.sample(&mut r);
                    x += (rate * dt).sqrt() * z;
                    v.push(x);
                }
                SampledPath { dt, values: v }
            })
            .collect()
    }

    #[test]
    fn constant_paths_are_degenerate() {
        let paths = vec![SampledPath { dt: 0.1, values: vec![1.0; 20] }; 40];
        assert!(matches!(estimate_diffusion(&paths, (0.0, 1.0)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn bad_window_and_small_ensemble() {
        let paths = brownian_paths(1, 40, 10, 0.1, 1.0);
        assert!(estimate_diffusion(&paths, (0.5, 0.5)).is_err());
        assert!(estimate_diffusion(&paths, (0.52, 0.58)).is_err());
        assert!(matches!(
            estimate_diffusion(&paths[..10], (0.0, 1.0)),
            Err(Error::InsufficientSamples { .. })
        ));
    }

    #[test]
    fn brownian_rate_pi_interval_coverage() {
        let trials = 200;
        let mut covered = 0;
        for k in 0..trials {
            let paths = brownian_paths(1000 + k, 200, 50, 0.1, PI);
            let est = estimate_diffusion(&paths, (0.5, 5.0)).unwrap();
            if est.ci_low <= PI && PI <= est.ci_high {
                covered += 1;
            }
        }
        // binomial(200, 0.95): 3 sd is about 0.046
        let rate = covered as f64 / trials as f64;
        assert!((0.9..=0.995).contains(&rate), "coverage {rate}");
    }

    #[test]
    fn scaled_brownian_slope() {
        // p = sqrt(2 D0) B has Var = 2 D0 t; the estimator reports the slope.
        let d0 = 3.0;
        let paths = brownian_paths(77, 400, 100, 0.05, 2.0 * d0);
        let est = estimate_diffusion(&paths, (0.5, 5.0)).unwrap();
        assert!((est.d - 2.0 * d0).abs() < 3.0 * est.std_error, "{est:?}");
    }
}
