//! Statistical verdicts shared by the experiments.

use crate::dynamics::EnsembleTrajectory;
use crate::error::{Error, Result};
use crate::noise_field::pairwise_sum;
use crate::path::SampledPath;
use serde::Serialize;
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};
use std::f64::consts::PI;

/// One verdict: an estimate, its interval, a test statistic and the outcome.
///
/// `passed` is always `true` when no tolerance is declared; such reports
/// are informational.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatReport {
    pub name: String,
    pub estimate: f64,
    pub ci_low: Option<f64>,
    pub ci_high: Option<f64>,
    pub statistic: f64,
    pub p_value: Option<f64>,
    pub tolerance: Option<f64>,
    pub passed: bool,
}

impl StatReport {
    pub fn new(name: impl Into<String>, estimate: f64, statistic: f64) -> Self {
        StatReport {
            name: name.into(),
            estimate,
            ci_low: None,
            ci_high: None,
            statistic,
            p_value: None,
            tolerance: None,
            passed: true,
        }
    }

    pub fn with_ci(mut self, low: f64, high: f64) -> Self {
        self.ci_low = Some(low);
        self.ci_high = Some(high);
        self
    }

    pub fn with_p_value(mut self, p: f64) -> Self {
        self.p_value = Some(p);
        self
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    /// Passes iff `statistic ≤ tolerance`.
    pub fn at_most(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self.passed = self.statistic <= tolerance;
        self
    }

    /// Passes iff `statistic < tolerance`.
    pub fn below(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self.passed = self.statistic < tolerance;
        self
    }

    /// Passes iff `statistic > tolerance`.
    pub fn above(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self.passed = self.statistic > tolerance;
        self
    }

    /// Passes iff `statistic ≥ tolerance`.
    pub fn at_least(mut self, tolerance: f64) -> Self {
        self.tolerance = Some(tolerance);
        self.passed = self.statistic >= tolerance;
        self
    }

    /// Passes iff the p-value exceeds `alpha`.
    pub fn p_above(mut self, alpha: f64) -> Self {
        self.tolerance = Some(alpha);
        self.passed = self.p_value.is_some_and(|p| p > alpha);
        self
    }

    /// A report that counts toward the verdict only through its `passed` flag.
    pub fn is_gating(&self) -> bool {
        self.tolerance.is_some()
    }
}

/// Parameters of the exponential martingale tail bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TailBoundParams {
    b: f64,
    k: f64,
    duration: f64,
}

impl TailBoundParams {
    pub fn new(b: f64, k: f64, duration: f64) -> Result<Self> {
        for (name, v) in [("b", b), ("k", k), ("T", duration)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::param(name, format!("must be positive, got {v}")));
            }
        }
        Ok(TailBoundParams { b, k, duration })
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// `2 exp(−b² / (2 k² T))`.
    pub fn bound(&self) -> f64 {
        2.0 * (-self.b * self.b / (2.0 * self.k * self.k * self.duration)).exp()
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    pairwise_sum(xs) / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    let sq: Vec<f64> = xs.iter().map(|x| (x - m) * (x - m)).collect();
    pairwise_sum(&sq) / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Kolmogorov distribution survival function `P(K > λ)`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        // Jacobi-transformed series, fast for small λ.
        let c = -PI * PI / (8.0 * lambda * lambda);
        let mut sum = 0.0;
        for k in 1..=100 {
            let j = (2 * k - 1) as f64;
            let term = (c * j * j).exp();
            sum += term;
            if term < 1e-12 {
                break;
            }
        }
        return (1.0 - (2.0 * PI).sqrt() / lambda * sum).clamp(0.0, 1.0);
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// One-sample Kolmogorov–Smirnov test against `N(mean, variance)`.
///
/// The p-value is asymptotic, evaluated at `(√n + 0.12 + 0.11/√n)·D`.
pub fn ks_normal(samples: &[f64], mean: f64, variance: f64) -> Result<StatReport> {
    const MIN_SAMPLES: usize = 20;
    if samples.len() < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { needed: MIN_SAMPLES, got: samples.len() });
    }
    if !(variance > 0.0) || !variance.is_finite() {
        return Err(Error::param("variance", format!("must be positive, got {variance}")));
    }
    let sd = variance.sqrt();
    let mut z: Vec<f64> = samples.iter().map(|x| (x - mean) / sd).collect();
    z.sort_by(f64::total_cmp);
    let n = z.len() as f64;
    let d = z
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max);
    let sn = n.sqrt();
    let p = kolmogorov_sf((sn + 0.12 + 0.11 / sn) * d);
    Ok(StatReport::new("ks_normal", d, d).with_p_value(p))
}

/// Sample variance with its chi-square 95% interval, compared to `target`.
///
/// The statistic is the relative deviation `|s²/target − 1|`.
pub fn variance_report(name: &str, samples: &[f64], target: f64) -> Result<StatReport> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: samples.len() });
    }
    if !(target > 0.0) {
        return Err(Error::param("target", "must be positive"));
    }
    let s2 = variance(samples);
    let dof = samples.len() as f64 - 1.0;
    let chi = ChiSquared::new(dof).map_err(|e| Error::Degenerate(e.to_string()))?;
    let low = dof * s2 / chi.inverse_cdf(0.975);
    let high = dof * s2 / chi.inverse_cdf(0.025);
    Ok(StatReport::new(name, s2, (s2 / target - 1.0).abs()).with_ci(low, high))
}

/// Mean with a normal-approximation 95% interval.
pub fn mean_report(name: &str, samples: &[f64]) -> Result<StatReport> {
    if samples.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: samples.len() });
    }
    let m = mean(samples);
    let se = (variance(samples) / samples.len() as f64).sqrt();
    let z = Normal::standard().inverse_cdf(0.975);
    Ok(StatReport::new(name, m, m).with_ci(m - z * se, m + z * se))
}

/// Cumulative sum of products of increments, starting at 0.
///
/// With `a == b` this is the empirical quadratic variation.
pub fn cross_variation(a: &SampledPath, b: &SampledPath) -> Result<SampledPath> {
    a.ensure_aligned(b)?;
    let mut values = Vec::with_capacity(a.len());
    let mut acc = 0.0;
    values.push(acc);
    for (da, db) in a.increments().zip(b.increments()) {
        acc += da * db;
        values.push(acc);
    }
    Ok(SampledPath { dt: a.dt, values })
}

/// Pearson correlation of two equal-length samples.
pub fn pearson(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::GridMismatch(format!("{} vs {} samples", a.len(), b.len())));
    }
    if a.len() < 3 {
        return Err(Error::InsufficientSamples { needed: 3, got: a.len() });
    }
    let (ma, mb) = (mean(a), mean(b));
    let prod: Vec<f64> = a.iter().zip(b).map(|(x, y)| (x - ma) * (y - mb)).collect();
    let sa: Vec<f64> = a.iter().map(|x| (x - ma) * (x - ma)).collect();
    let sb: Vec<f64> = b.iter().map(|y| (y - mb) * (y - mb)).collect();
    let denom = (pairwise_sum(&sa) * pairwise_sum(&sb)).sqrt();
    if denom == 0.0 {
        return Err(Error::Degenerate("constant sample in correlation".into()));
    }
    Ok(pairwise_sum(&prod) / denom)
}

/// Fisher-z 95% interval for a correlation estimated from `n` pairs.
pub fn correlation_ci(r: f64, n: usize) -> (f64, f64) {
    if n <= 3 || r.abs() >= 1.0 {
        return (r.clamp(-1.0, 1.0), r.clamp(-1.0, 1.0));
    }
    let z = r.atanh();
    let half = Normal::standard().inverse_cdf(0.975) / (n as f64 - 3.0).sqrt();
    ((z - half).tanh(), (z + half).tanh())
}

/// Correlation matrix of the given columns (one entry per column pair).
pub fn pearson_matrix(columns: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let k = columns.len();
    let mut m = vec![vec![1.0; k]; k];
    for i in 0..k {
        for j in i + 1..k {
            let r = pearson(&columns[i], &columns[j])?;
            m[i][j] = r;
            m[j][i] = r;
        }
    }
    Ok(m)
}

/// Largest `|ρ|` off the diagonal.
pub fn max_off_diagonal(m: &[Vec<f64>]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, row) in m.iter().enumerate() {
        for (j, r) in row.iter().enumerate() {
            if i != j {
                worst = worst.max(r.abs());
            }
        }
    }
    worst
}

const MIN_SEEDS: usize = 100;

fn step_of(t: f64, dt: f64) -> Result<usize> {
    let k = t / dt;
    let r = k.round();
    if !(r >= 0.0) || (k - r).abs() > 1e-8 * r.max(1.0) {
        return Err(Error::OffGrid { time: t });
    }
    Ok(r as usize)
}

fn momentum_at(traj: &EnsembleTrajectory, particle: usize, t: f64) -> Result<f64> {
    let step = step_of(t, traj.dt)?;
    let i = traj.sample_index(step).ok_or(Error::OffGrid { time: t })?;
    Ok(traj.states[particle][i].p)
}

fn block_increments(ensemble: &[EnsembleTrajectory], particle: usize, block: (f64, f64)) -> Result<Vec<f64>> {
    ensemble
        .iter()
        .map(|tr| Ok(momentum_at(tr, particle, block.1)? - momentum_at(tr, particle, block.0)?))
        .collect()
}

fn check_ensemble(ensemble: &[EnsembleTrajectory]) -> Result<usize> {
    if ensemble.len() < MIN_SEEDS {
        return Err(Error::InsufficientSamples { needed: MIN_SEEDS, got: ensemble.len() });
    }
    let n = ensemble[0].particle_count();
    if ensemble.iter().any(|tr| tr.particle_count() != n) {
        return Err(Error::GridMismatch("particle counts differ across seeds".into()));
    }
    Ok(n)
}

/// Correlations across field seeds between particles' momentum increments
/// over `block = (t1, t2)`; entry `[i][j]` pairs particle `i` with `j`.
pub fn increment_correlations(ensemble: &[EnsembleTrajectory], block: (f64, f64)) -> Result<Vec<Vec<f64>>> {
    let n = check_ensemble(ensemble)?;
    let columns = (0..n)
        .map(|i| block_increments(ensemble, i, block))
        .collect::<Result<Vec<_>>>()?;
    pearson_matrix(&columns)
}

/// Correlation across field seeds between one particle's increment over
/// `(t1, t2)` and over the following block of equal length.
pub fn consecutive_block_correlation(
    ensemble: &[EnsembleTrajectory],
    particle: usize,
    block: (f64, f64),
) -> Result<f64> {
    let n = check_ensemble(ensemble)?;
    if particle >= n {
        return Err(Error::param("particle", format!("{particle} out of range for {n} particles")));
    }
    let first = block_increments(ensemble, particle, block)?;
    let next = block_increments(ensemble, particle, (block.1, 2.0 * block.1 - block.0))?;
    pearson(&first, &next)
}

/// One-sided upper confidence limit for a binomial proportion (Clopper–Pearson).
pub fn binomial_upper(successes: usize, trials: usize, confidence: f64) -> Result<f64> {
    if trials == 0 {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if successes > trials {
        return Err(Error::param("successes", "exceeds trials"));
    }
    if successes == trials {
        return Ok(1.0);
    }
    let beta = Beta::new(successes as f64 + 1.0, (trials - successes) as f64)
        .map_err(|e| Error::Degenerate(e.to_string()))?;
    if successes == 0 {
        // closed form; avoids bisection in the extreme tail
        return Ok(1.0 - (1.0 - confidence).powf(1.0 / trials as f64));
    }
    Ok(beta.inverse_cdf(confidence))
}

/// Relative slack on the quadratic-variation rate check, for `steps` increments.
fn qv_slack(steps: usize) -> f64 {
    6.0 * (2.0 / steps.max(1) as f64).sqrt()
}

/// Exceedance frequency of `sup |M_t − M_0| ≥ b` against `2 exp(−b²/(2k²T))`.
///
/// Each path must span `T` and have empirical QV at most `k² T`, up to the
/// sampling noise of the QV estimator.
pub fn tail_bound_check(paths: &[SampledPath], params: TailBoundParams) -> Result<StatReport> {
    if paths.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    let k2t = params.k * params.k * params.duration;
    let mut hits = 0;
    for (i, p) in paths.iter().enumerate() {
        if p.len() < 2 {
            return Err(Error::InsufficientSamples { needed: 2, got: p.len() });
        }
        if (p.duration() - params.duration).abs() > 0.5 * p.dt {
            return Err(Error::Precondition(format!(
                "path {i} spans {} instead of T = {}",
                p.duration(),
                params.duration
            )));
        }
        let qv: f64 = p.increments().map(|d| d * d).sum();
        if qv > k2t * (1.0 + qv_slack(p.len() - 1)) {
            return Err(Error::Precondition(format!(
                "path {i} has quadratic variation {qv}, above k²T = {k2t}"
            )));
        }
        let start = p.values[0];
        if p.values.iter().any(|v| (v - start).abs() >= params.b) {
            hits += 1;
        }
    }
    let n = paths.len();
    let freq = hits as f64 / n as f64;
    let upper = binomial_upper(hits, n, 0.99)?;
    Ok(StatReport::new("tail_bound", freq, upper).with_ci(0.0, upper).at_most(params.bound()))
}
