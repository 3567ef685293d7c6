//! Additive functionals of the `(X, Y)` diffusion.
//!
//! The process is null-recurrent with Lebesgue invariant measure, so the
//! time average of `sin²X` is not a plain ergodic average. Its limit `1/2`
//! comes from a decomposition of the path into short excursions at large
//! `|Y|`, during which `X` winds once around the circle at almost constant
//! speed. This module computes the decomposition and the diagnostics that
//! bound each piece.

use std::f64::consts::PI;
use std::io::Write;

use crate::error::{Error, Result};
use crate::path::{fmt_f64, SampledPath};
use crate::rescaling::RescaledPath;

const TWO_PI: f64 = 2.0 * PI;

/// Trapezoidal time average of `sin²x` over the whole path.
pub fn ergodic_average_sin2(x_path: &SampledPath) -> Result<f64> {
    if x_path.is_empty() {
        return Err(Error::InsufficientSamples { needed: 2, got: 0 });
    }
    if x_path.len() < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: x_path.len() });
    }
    let f: Vec<f64> = x_path.values.iter().map(|x| x.sin().powi(2)).collect();
    Ok(trapezoid(&f, 0, f.len() - 1) / (f.len() - 1) as f64)
}

/// Fraction of samples with `|y| ≤ m`.
pub fn occupation_fraction(y_path: &SampledPath, m: f64) -> Result<f64> {
    if y_path.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if !(m > 0.0) {
        return Err(Error::param("M", "must be positive"));
    }
    let inside = y_path.values.iter().filter(|y| y.abs() <= m).count();
    Ok(inside as f64 / y_path.len() as f64)
}

/// Time averages of `sin²x` over `[0, t_k]` for each grid index `k` in `at`.
///
/// Index 0 yields `sin²x₀`. Agrees with [`ergodic_average_sin2`] on prefixes.
pub fn running_average_sin2(x_path: &SampledPath, at: &[usize]) -> Result<Vec<f64>> {
    check_indices(x_path, at)?;
    let mut out = Vec::with_capacity(at.len());
    let mut acc = 0.0;
    let mut done = 0;
    let mut prev = x_path.values[0].sin().powi(2);
    for &k in at {
        while done < k {
            let next = x_path.values[done + 1].sin().powi(2);
            acc += 0.5 * (prev + next);
            prev = next;
            done += 1;
        }
        out.push(if k == 0 { prev } else { acc / k as f64 });
    }
    Ok(out)
}

/// Occupation fractions of `|y| ≤ m` over samples `0..=k` for each `k` in `at`.
pub fn running_occupation(y_path: &SampledPath, m: f64, at: &[usize]) -> Result<Vec<f64>> {
    check_indices(y_path, at)?;
    if !(m > 0.0) {
        return Err(Error::param("M", "must be positive"));
    }
    let mut out = Vec::with_capacity(at.len());
    let mut inside = 0usize;
    let mut seen = 0usize;
    for &k in at {
        while seen <= k {
            if y_path.values[seen].abs() <= m {
                inside += 1;
            }
            seen += 1;
        }
        out.push(inside as f64 / (k + 1) as f64);
    }
    Ok(out)
}

fn check_indices(path: &SampledPath, at: &[usize]) -> Result<()> {
    if path.is_empty() {
        return Err(Error::InsufficientSamples { needed: 1, got: 0 });
    }
    if at.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::param("at", "indices must be non-decreasing"));
    }
    match at.last() {
        Some(&k) if k >= path.len() => {
            Err(Error::param("at", format!("index {k} beyond path of length {}", path.len())))
        }
        _ => Ok(()),
    }
}

/// Sum of trapezoids over grid intervals `from..to`, in units of `dt`.
fn trapezoid(f: &[f64], from: usize, to: usize) -> f64 {
    (from..to).map(|i| 0.5 * (f[i] + f[i + 1])).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExcursionClass {
    /// Ended by one full winding of `X`.
    K0,
    /// Ended by a unit change of `Y`.
    K1,
}

impl ExcursionClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ExcursionClass::K0 => "K0",
            ExcursionClass::K1 => "K1",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Excursion {
    /// Start index `η_k`.
    pub eta: usize,
    /// End index `τ_k`.
    pub tau: usize,
    pub class: ExcursionClass,
    /// `L_k`: index of the last `|Y| ≥ M+1` entry time at or before `τ_{k-1}`.
    pub l: usize,
    pub y_eta: f64,
    /// Signed displacement of unwrapped `X` over the excursion.
    pub winding: f64,
}

impl Excursion {
    pub fn steps(&self) -> usize {
        self.tau - self.eta
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PathDecomposition {
    pub threshold: f64,
    pub dt: f64,
    /// `T_0 = 0, T_1, T_2, …`: alternate entries into `|Y| ≥ M+1` (odd)
    /// and returns to `|Y| ≤ M` (even).
    pub t_times: Vec<usize>,
    pub excursions: Vec<Excursion>,
    /// An excursion still running when the path ends: `(η, last index)`.
    pub open_excursion: Option<(usize, usize)>,
    pub path_len: usize,
}

impl PathDecomposition {
    pub fn eta(&self) -> Vec<usize> {
        self.excursions.iter().map(|e| e.eta).collect()
    }

    pub fn tau(&self) -> Vec<usize> {
        self.excursions.iter().map(|e| e.tau).collect()
    }

    pub fn classification(&self) -> Vec<ExcursionClass> {
        self.excursions.iter().map(|e| e.class).collect()
    }

    pub fn l_counters(&self) -> Vec<usize> {
        self.excursions.iter().map(|e| e.l).collect()
    }

    /// CSV `k,eta,tau,class,Y_eta,winding`; `k` starts at 1.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "k,eta,tau,class,Y_eta,winding")?;
        for (k, e) in self.excursions.iter().enumerate() {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                k + 1,
                e.eta,
                e.tau,
                e.class.as_str(),
                fmt_f64(e.y_eta),
                fmt_f64(e.winding)
            )?;
        }
        Ok(())
    }
}

/// `X` on the universal cover, rebuilt from the exact Strang drift
/// `ΔX = dt (Y_i + Y_{i+1}) / 2`.
pub fn unwrapped_x(path: &RescaledPath) -> Vec<f64> {
    let mut xu = Vec::with_capacity(path.len());
    if path.is_empty() {
        return xu;
    }
    let mut acc = path.x[0];
    xu.push(acc);
    for w in path.y.windows(2) {
        acc += 0.5 * path.dt * (w[0] + w[1]);
        xu.push(acc);
    }
    xu
}

/// Stopping-time decomposition of a path for band threshold `m`.
///
/// Stopping times are the first grid index at which the defining
/// inequality holds; no crossing is interpolated.
pub fn decompose_path(path: &RescaledPath, m: f64) -> Result<PathDecomposition> {
    if !(m > 2.0) {
        return Err(Error::param("M", format!("must exceed 2, got {m}")));
    }
    let y = &path.y;
    let len = y.len();
    let first_after = |start: usize, pred: &dyn Fn(f64) -> bool| -> Option<usize> {
        (start + 1..len).find(|&i| pred(y[i]))
    };

    let mut t_times = vec![0usize];
    loop {
        let ell = t_times.len();
        let prev = *t_times.last().unwrap();
        let next = if ell % 2 == 1 {
            first_after(prev, &|v: f64| v.abs() >= m + 1.0)
        } else {
            first_after(prev, &|v: f64| v.abs() <= m)
        };
        match next {
            Some(i) => t_times.push(i),
            None => break,
        }
    }

    let mut decomp = PathDecomposition {
        threshold: m,
        dt: path.dt,
        t_times,
        excursions: Vec::new(),
        open_excursion: None,
        path_len: len,
    };
    if decomp.t_times.len() < 2 {
        return Ok(decomp);
    }
    let t = &decomp.t_times;
    let xu = unwrapped_x(path);

    let mut tau_prev = t[1];
    loop {
        // L_k = sup{l : τ_{k-1} ≥ T_{2l+1}}
        let mut l = 0;
        while 2 * (l + 1) + 1 < t.len() && t[2 * (l + 1) + 1] <= tau_prev {
            l += 1;
        }
        // Ties (τ_{k-1} = T_{2L+2}) take the second branch.
        let eta = match t.get(2 * l + 2) {
            Some(&t_return) if tau_prev >= t_return => match t.get(2 * l + 3) {
                Some(&t_entry) => t_entry,
                None => break,
            },
            _ => tau_prev,
        };
        let (x0, y0) = (xu[eta], y[eta]);
        let end = (eta + 1..len).find(|&i| (xu[i] - x0).abs() >= TWO_PI || (y[i] - y0).abs() > 1.0);
        let Some(tau) = end else {
            if eta + 1 < len {
                decomp.open_excursion = Some((eta, len - 1));
            }
            break;
        };
        let class = if (y[tau] - y0).abs() > 1.0 { ExcursionClass::K1 } else { ExcursionClass::K0 };
        decomp.excursions.push(Excursion { eta, tau, class, l, y_eta: y0, winding: xu[tau] - x0 });
        tau_prev = tau;
    }
    Ok(decomp)
}

/// Diagnostics of one decomposed path.
#[derive(Debug, Clone, PartialEq)]
pub struct ErgodicReport {
    /// Time average of `sin²X` over the path.
    pub average: f64,
    /// Fraction of samples with `|Y| ≤ M`.
    pub occupation_fraction: f64,
    /// Time in K¹ excursions over total time.
    pub k1_time_fraction: f64,
    /// Time in K⁰ excursions over total time.
    pub k0_time_fraction: f64,
    /// `Σ_{K⁰} |∫ sin²X − (τ−η)/2| / Σ_{K⁰} (τ−η)`.
    pub excursion_residual: f64,
    pub excursion_count: usize,
    /// Excursions longer than `4π/|Y_η| + 2dt`.
    pub upper_bound_violations: usize,
    /// K⁰ excursions shorter than `π/|Y_η| − 2dt`.
    pub lower_bound_violations: usize,
    /// Summed durations (in steps) of K⁰, K¹ and the open excursion, then
    /// the number of grid intervals covered by none of them.
    pub partition: [usize; 4],
    /// `(∫ 1{|Y| ≥ M+1} sin²X, Σ_k ∫_η^τ sin²X, ∫ sin²X)`.
    pub sandwich: (f64, f64, f64),
}

impl ErgodicReport {
    /// The four parts add up to the number of grid intervals.
    pub fn partition_holds(&self, path_len: usize) -> bool {
        self.partition.iter().sum::<usize>() == path_len.saturating_sub(1)
    }

    pub fn sandwich_holds(&self) -> bool {
        let (lo, mid, hi) = self.sandwich;
        let eps = 1e-9 * hi.abs().max(1.0);
        lo <= mid + eps && mid <= hi + eps
    }
}

pub fn excursion_stats(decomp: &PathDecomposition, path: &RescaledPath) -> Result<ErgodicReport> {
    if decomp.path_len != path.len() || path.len() < 2 {
        return Err(Error::GridMismatch(format!(
            "decomposition of {} samples applied to a path of {}",
            decomp.path_len,
            path.len()
        )));
    }
    let dt = path.dt;
    let m = decomp.threshold;
    let f: Vec<f64> = path.x.iter().map(|x| x.sin().powi(2)).collect();
    let intervals = path.len() - 1;
    let total_time = intervals as f64 * dt;

    let mut covered = vec![false; intervals];
    let mut k0_steps = 0usize;
    let mut k1_steps = 0usize;
    let mut residual_sum = 0.0;
    let mut middle = 0.0;
    let mut upper_violations = 0;
    let mut lower_violations = 0;
    for e in &decomp.excursions {
        let duration = e.steps() as f64 * dt;
        let integral = trapezoid(&f, e.eta, e.tau) * dt;
        middle += integral;
        let speed = e.y_eta.abs();
        if duration > 4.0 * PI / speed + 2.0 * dt {
            upper_violations += 1;
        }
        match e.class {
            ExcursionClass::K0 => {
                k0_steps += e.steps();
                residual_sum += (integral - 0.5 * duration).abs();
                if duration < PI / speed - 2.0 * dt {
                    lower_violations += 1;
                }
                covered[e.eta..e.tau].fill(true);
            }
            ExcursionClass::K1 => {
                k1_steps += e.steps();
                covered[e.eta..e.tau].fill(true);
            }
        }
    }
    let mut open_steps = 0;
    if let Some((eta, end)) = decomp.open_excursion {
        middle += trapezoid(&f, eta, end) * dt;
        covered[eta..end].fill(true);
        open_steps = end - eta;
    }
    // Durations are summed per excursion and the complement is counted on
    // the grid, so overlapping excursions would break the identity.
    let complement = covered.iter().filter(|&&c| !c).count();
    let partition = [k0_steps, k1_steps, open_steps, complement];

    let lower: f64 = (0..intervals)
        .filter(|&i| path.y[i].abs() >= m + 1.0)
        .map(|i| 0.5 * (f[i] + f[i + 1]))
        .sum::<f64>()
        * dt;
    let upper = trapezoid(&f, 0, intervals) * dt;

    let k0_time = k0_steps as f64 * dt;
    Ok(ErgodicReport {
        average: upper / total_time,
        occupation_fraction: occupation_fraction(&path.y_path(), m)?,
        k1_time_fraction: k1_steps as f64 * dt / total_time,
        k0_time_fraction: k0_time / total_time,
        excursion_residual: if k0_steps > 0 { residual_sum / k0_time } else { 0.0 },
        excursion_count: decomp.excursions.len(),
        upper_bound_violations: upper_violations,
        lower_bound_violations: lower_violations,
        partition,
        sandwich: (lower, middle, upper),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rescaling::simulate_xy;
    use proptest::prelude::*;

    fn path_from(dt: f64, x: Vec<f64>, y: Vec<f64>) -> RescaledPath {
        RescaledPath::new(dt, x, y).unwrap()
    }

    #[test]
    fn full_periods_average_to_half() {
        let dt = 1e-3;
        let k = 3.0;
        let n = (TWO_PI * k / dt).round() as usize;
        let dt = TWO_PI * k / n as f64;
        let x = SampledPath { dt, values: (0..=n).map(|i| i as f64 * dt).collect() };
        let avg = ergodic_average_sin2(&x).unwrap();
        assert!((avg - 0.5).abs() < 1e-6, "{avg}");
    }

    #[test]
    fn constant_quarter_turn() {
        let x = SampledPath { dt: 0.1, values: vec![PI / 2.0; 10] };
        assert!((ergodic_average_sin2(&x).unwrap() - 1.0).abs() < 1e-15);
        assert!(ergodic_average_sin2(&SampledPath { dt: 0.1, values: vec![] }).is_err());
    }

    #[test]
    fn occupation_extremes() {
        let m = 3.0;
        let far = SampledPath { dt: 0.1, values: vec![2.0 * m; 10] };
        let near = SampledPath { dt: 0.1, values: vec![0.0; 10] };
        assert_eq!(occupation_fraction(&far, m).unwrap(), 0.0);
        assert_eq!(occupation_fraction(&near, m).unwrap(), 1.0);
    }

    #[test]
    fn small_threshold_rejected() {
        let p = simulate_xy(1.0, 1.0, 1, 0.01, 1.0).unwrap();
        assert!(decompose_path(&p, 2.0).is_err());
        assert!(decompose_path(&p, 2.5).is_ok());
    }

    #[test]
    fn band_never_left() {
        let p = path_from(0.01, vec![1.0; 100], vec![0.0; 100]);
        let d = decompose_path(&p, 5.0).unwrap();
        assert_eq!(d.t_times, vec![0]);
        assert!(d.excursions.is_empty());
        assert!(d.open_excursion.is_none());
    }

    /// Y ramps 0 → M+2 then holds; X integrates Y exactly.
    fn ramp_then_hold(m: f64, dt: f64, hold_winding: f64) -> RescaledPath {
        let top = m + 2.0;
        let ramp = 100;
        let mut y: Vec<f64> = (0..=ramp).map(|i| top * i as f64 / ramp as f64).collect();
        let hold = (hold_winding / (top * dt)).ceil() as usize + 2;
        y.extend(std::iter::repeat_n(top, hold));
        let mut x = vec![0.3];
        let mut acc = 0.3;
        for w in y.windows(2) {
            acc += 0.5 * dt * (w[0] + w[1]);
            x.push(crate::dynamics::wrap_angle(acc));
        }
        path_from(dt, x, y)
    }

    #[test]
    fn ramp_fixture_hand_traced() {
        let m = 5.0;
        let dt = 1e-3;
        let p = ramp_then_hold(m, dt, 4.0 * PI);
        let d = decompose_path(&p, m).unwrap();
        // T1 is the first ramp sample with |Y| >= 6: i/100 * 7 >= 6 -> i = 86.
        assert_eq!(d.t_times, vec![0, 86]);
        assert!(d.excursions.len() >= 2);
        assert!(d.excursions.iter().all(|e| e.class == ExcursionClass::K0));
        assert_eq!(d.excursions[0].eta, 86);
        for w in d.excursions.windows(2) {
            assert_eq!(w[0].tau, w[1].eta);
        }
        for e in &d.excursions[1..] {
            assert!((e.winding.abs() - TWO_PI).abs() <= e.y_eta.abs() * dt + 1e-9);
        }
    }

    #[test]
    fn jump_in_y_is_k1() {
        let m = 5.0;
        let dt = 1e-3;
        let mut y = vec![0.0, 7.0, 7.0, 7.0, 8.2, 8.2, 8.2];
        y.extend(std::iter::repeat_n(8.2, 2000));
        let mut x = vec![1.0];
        let mut acc = 1.0;
        for w in y.windows(2) {
            acc += 0.5 * dt * (w[0] + w[1]);
            x.push(acc % TWO_PI);
        }
        let p = path_from(dt, x, y);
        let d = decompose_path(&p, m).unwrap();
        assert_eq!(d.excursions[0].eta, 1);
        assert_eq!(d.excursions[0].tau, 4);
        assert_eq!(d.excursions[0].class, ExcursionClass::K1);
        assert_eq!(d.excursions[1].class, ExcursionClass::K0);
    }

    #[test]
    fn constant_speed_residual_small() {
        let m = 5.0;
        for (y0, dt) in [(10.0, 1e-4), (50.0, 1e-5)] {
            let n = 200_000;
            let y = vec![y0; n];
            let x: Vec<f64> = (0..n).map(|i| (0.2 + y0 * dt * i as f64) % TWO_PI).collect();
            let p = path_from(dt, x, y);
            let d = decompose_path(&p, m).unwrap();
            let r = excursion_stats(&d, &p).unwrap();
            assert!(r.excursion_count > 10);
            assert!(r.excursion_residual * y0 <= 2.0, "residual {}", r.excursion_residual);
            assert_eq!(r.k1_time_fraction, 0.0);
            assert_eq!(r.upper_bound_violations, 0);
            assert_eq!(r.lower_bound_violations, 0);
        }
    }

    #[test]
    fn running_values_match_prefixes() {
        let dt = 0.01;
        let x: Vec<f64> = (0..1000).map(|i| (0.37 * i as f64).sin() * 3.0).collect();
        let y: Vec<f64> = (0..1000).map(|i| 10.0 * (0.011 * i as f64).cos()).collect();
        let xp = SampledPath { dt, values: x.clone() };
        let yp = SampledPath { dt, values: y.clone() };
        let at = [5, 99, 500, 999];
        let avg = running_average_sin2(&xp, &at).unwrap();
        let occ = running_occupation(&yp, 4.0, &at).unwrap();
        for (j, &k) in at.iter().enumerate() {
            let px = SampledPath { dt, values: x[..=k].to_vec() };
            let py = SampledPath { dt, values: y[..=k].to_vec() };
            assert!((avg[j] - ergodic_average_sin2(&px).unwrap()).abs() < 1e-12);
            assert_eq!(occ[j], occupation_fraction(&py, 4.0).unwrap());
        }
        assert!(running_occupation(&yp, 4.0, &[1000]).is_err());
        assert!(running_average_sin2(&xp, &[5, 3]).is_err());
    }

    #[test]
    fn exact_windings_residual_within_one_step() {
        // a turn is a whole number of steps; roundoff in the 2π test may add one
        // step, worth dt/2 of residual against a turn of per_turn * dt.
        let y0 = 8.0;
        let per_turn = 4000;
        let dt = TWO_PI / (y0 * per_turn as f64);
        let n = per_turn * 20 + 1;
        let y = vec![y0; n];
        let x: Vec<f64> = (0..n).map(|i| (y0 * dt * i as f64) % TWO_PI).collect();
        let p = path_from(dt, x, y);
        let d = decompose_path(&p, 5.0).unwrap();
        let r = excursion_stats(&d, &p).unwrap();
        assert!(r.excursion_residual <= 0.5 / per_turn as f64 + 1e-9, "{}", r.excursion_residual);
        assert_eq!(r.lower_bound_violations + r.upper_bound_violations, 0);
    }

    #[test]
    fn csv_header() {
        let p = ramp_then_hold(5.0, 1e-3, 2.0 * PI);
        let d = decompose_path(&p, 5.0).unwrap();
        let mut buf = Vec::new();
        d.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("k,eta,tau,class,Y_eta,winding\n1,86,"));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn decomposition_invariants(seed in 0u64..10_000, m in 2.5f64..8.0) {
            let dt = 1e-3;
            let p = simulate_xy(1.0, 1.0, seed, dt, 300.0).unwrap();
            let d = decompose_path(&p, m).unwrap();
            let r = excursion_stats(&d, &p).unwrap();
            prop_assert!(d.t_times.windows(2).all(|w| w[0] < w[1]));
            for (l, &t) in d.t_times.iter().enumerate().skip(1) {
                if l % 2 == 1 {
                    prop_assert!(p.y[t].abs() >= m + 1.0);
                } else {
                    prop_assert!(p.y[t].abs() <= m);
                }
            }
            let xu = unwrapped_x(&p);
            for e in &d.excursions {
                prop_assert!(e.eta < e.tau);
                prop_assert!(e.y_eta.abs() > m);
                for i in e.eta..e.tau {
                    prop_assert!((p.y[i] - e.y_eta).abs() <= 1.0);
                    prop_assert!((xu[i] - xu[e.eta]).abs() < TWO_PI);
                }
            }
            prop_assert!(d.excursions.windows(2).all(|w| w[0].tau <= w[1].eta));
            prop_assert!(r.partition_holds(p.len()));
            prop_assert!(r.sandwich_holds());
            prop_assert_eq!(r.upper_bound_violations, 0);
            prop_assert_eq!(r.lower_bound_violations, 0);
            for v in [r.average, r.occupation_fraction, r.k1_time_fraction, r.k0_time_fraction] {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            prop_assert!(r.excursion_residual >= 0.0);
        }
    }
}
