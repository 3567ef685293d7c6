//! The driving pair `(C, S)` of the stochastic acceleration model.
//!
//! `π^{-1/2}(C, S)` is a standard planar Brownian motion on one period
//! `[0, 2π]`; beyond the period the increments repeat exactly. A
//! [`FieldRealization`] stores one period of increments on a uniform grid
//! and serves any later step by index reduction, so the periodized field
//! costs nothing extra.

use std::f64::consts::PI;
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::rng;

/// Length of one field period.
pub const PERIOD: f64 = 2.0 * PI;

const MAGIC: &[u8; 6] = b"SAFLD1";

/// Uniform time grid with an integer number of steps per field period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    dt: f64,
    steps_per_period: usize,
    horizon_steps: usize,
}

impl TimeGrid {
    /// Grid with `dt = 2π / steps_per_period`.
    pub fn new(steps_per_period: usize, horizon_steps: usize) -> Result<Self> {
        if steps_per_period == 0 {
            return Err(Error::Config("steps_per_period must be positive".into()));
        }
        Self::from_parts(PERIOD / steps_per_period as f64, steps_per_period, horizon_steps)
    }

    /// Grid covering `periods` whole field periods.
    pub fn periods(steps_per_period: usize, periods: usize) -> Result<Self> {
        Self::new(steps_per_period, steps_per_period * periods)
    }

    /// Validates an explicitly given `(dt, steps_per_period, horizon_steps)`.
    pub fn from_parts(dt: f64, steps_per_period: usize, horizon_steps: usize) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Config(format!("dt must be positive, got {dt}")));
        }
        if steps_per_period == 0 {
            return Err(Error::Config("steps_per_period must be positive".into()));
        }
        let span = dt * steps_per_period as f64;
        if ((span - PERIOD) / PERIOD).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "steps_per_period * dt = {span}, expected 2*pi"
            )));
        }
        if horizon_steps == 0 {
            return Err(Error::Config("horizon_steps must be at least 1".into()));
        }
        Ok(Self { dt, steps_per_period, horizon_steps })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn steps_per_period(&self) -> usize {
        self.steps_per_period
    }

    pub fn horizon_steps(&self) -> usize {
        self.horizon_steps
    }

    pub fn with_horizon(self, horizon_steps: usize) -> Result<Self> {
        Self::from_parts(self.dt, self.steps_per_period, horizon_steps)
    }
}

/// One sampled period of `(dC, dS)` increments.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldRealization {
    grid: TimeGrid,
    dc: Vec<f64>,
    ds: Vec<f64>,
    seed: u64,
}

/// Draws i.i.d. `N(0, π dt)` increments for `dC` then `dS`.
pub fn sample_base_field(grid: TimeGrid, seed: u64) -> FieldRealization {
    let n = grid.steps_per_period;
    let scale = (PI * grid.dt).sqrt();
    let mut rng = rng::seeded(seed);
    let mut draw = |_| -> f64 {
        let z: f64 = StandardNormal.sample(&mut rng);
        scale * z
    };
    let dc: Vec<f64> = (0..n).map(&mut draw).collect();
    let ds: Vec<f64> = (0..n).map(&mut draw).collect();
    FieldRealization { grid, dc, ds, seed }
}

impl FieldRealization {
    /// Builds a realization from explicit increments (fixtures, refinement studies).
    pub fn from_increments(grid: TimeGrid, dc: Vec<f64>, ds: Vec<f64>, seed: u64) -> Result<Self> {
        let n = grid.steps_per_period;
        if dc.len() != n || ds.len() != n {
            return Err(Error::GridMismatch(format!(
                "expected {n} increments per component, got {} and {}",
                dc.len(),
                ds.len()
            )));
        }
        Ok(Self { grid, dc, ds, seed })
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn dc(&self) -> &[f64] {
        &self.dc
    }

    pub fn ds(&self) -> &[f64] {
        &self.ds
    }

    /// Increments for grid step `step_index`, periodized.
    #[inline]
    pub fn field_increment(&self, step_index: usize) -> (f64, f64) {
        let i = step_index % self.grid.steps_per_period;
        (self.dc[i], self.ds[i])
    }

    /// `(C_2π, S_2π)`: the linear part of the bridge decomposition.
    pub fn period_endpoint_values(&self) -> (f64, f64) {
        (pairwise_sum(&self.dc), pairwise_sum(&self.ds))
    }

    /// Empirical quadratic variations and cross-variation over one period.
    pub fn period_variations(&self) -> (f64, f64, f64) {
        let mut qc = 0.0;
        let mut qs = 0.0;
        let mut qcs = 0.0;
        for (c, s) in self.dc.iter().zip(&self.ds) {
            qc += c * c;
            qs += s * s;
            qcs += c * s;
        }
        (qc, qs, qcs)
    }

    pub fn write_to<W: Write>(&self, mut out: W) -> Result<()> {
        out.write_all(MAGIC)?;
        out.write_all(&self.grid.dt.to_le_bytes())?;
        out.write_all(&(self.grid.steps_per_period as u64).to_le_bytes())?;
        out.write_all(&self.seed.to_le_bytes())?;
        for v in self.dc.iter().chain(&self.ds) {
            out.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    /// Reads a dump; the horizon is not stored and defaults to one period.
    pub fn read_from<R: Read>(mut input: R) -> Result<Self> {
        let bad = |reason: &str| Error::FieldFormat { path: None, reason: reason.into() };
        let mut magic = [0u8; 6];
        input.read_exact(&mut magic).map_err(|_| bad("truncated header"))?;
        if &magic != MAGIC {
            return Err(bad("bad magic"));
        }
        let mut word = [0u8; 8];
        input.read_exact(&mut word).map_err(|_| bad("truncated header"))?;
        let dt = f64::from_le_bytes(word);
        input.read_exact(&mut word).map_err(|_| bad("truncated header"))?;
        let steps = u64::from_le_bytes(word) as usize;
        input.read_exact(&mut word).map_err(|_| bad("truncated header"))?;
        let seed = u64::from_le_bytes(word);
        let grid = TimeGrid::from_parts(dt, steps, steps).map_err(|e| bad(&e.to_string()))?;
        let mut read_array = || -> Result<Vec<f64>> {
            let mut v = Vec::with_capacity(steps);
            for _ in 0..steps {
                input.read_exact(&mut word).map_err(|_| bad("truncated increments"))?;
                v.push(f64::from_le_bytes(word));
            }
            Ok(v)
        };
        let dc = read_array()?;
        let ds = read_array()?;
        Ok(Self { grid, dc, ds, seed })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut w = BufWriter::new(File::create(path)?);
        self.write_to(&mut w)?;
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let r = BufReader::new(File::open(path)?);
        Self::read_from(r).map_err(|e| match e {
            Error::FieldFormat { reason, .. } => {
                Error::FieldFormat { path: Some(path.to_path_buf()), reason }
            }
            other => other,
        })
    }
}

/// Pairwise (cascade) summation; result is independent of thread layout.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const LEAF: usize = 64;
    if xs.len() <= LEAF {
        return xs.iter().sum();
    }
    let (a, b) = xs.split_at(xs.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}
