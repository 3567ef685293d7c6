//! Uniformly sampled scalar paths and the CSV text they are exchanged in.

use std::io::Write;

use crate::error::{Error, Result};

/// A scalar path sampled every `dt` starting at time 0.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledPath {
    pub dt: f64,
    pub values: Vec<f64>,
}

impl SampledPath {
    pub fn new(dt: f64, values: Vec<f64>) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::param("dt", format!("must be positive and finite, got {dt}")));
        }
        Ok(Self { dt, values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Time spanned by the samples.
    pub fn duration(&self) -> f64 {
        self.values.len().saturating_sub(1) as f64 * self.dt
    }

    pub fn time(&self, index: usize) -> f64 {
        index as f64 * self.dt
    }

    /// Successive differences.
    pub fn increments(&self) -> impl Iterator<Item = f64> + '_ {
        self.values.windows(2).map(|w| w[1] - w[0])
    }

    /// Fails unless `other` has the same length and spacing.
    pub fn ensure_aligned(&self, other: &SampledPath) -> Result<()> {
        if self.values.len() != other.values.len() {
            return Err(Error::GridMismatch(format!(
                "lengths {} and {}",
                self.values.len(),
                other.values.len()
            )));
        }
        if !same_spacing(self.dt, other.dt) {
            return Err(Error::GridMismatch(format!("spacings {} and {}", self.dt, other.dt)));
        }
        Ok(())
    }
}

pub(crate) fn same_spacing(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs())
}

/// Formats a double with 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the `t,series,value` long format used for rescaled and relative paths.
pub fn write_series_csv<W: Write>(mut out: W, series: &[(&str, &SampledPath)]) -> Result<()> {
    writeln!(out, "t,series,value")?;
    for (name, path) in series {
        for (i, v) in path.values.iter().enumerate() {
            writeln!(out, "{},{},{}", fmt_f64(path.time(i)), name, fmt_f64(*v))?;
        }
    }
    Ok(())
}
