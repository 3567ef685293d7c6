use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use serde_json::{Map, Value};

use super::registry::ExperimentKind;
use super::{long_paths, particles, relative, tail, waves};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "experiment", rename_all = "snake_case")]
pub enum ExperimentParams {
    BrownianSingle(particles::BrownianSingle),
    ThethQv(relative::QvLimit),
    ErgodicSin2(long_paths::ErgodicSin2),
    NpartIndependence(particles::Independence),
    PeriodicExtension(particles::TwoPeriods),
    PathDecomposition(long_paths::Decomposition),
    QuasilinearFiniteM(waves::Quasilinear),
    TailBound(tail::TailBound),
    SmallAExploratory(particles::TwoPeriods),
}

impl ExperimentParams {
    pub fn kind(&self) -> ExperimentKind {
        match self {
            ExperimentParams::BrownianSingle(_) => ExperimentKind::BrownianSingle,
            ExperimentParams::ThethQv(_) => ExperimentKind::ThethQv,
            ExperimentParams::ErgodicSin2(_) => ExperimentKind::ErgodicSin2,
            ExperimentParams::NpartIndependence(_) => ExperimentKind::NpartIndependence,
            ExperimentParams::PeriodicExtension(_) => ExperimentKind::PeriodicExtension,
            ExperimentParams::PathDecomposition(_) => ExperimentKind::PathDecomposition,
            ExperimentParams::QuasilinearFiniteM(_) => ExperimentKind::QuasilinearFiniteM,
            ExperimentParams::TailBound(_) => ExperimentKind::TailBound,
            ExperimentParams::SmallAExploratory(_) => ExperimentKind::SmallAExploratory,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            ExperimentParams::BrownianSingle(p) => p.validate(),
            ExperimentParams::ThethQv(p) => p.validate(),
            ExperimentParams::ErgodicSin2(p) => p.validate(),
            ExperimentParams::NpartIndependence(p) => p.validate(),
            ExperimentParams::PeriodicExtension(p) | ExperimentParams::SmallAExploratory(p) => p.validate(),
            ExperimentParams::PathDecomposition(p) => p.validate(),
            ExperimentParams::QuasilinearFiniteM(p) => p.validate(),
            ExperimentParams::TailBound(p) => p.validate(),
        }
    }
}

/// A validated experiment configuration.
///
/// `master_seed`, `output_dir` and `tolerances` are shared by every
/// experiment; all other keys belong to the one named by `experiment`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub master_seed: u64,
    pub output_dir: Option<PathBuf>,
    pub tolerances: BTreeMap<String, f64>,
    pub params: ExperimentParams,
    effective: Value,
}

impl ExperimentConfig {
    pub fn from_value(value: Value) -> Result<Self> {
        let Value::Object(mut map) = value.clone() else {
            return Err(Error::Config("configuration must be a JSON object".into()));
        };
        let master_seed = match map.remove("master_seed") {
            Some(v) => v
                .as_u64()
                .ok_or_else(|| Error::Config(format!("master_seed must be a non-negative integer, got {v}")))?,
            None => return Err(Error::Config("missing key `master_seed`".into())),
        };
        let output_dir = match map.remove("output_dir") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(v) => return Err(Error::Config(format!("output_dir must be a string, got {v}"))),
        };
        let tolerances: BTreeMap<String, f64> = match map.remove("tolerances") {
            None => BTreeMap::new(),
            Some(v) => serde_json::from_value(v)
                .map_err(|e| Error::Config(format!("tolerances must map names to numbers: {e}")))?,
        };
        let params: ExperimentParams =
            serde_json::from_value(Value::Object(map)).map_err(|e| Error::Config(e.to_string()))?;
        params.validate()?;

        let kind = params.kind();
        let expected = kind.tolerances();
        for name in tolerances.keys() {
            if !expected.contains(&name.as_str()) {
                return Err(Error::Config(format!(
                    "unknown tolerance `{name}` for {}; expected {expected:?}",
                    kind.name()
                )));
            }
        }
        for name in expected {
            match tolerances.get(*name) {
                None => return Err(Error::Config(format!("missing tolerance `{name}` for {}", kind.name()))),
                Some(v) if !v.is_finite() || *v < 0.0 => {
                    return Err(Error::Config(format!("tolerance `{name}` must be finite and non-negative")))
                }
                Some(_) => {}
            }
        }
        Ok(ExperimentConfig { master_seed, output_dir, tolerances, params, effective: value })
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        Self::from_value(value)
    }

    /// Reads a config file, then applies the seed override and `key=value`
    /// overrides in that order.
    pub fn load(path: &Path, seed_override: Option<&str>, sets: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let mut value: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let Some(seed) = seed_override {
            let seed: u64 = seed
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("seed override `{seed}` is not a u64")))?;
            set_path(&mut value, "master_seed", Value::from(seed))?;
        }
        for s in sets {
            apply_override(&mut value, s)?;
        }
        Self::from_value(value)
    }

    pub fn kind(&self) -> ExperimentKind {
        self.params.kind()
    }

    /// A declared tolerance. Names are checked at load time.
    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances[name]
    }

    /// The configuration as loaded, after overrides.
    pub fn effective(&self) -> &Value {
        &self.effective
    }
}

/// Applies one `key=value` override; dotted keys address nested objects.
/// The value is parsed as JSON, falling back to a plain string.
pub fn apply_override(config: &mut Value, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    if key.is_empty() {
        return Err(Error::Config(format!("override `{assignment}` has an empty key")));
    }
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(config, key, value)
}

fn set_path(config: &mut Value, key: &str, value: Value) -> Result<()> {
    let mut node = config;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        let Value::Object(map) = node else {
            return Err(Error::Config(format!("cannot set `{key}`: parent is not an object")));
        };
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part.to_string()).or_insert_with(|| Value::Object(Map::new()));
    }
    Ok(())
}

pub(crate) fn require(ok: bool, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(message()))
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    require(v > 0.0 && v.is_finite(), || format!("`{name}` must be positive, got {v}"))
}

pub(crate) fn non_negative(name: &str, v: f64) -> Result<()> {
    require(v >= 0.0 && v.is_finite(), || format!("`{name}` must be non-negative, got {v}"))
}

pub(crate) fn count_at_least(name: &str, v: usize, min: usize) -> Result<()> {
    require(v >= min, || format!("`{name}` must be at least {min}, got {v}"))
}
