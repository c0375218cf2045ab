//! Plain-text experiment configuration: one `key = value` per line.
//!
//! Recognized keys (see [`ExperimentConfig::parse`] for semantics):
//! `dataset_path`, `dataset_schema`, `algorithm`, `train_fraction`,
//! `k_neighbors`, `beta`, `c`, `r`, `mc_samples`, `delta`, `gamma`,
//! `truncation_grid`. `#` starts a comment; blank lines are ignored;
//! unknown or duplicate keys are rejected. The seed is deliberately not a
//! file key — the CLI requires it explicitly so every run records one.

use crate::error::{Error, Result};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

/// Dataset schemas the loader understands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetSchema {
    /// 16 three-valued categorical attributes (y/n/?) with a party label.
    Voting,
    /// 8 numeric attributes with a 0/1 diagnosis label; z-scored on load.
    Pima,
    /// Numeric columns with a trailing ±1 label column; z-scored on load.
    GenericCsv,
}

impl DatasetSchema {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            DatasetSchema::Voting => "voting",
            DatasetSchema::Pima => "pima",
            DatasetSchema::GenericCsv => "generic-csv",
        }
    }

    /// Whether features are z-score standardized on load.
    #[must_use]
    pub fn standardized(self) -> bool {
        !matches!(self, DatasetSchema::Voting)
    }
}

impl FromStr for DatasetSchema {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "voting" => Ok(DatasetSchema::Voting),
            "pima" => Ok(DatasetSchema::Pima),
            "generic-csv" => Ok(DatasetSchema::GenericCsv),
            other => Err(Error::Config(format!(
                "unknown dataset_schema {other:?} (expected voting, pima, or generic-csv)"
            ))),
        }
    }
}

/// Algorithm selection with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AlgorithmSpec {
    /// Label propagation through the normalized graph kernel; `beta` in
    /// (0,1) controls smoothing (default 0.5).
    Cm { beta: f64 },
    /// Spectral transduction over the `r` lowest Laplacian eigenvectors
    /// with error weight `c`.
    Sgt { c: f64, r: usize },
    /// Laplacian-regularized least squares with norm budget `c`.
    Belkin { c: f64 },
}

impl AlgorithmSpec {
    #[must_use]
    pub fn name(self) -> &'static str {
        match self {
            AlgorithmSpec::Cm { .. } => "cm",
            AlgorithmSpec::Sgt { .. } => "sgt",
            AlgorithmSpec::Belkin { .. } => "belkin",
        }
    }
}

/// Everything needed to reproduce one experiment except the seed, which the
/// CLI passes separately.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub dataset_path: PathBuf,
    pub dataset_schema: DatasetSchema,
    pub algorithm: AlgorithmSpec,
    pub train_fraction: f64,
    pub k_neighbors: usize,
    pub mc_samples: usize,
    pub delta: f64,
    pub gamma: f64,
    /// Explicit truncation grid; `None` selects the default doubling grid
    /// 1, 2, 4, … capped at the model's spectrum size.
    pub truncation_grid: Option<Vec<usize>>,
}

impl ExperimentConfig {
    pub const DEFAULT_TRAIN_FRACTION: f64 = 1.0 / 3.0;
    pub const DEFAULT_K_NEIGHBORS: usize = 10;
    pub const DEFAULT_MC_SAMPLES: usize = 100_000;
    pub const DEFAULT_DELTA: f64 = 0.05;
    pub const DEFAULT_BETA: f64 = 0.5;

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Parses configuration text. Required keys: `dataset_path`,
    /// `dataset_schema`, `algorithm`, `gamma`, plus the selected
    /// algorithm's hyperparameters (`c`, `r` for sgt; `c` for belkin;
    /// `beta` optional for cm, default 0.5). Optional keys with defaults:
    /// `train_fraction` (1/3), `k_neighbors` (10), `mc_samples` (10⁵),
    /// `delta` (0.05). `truncation_grid` is a comma-separated list of
    /// counts; omitted, a doubling grid is used.
    pub fn parse(text: &str) -> Result<Self> {
        let mut map: BTreeMap<String, String> = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "line {}: expected `key = value`, got {raw:?}",
                    idx + 1
                )));
            };
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if map.insert(key.clone(), value).is_some() {
                return Err(Error::Config(format!(
                    "line {}: duplicate key {key:?}",
                    idx + 1
                )));
            }
        }

        let mut take = |key: &str| map.remove(key);
        let required = |key: &str, v: Option<String>| {
            v.ok_or_else(|| Error::Config(format!("missing required key {key:?}")))
        };

        let dataset_path = PathBuf::from(required("dataset_path", take("dataset_path"))?);
        let dataset_schema: DatasetSchema =
            required("dataset_schema", take("dataset_schema"))?.parse()?;
        let algorithm_name = required("algorithm", take("algorithm"))?;

        let beta = take("beta");
        let c = take("c");
        let r = take("r");
        let algorithm = match algorithm_name.as_str() {
            "cm" => {
                reject_inapplicable("cm", &[("c", &c), ("r", &r)])?;
                let beta = match beta {
                    Some(v) => parse_float("beta", &v)?,
                    None => Self::DEFAULT_BETA,
                };
                if !(beta > 0.0 && beta < 1.0) {
                    return Err(Error::Config(format!(
                        "beta must lie in (0, 1), got {beta}"
                    )));
                }
                AlgorithmSpec::Cm { beta }
            }
            "sgt" => {
                reject_inapplicable("sgt", &[("beta", &beta)])?;
                let c = parse_float("c", &required("c", c)?)?;
                let r = parse_count("r", &required("r", r)?)?;
                if !(c > 0.0) {
                    return Err(Error::Config(format!("c must be positive, got {c}")));
                }
                AlgorithmSpec::Sgt { c, r }
            }
            "belkin" => {
                reject_inapplicable("belkin", &[("beta", &beta), ("r", &r)])?;
                let c = parse_float("c", &required("c", c)?)?;
                if !(c > 0.0) {
                    return Err(Error::Config(format!("c must be positive, got {c}")));
                }
                AlgorithmSpec::Belkin { c }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown algorithm {other:?} (expected cm, sgt, or belkin)"
                )))
            }
        };

        let train_fraction = match take("train_fraction") {
            Some(v) => parse_float("train_fraction", &v)?,
            None => Self::DEFAULT_TRAIN_FRACTION,
        };
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(Error::Config(format!(
                "train_fraction must lie in (0, 1), got {train_fraction}"
            )));
        }
        let k_neighbors = match take("k_neighbors") {
            Some(v) => parse_count("k_neighbors", &v)?,
            None => Self::DEFAULT_K_NEIGHBORS,
        };
        let mc_samples = match take("mc_samples") {
            Some(v) => parse_count("mc_samples", &v)?,
            None => Self::DEFAULT_MC_SAMPLES,
        };
        let delta = match take("delta") {
            Some(v) => parse_float("delta", &v)?,
            None => Self::DEFAULT_DELTA,
        };
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Config(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        let gamma = parse_float("gamma", &required("gamma", take("gamma"))?)?;
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(Error::Config(format!(
                "gamma must be positive and finite, got {gamma}"
            )));
        }
        let truncation_grid = match take("truncation_grid") {
            Some(v) => {
                let mut grid = Vec::new();
                for piece in v.split(',') {
                    grid.push(parse_count("truncation_grid", piece.trim())?);
                }
                grid.sort_unstable();
                grid.dedup();
                if grid.is_empty() || grid[0] == 0 {
                    return Err(Error::Config(
                        "truncation_grid needs counts ≥ 1".into(),
                    ));
                }
                Some(grid)
            }
            None => None,
        };

        if let Some(stray) = map.keys().next() {
            return Err(Error::Config(format!("unknown key {stray:?}")));
        }

        Ok(ExperimentConfig {
            dataset_path,
            dataset_schema,
            algorithm,
            train_fraction,
            k_neighbors,
            mc_samples,
            delta,
            gamma,
            truncation_grid,
        })
    }
}

fn reject_inapplicable(algorithm: &str, keys: &[(&str, &Option<String>)]) -> Result<()> {
    for (name, value) in keys {
        if value.is_some() {
            return Err(Error::Config(format!(
                "key {name:?} does not apply to algorithm {algorithm:?}"
            )));
        }
    }
    Ok(())
}

fn parse_float(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| Error::Config(format!("key {key:?}: {value:?} is not a number")))
}

fn parse_count(key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| Error::Config(format!("key {key:?}: {value:?} is not a count")))
}
