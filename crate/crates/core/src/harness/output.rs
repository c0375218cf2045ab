//! Result emission: the truncation-sweep CSV and a metadata sidecar.

use super::config::{AlgorithmSpec, ExperimentConfig};
use super::ExperimentResult;
use crate::error::{Error, Result};
use crate::util::format_g17;
use std::path::Path;

/// One row of the truncation sweep. Optional columns are empty in the CSV:
/// `generic_bound` needs a coefficient-norm certificate, `kernel_bound` a
/// kernel model, and `exact_oracle` is only feasible for m+u ≤ 12.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncationRow {
    pub t: usize,
    pub mc_lower: f64,
    pub mc_upper: f64,
    pub generic_bound: Option<f64>,
    pub kernel_bound: Option<f64>,
    pub exact_oracle: Option<f64>,
}

pub const CSV_HEADER: &str = "t,mc_lower,mc_upper,generic_bound,kernel_bound,exact_oracle";

fn optional(value: Option<f64>) -> String {
    value.map(format_g17).unwrap_or_default()
}

/// Renders rows as CSV text: header line, one line per row, full-precision
/// floats (17 significant digits), LF endings.
#[must_use]
pub fn render_csv(rows: &[TruncationRow]) -> String {
    let mut text = String::from(CSV_HEADER);
    text.push('\n');
    for row in rows {
        text.push_str(&format!(
            "{},{},{},{},{},{}\n",
            row.t,
            format_g17(row.mc_lower),
            format_g17(row.mc_upper),
            optional(row.generic_bound),
            optional(row.kernel_bound),
            optional(row.exact_oracle),
        ));
    }
    text
}

/// Writes the sweep CSV to `path`.
pub fn emit_csv(rows: &[TruncationRow], path: &Path) -> Result<()> {
    std::fs::write(path, render_csv(rows)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Renders the metadata sidecar: the full configuration, the partition and
/// slack constants, the error report, the assembled risk bound, and the
/// wall-clock time. `key = value` lines, floats in shortest round-trip form.
#[must_use]
pub fn render_metadata(result: &ExperimentResult, config: &ExperimentConfig) -> String {
    let mut out = String::new();
    let mut put = |key: &str, value: String| {
        out.push_str(key);
        out.push_str(" = ");
        out.push_str(&value);
        out.push('\n');
    };
    put("dataset_path", config.dataset_path.display().to_string());
    put("dataset_schema", config.dataset_schema.name().to_string());
    put("algorithm", config.algorithm.name().to_string());
    match config.algorithm {
        AlgorithmSpec::Cm { beta } => put("beta", beta.to_string()),
        AlgorithmSpec::Sgt { c, r } => {
            put("c", c.to_string());
            put("r", r.to_string());
        }
        AlgorithmSpec::Belkin { c } => put("c", c.to_string()),
    }
    put("train_fraction", config.train_fraction.to_string());
    put("k_neighbors", config.k_neighbors.to_string());
    put("mc_samples", config.mc_samples.to_string());
    put("delta", config.delta.to_string());
    put("gamma", config.gamma.to_string());
    put("standardized", config.dataset_schema.standardized().to_string());
    put("seed", result.seed.to_string());
    put("m", result.m.to_string());
    put("u", result.u.to_string());
    put("q_const", result.q_const.to_string());
    put("s_const", result.s_const.to_string());
    put("c0", result.c0.to_string());
    put("p0", result.p0.to_string());
    put(
        "truncation_grid",
        result
            .grid
            .iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(","),
    );
    put("empirical_01", result.errors.empirical_01.to_string());
    put("empirical_margin", result.errors.empirical_margin.to_string());
    put("test_01", result.errors.test_01.to_string());
    put("test_margin", result.errors.test_margin.to_string());
    put("full_sample_01", result.errors.full_sample_01.to_string());
    put(
        "full_sample_margin",
        result.errors.full_sample_margin.to_string(),
    );
    put(
        "complexity_method",
        result.risk.complexity.method.name().to_string(),
    );
    put("complexity_value", result.risk.complexity.value.to_string());
    put("risk_slack_sqrt_min", result.risk.slack_sqrt_min.to_string());
    put(
        "risk_slack_confidence",
        result.risk.slack_confidence.to_string(),
    );
    put("risk_total", result.risk.total.to_string());
    put("risk_total_clipped", result.risk.total_clipped.to_string());
    put("wall_clock_seconds", result.wall_seconds.to_string());
    out
}

/// Writes the metadata sidecar to `path`.
pub fn write_metadata(
    result: &ExperimentResult,
    config: &ExperimentConfig,
    path: &Path,
) -> Result<()> {
    std::fs::write(path, render_metadata(result, config)).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}
